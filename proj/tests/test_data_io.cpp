#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "evt/data_io.hpp"
#include "evt/dist.hpp"
#include "evt/error.hpp"
#include "evt/rng.hpp"

using namespace evt;
using doctest::Approx;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::io;
}

}  // namespace

TEST_CASE("csv parsing") {
  const auto p = parse_csv("claim_size,gender,experience\n100,m,y\n250.5,F,e\n\"1,000\",,\n");
  CHECK(p.size() == 2);
  CHECK(p.rejected == 1);
  CHECK(p.records[1].gender == Gender::Female);
  CHECK(p.records[1].experience == Experience::Experienced);
  CHECK(p.log_sizes[0] == std::log(100.0));

  const auto q = parse_csv("gender,claim_size\nm,1\nf,2\nm,3\n");
  CHECK(q.size() == 3);
  CHECK(q.records[2].claim_size == 3);

  const auto z = parse_csv("claim_size\n0\n5\n");
  CHECK(z.size() == 1);
  CHECK(z.rejected == 1);

  const auto w = parse_csv("claim_size,gender\n5,x\n6,\n");
  CHECK(w.size() == 2);
  CHECK(w.records[0].gender == Gender::Unknown);
  CHECK(w.warnings == 1);

  CHECK(code_of([] { parse_csv("size,gender\n1,m\n"); }) == Errc::schema);

  CsvSchema s;
  s.size_column = "amount";
  s.delimiter = ';';
  CHECK(parse_csv("amount;gender\n7;male\n", s).records[0].gender == Gender::Male);
}

TEST_CASE("csv files") {
  const auto dir = std::filesystem::temp_directory_path() / "evt_data_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "claims.csv";
  {
    std::ofstream(path) << "claim_size,gender,experience\n1,m,y\n2,f,e\n3,m,e\n";
  }
  CHECK(load_csv(path).size() == 3);
  CHECK(code_of([&] { load_csv(dir / "missing.csv"); }) == Errc::io);
  std::filesystem::remove_all(dir);
}

TEST_CASE("grouping") {
  Portfolio males;
  for (int i = 1; i <= 5; ++i) males.add({double(i), Gender::Male, Experience::Young});
  const auto g = group(males, GroupBy::Gender);
  REQUIRE(g.size() == 1);
  CHECK(g[0].first == "male");

  SimConfig cfg;
  cfg.n = 2000;
  const auto p = simulate_portfolio(cfg);
  for (GroupBy by : {GroupBy::None, GroupBy::Gender, GroupBy::Experience}) {
    const auto parts = group(p, by);
    std::vector<double> joined;
    std::size_t total = 0;
    for (const auto& [name, part] : parts) {
      total += part.size();
      joined.insert(joined.end(), part.log_sizes.begin(), part.log_sizes.end());
    }
    CHECK(total == p.size());
    auto orig = p.log_sizes;
    std::sort(orig.begin(), orig.end());
    std::sort(joined.begin(), joined.end());
    CHECK(joined == orig);
  }
  CHECK(group(p, GroupBy::None)[0].first == "all");
  CHECK(parse_group_by("gender") == GroupBy::Gender);
  CHECK_THROWS_AS(parse_group_by("age"), Error);
}

TEST_CASE("summary statistics") {
  const auto s = summarize(std::vector<double>{-1, 0, 1});
  CHECK(s.skewness == Approx(0.0).scale(1));
  CHECK(s.mean == 0);

  std::vector<double> ten;
  for (int i = 1; i <= 10; ++i) ten.push_back(i);
  CHECK(summarize(ten).p90 == Approx(9.1));
  CHECK(summarize(ten).min == 1);
  CHECK(summarize(ten).max == 10);

  CHECK(code_of([] { summarize(std::vector<double>{1}); }) == Errc::insufficient_data);

  // Box-Muller normals, independent of the library quantile.
  SplitMix64 rng(2024);
  std::vector<double> z(1000000);
  for (auto& v : z) {
    const double u1 = rng.uniform(), u2 = rng.uniform();
    v = std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
  }
  CHECK(std::abs(summarize(z).kurtosis - 3) < 0.05);
}

TEST_CASE("portfolio simulation") {
  SimConfig none;
  none.n = 5000;
  none.tail_weight = 0;
  for (double v : simulate_portfolio(none).log_sizes) REQUIRE(v < none.splice_u);

  const SimConfig cfg;
  const auto p = simulate_portfolio(cfg);
  CHECK(p.size() == cfg.n);
  const double frac = static_cast<double>(std::count_if(p.log_sizes.begin(), p.log_sizes.end(),
                                                        [&](double v) { return v > cfg.splice_u; })) /
                      static_cast<double>(p.size());
  CHECK(std::abs(frac - cfg.tail_weight) < 0.01);
  CHECK(simulate_portfolio(cfg).log_sizes == p.log_sizes);
  for (std::size_t i = 0; i < 100; ++i) CHECK(p.log_sizes[i] == std::log(p.records[i].claim_size));

  // Excesses over the splice follow the configured GPD: KS distance.
  std::vector<double> ex;
  for (double v : p.log_sizes) if (v > cfg.splice_u) ex.push_back(v - cfg.splice_u);
  std::sort(ex.begin(), ex.end());
  double ks = 0;
  const double m = static_cast<double>(ex.size());
  for (std::size_t i = 0; i < ex.size(); ++i) {
    const double f = gpd_cdf(cfg.tail, ex[i]);
    ks = std::max({ks, std::abs(f - i / m), std::abs(f - (i + 1) / m)});
  }
  CHECK(ks < 1.63 / std::sqrt(m));

  SimConfig bad;
  bad.splice_u = -50;
  CHECK(code_of([&] { validate(bad); }) == Errc::config);
  bad = SimConfig{};
  bad.tail_weight = 1.0;
  CHECK(code_of([&] { validate(bad); }) == Errc::config);
  bad = SimConfig{};
  bad.body_sigma = 0;
  CHECK(code_of([&] { validate(bad); }) == Errc::config);
}

TEST_CASE("simulator config text") {
  const auto c = parse_sim_config("# comment\nn = 500\nseed=9\ntail_xi = 0.2\n\nsplice_u = 9 # trailing\n");
  CHECK(c.n == 500);
  CHECK(c.seed == 9);
  CHECK(c.tail.xi == 0.2);
  CHECK(c.splice_u == 9);
  const auto back = parse_sim_config(format_sim_config(c));
  CHECK(back.n == c.n);
  CHECK(back.tail.beta == c.tail.beta);
  CHECK(back.body_mu == c.body_mu);
  CHECK(code_of([] { parse_sim_config("colour = red\n"); }) == Errc::config);
  CHECK(code_of([] { parse_sim_config("n = 1.5\n"); }) == Errc::config);
}
