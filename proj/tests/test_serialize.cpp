#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "evt/dist.hpp"
#include "evt/error.hpp"
#include "evt/fit.hpp"
#include "evt/numfmt.hpp"
#include "evt/serialize.hpp"

using namespace evt;

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3, 8.5, -2.5e-300, 1e300, 123456789.0}) {
    double back = 0;
    REQUIRE(parse_number(format_number(v), back));
    CHECK(back == v);
  }
  CHECK(format_number(8.5) == "8.5");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
  double v = 0;
  CHECK(parse_number(" +2.5 ", v));
  CHECK(v == 2.5);
  CHECK_FALSE(parse_number("2.5x", v));
  CHECK_FALSE(parse_number("", v));
}

TEST_CASE("json numbers") {
  CHECK(json_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isinf(number_from_json(Json("inf"))));
  CHECK(std::isnan(number_from_json(Json("nan"))));
  CHECK(number_from_json(Json(2.5)) == 2.5);
}

TEST_CASE("fit json round trip") {
  const auto f = fit_gpd_mle(gpd_sample({0.2, 1}, 2000, 5));
  const Json j = to_json(f);
  CHECK(j["method"] == "MLE");
  CHECK(j.contains("cov"));
  const GpdFit g = gpd_fit_from_json(Json::parse(j.dump()));
  CHECK(g.params.xi == f.params.xi);
  CHECK(g.params.beta == f.params.beta);
  CHECK(g.loglik == f.loglik);
  CHECK(g.n_exceed == f.n_exceed);
  CHECK(g.converged == f.converged);
  REQUIRE(g.cov.has_value());
  CHECK(g.cov->xi_beta == f.cov->xi_beta);

  Json broken = j;
  broken.erase("xi");
  try {
    gpd_fit_from_json(broken);
    FAIL("expected schema error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::schema);
  }
}

TEST_CASE("csv tables") {
  RiskEstimates rows[] = {{0.99, 1.5, std::numeric_limits<double>::infinity()}};
  const auto t = to_csv(std::span<const RiskEstimates>(rows));
  CHECK(t.str() == "q,var,es\n0.99,1.5,inf\n");
}

TEST_CASE("atomic writes replace the target") {
  const auto dir = std::filesystem::temp_directory_path() / "evt_serialize_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  write_atomic(path, "first");
  write_atomic(path, "second");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
}
