#include <doctest.h>

#include <cmath>
#include <vector>

#include "evt/diagnostics.hpp"
#include "evt/dist.hpp"
#include "evt/error.hpp"
#include "evt/fit.hpp"
#include "evt/rng.hpp"

using namespace evt;
using doctest::Approx;

namespace {

GpdFit fixed_fit(double xi, double beta) {
  GpdFit f;
  f.params = {xi, beta};
  f.converged = true;
  return f;
}

}  // namespace

TEST_CASE("plotting positions") {
  CHECK(plotting_position(1, 1) == 0.5);
  CHECK(plotting_position(3, 3) == 0.75);
}

TEST_CASE("exponential qq plot of exact quantiles is the identity") {
  const std::size_t n = 200;
  std::vector<double> x;
  for (std::size_t i = 1; i <= n; ++i) x.push_back(-std::log1p(-plotting_position(i, n)));
  const auto s = qq_exponential(x);
  for (const auto& p : s.points) CHECK(p.x == p.y);
  CHECK(s.meta.at("slope") == Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(s.meta.at("intercept")) < 1e-12);
  CHECK(std::abs(s.meta.at("concavity")) < 1e-10);
}

TEST_CASE("exponential qq concavity sign") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SplitMix64 g(seed);
    std::vector<double> pareto(2000), uniform(2000);
    for (auto& v : pareto) v = std::pow(g.uniform(), -0.5);
    for (auto& v : uniform) v = g.uniform();
    CHECK(qq_exponential(pareto).meta.at("concavity") > 0);
    CHECK(qq_exponential(uniform).meta.at("concavity") < 0);
  }
}

TEST_CASE("pp plot") {
  const auto y = gpd_sample({0.2, 1}, 10000, 3);
  CHECK(pp_plot(fixed_fit(0.2, 1), y).meta.at("max_abs_dev") < 0.03);

  const auto one = pp_plot(fixed_fit(0, 1), std::vector<double>{1.0});
  REQUIRE(one.points.size() == 1);
  CHECK(one.points[0].x == 0.5);
  CHECK(one.points[0].y == Approx(1 - std::exp(-1.0)));

  SplitMix64 g(4);
  std::vector<double> pareto(10000);
  for (auto& v : pareto) v = std::pow(g.uniform(), -0.5) - 1;
  double mean = 0;
  for (double v : pareto) mean += v / pareto.size();
  CHECK(pp_plot(fixed_fit(0, mean), pareto).meta.at("max_abs_dev") > 0.05);

  CHECK_THROWS_AS(pp_plot(GpdFit{}, y), Error);
}

TEST_CASE("gpd qq plot") {
  const auto y = gpd_sample({0.1, 1}, 10000, 6);
  CHECK(std::abs(qq_gpd(fixed_fit(0.1, 1), y).meta.at("slope") - 1) < 0.05);
  std::vector<double> doubled;
  for (double v : y) doubled.push_back(2 * v);
  CHECK(std::abs(qq_gpd(fixed_fit(0.1, 1), doubled).meta.at("slope") - 2) < 0.1);
  CHECK(qq_gpd(fixed_fit(0.1, 1), std::vector<double>{0.4}).points.size() == 1);
}

TEST_CASE("return level series shape") {
  const auto periods = log_spaced(10, 10000, 13);
  const Cov2 cov{0.01, 0.0, 0.01};

  auto second_diffs = [](const PlotSeries& s) {
    std::vector<double> d;
    for (std::size_t i = 1; i + 1 < s.points.size(); ++i) {
      d.push_back(s.points[i + 1].y - 2 * s.points[i].y + s.points[i - 1].y);
    }
    return d;
  };

  const auto flat = return_level_series(TailModel{0, 0.0, 1, 1000, 100}, cov, periods);
  REQUIRE(flat.points.size() == periods.size());
  for (double d : second_diffs(flat)) CHECK(std::abs(d) < 1e-9);

  const auto convex = return_level_series(TailModel{0, 0.3, 1, 1000, 100}, cov, periods);
  for (double d : second_diffs(convex)) CHECK(d > 0);
  for (const auto& b : *convex.bands) CHECK(b.lo < b.hi);

  const auto tight = return_level_series(TailModel{0, 0.3, 1, 1000, 100}, Cov2{}, periods);
  for (std::size_t i = 0; i < tight.points.size(); ++i) {
    CHECK((*tight.bands)[i].lo == tight.points[i].y);
    CHECK((*tight.bands)[i].hi == tight.points[i].y);
  }

  // Periods whose level falls below the threshold are dropped.
  const std::vector<double> short_periods{1, 100};
  CHECK(return_level_series(TailModel{0, 0.0, 1, 1000, 100}, cov, short_periods).points.size() == 1);
}

TEST_CASE("density series") {
  const auto y = gpd_sample({0.1, 1}, 100000, 9);
  const auto d = density_series(fixed_fit(0.1, 1), y, 50);
  REQUIRE(d.histogram.points.size() == 50);
  CHECK(d.fitted.points.size() == 200);
  double worst = 0;
  for (const auto& p : d.histogram.points) {
    worst = std::max(worst, std::abs(p.y - gpd_pdf({0.1, 1}, p.x)));
  }
  CHECK(worst < 0.05);

  const std::vector<double> z{1.0, 2.0, 5.0};
  const auto one = density_series(fixed_fit(0, 1), z, 1);
  REQUIRE(one.histogram.points.size() == 1);
  CHECK(one.histogram.points[0].y == Approx(1.0 / 4));
}

TEST_CASE("log spaced grid") {
  const auto g = log_spaced(1, 1000, 4);
  CHECK(g.front() == 1);
  CHECK(g[1] == Approx(10));
  CHECK(g.back() == Approx(1000));
  CHECK_THROWS_AS(log_spaced(0, 1, 3), Error);
}
