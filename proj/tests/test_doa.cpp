#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "evt/doa.hpp"
#include "evt/error.hpp"
#include "evt/fit.hpp"
#include "evt/quadrature.hpp"

using namespace evt;
using doctest::Approx;

namespace {

// 1 - F(x) = 2 (1 - x)^2 near the right endpoint 1.
CdfSpec quadratic_endpoint() {
  CdfSpec s;
  s.name = "quadratic-endpoint";
  s.lep = 1 - 1 / std::sqrt(2.0);
  s.uep = 1;
  s.cdf = [](double x) {
    if (x <= 1 - 1 / std::sqrt(2.0)) return 0.0;
    if (x >= 1) return 1.0;
    return 1 - 2 * (1 - x) * (1 - x);
  };
  s.survival = [](double x) {
    if (x >= 1) return 0.0;
    return std::min(1.0, 2 * (1 - x) * (1 - x));
  };
  s.quantile = [](double q) { return 1 - std::sqrt((1 - q) / 2); };
  s.tail_quantile = [](double u) { return 1 - std::sqrt(u / 2); };
  return s;
}

// 1 - F(x) = 1 / (x ln(e + x)) for x >= 1 (approximately; normalized at 1).
CdfSpec slowly_varying_pareto() {
  CdfSpec s;
  s.name = "pareto-log";
  s.lep = 1;
  const double k = std::log(std::numbers::e + 1);
  auto sf = [k](double x) { return x <= 1 ? 1.0 : k / (x * std::log(std::numbers::e + x)); };
  s.survival = sf;
  s.cdf = [sf](double x) { return 1 - sf(x); };
  auto tq = [sf](double u) {
    double lo = 1, hi = 2;
    while (sf(hi) > u) hi *= 2;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (sf(mid) > u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  s.tail_quantile = tq;
  s.quantile = [tq](double q) { return q <= 0 ? 1.0 : tq(1 - q); };
  return s;
}

}  // namespace

TEST_CASE("quadrature") {
  const auto r = quad::integrate([](double x) { return std::sin(x); }, 0, std::numbers::pi);
  CHECK(r.value == Approx(2.0).epsilon(1e-12));
  const auto t = quad::integrate_tail([](double x) { return std::exp(-x); }, 0, 1);
  CHECK(t.value == Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(quad::integrate_tail([](double x) { return 1 / (1 + x); }, 0, 1), Error);
}

TEST_CASE("asymptotic moment R") {
  CHECK(asymptotic_moment_R(builtin_spec("exponential"), 5) == Approx(1.0).epsilon(1e-8));
  CHECK(asymptotic_moment_R(builtin_spec("uniform"), 0.5) == Approx(0.25).epsilon(1e-8));
  CHECK(asymptotic_moment_R(builtin_spec("gpd:0.5,1"), 1) == Approx(3.0).epsilon(1e-6));
  try {
    asymptotic_moment_R(builtin_spec("pareto:1"), 10);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::diverged_integral);
  }
}

TEST_CASE("frechet check") {
  const auto v = check_frechet(builtin_spec("pareto:2"));
  CHECK(v.classified_domain == Domain::Frechet);
  CHECK(v.gamma_hat == Approx(0.5).epsilon(1e-9));
  CHECK(v.residual < 1e-6);
  CHECK(check_frechet(builtin_spec("exponential")).classified_domain == Domain::Unclassified);
  try {
    check_frechet(builtin_spec("uniform"));
    FAIL("expected wrong branch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::wrong_branch);
  }
}

TEST_CASE("frechet check with a slowly varying factor") {
  const CdfSpec s = slowly_varying_pareto();
  ProbeConfig near, far;
  near.x_points = {1e3};
  far.x_points = {1e6};
  const auto a = evaluate_criterion(s, Criterion::A11, near);
  const auto b = evaluate_criterion(s, Criterion::A11, far);
  CHECK(std::abs(b.gamma_hat - 1) < std::abs(a.gamma_hat - 1));
  CHECK(std::abs(b.gamma_hat - 1) < 0.1);
  // Direct ratio oracle at x = 1e6, lambda = 2.
  const double x = 1e6;
  const double ratio = s.sf(2 * x) / s.sf(x);
  CHECK(ratio == Approx(0.5 * std::log(std::numbers::e + x) / std::log(std::numbers::e + 2 * x)));
}

TEST_CASE("gumbel check") {
  const CdfSpec e = builtin_spec("exponential");
  const double x = 20;
  const double R = asymptotic_moment_R(e, x);
  CHECK(std::abs(e.sf(x + R) / e.sf(x) - std::exp(-1.0)) < 1e-8);
  CHECK(check_gumbel(e).classified_domain == Domain::Gumbel);
  CHECK(check_gumbel(builtin_spec("pareto:2")).classified_domain == Domain::Unclassified);

  // Normal A23 oracle values (50-digit arithmetic).
  const CdfSpec n = builtin_spec("normal");
  // Written as two ratios so the squared density cannot underflow.
  auto a23 = [&](double x) {
    return (n.second_derivative(x) / n.derivative(x)) * (n.sf(x) / n.derivative(x));
  };
  CHECK(a23(8) == Approx(-0.98505570606345837).epsilon(1e-9));
  CHECK(std::abs(a23(35) + 1) < 1e-3);
  CHECK(check_gumbel(n).classified_domain == Domain::Gumbel);
}

TEST_CASE("weibull check") {
  const auto u = check_weibull(builtin_spec("uniform"));
  CHECK(u.classified_domain == Domain::Weibull);
  CHECK(std::abs(u.gamma_hat + 1) < 1e-4);
  const auto g = check_weibull(builtin_spec("gpd:-0.5,1"));
  CHECK(std::abs(g.gamma_hat + 0.5) < 1e-4);
  const auto q = check_weibull(quadratic_endpoint());
  CHECK(std::abs(q.gamma_hat + 0.5) < 1e-3);
  try {
    check_weibull(builtin_spec("exponential"));
    FAIL("expected wrong branch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::wrong_branch);
  }
}

TEST_CASE("capability errors name the missing callable") {
  CdfSpec s = builtin_spec("exponential");
  s.second_derivative = nullptr;
  try {
    evaluate_criterion(s, Criterion::A23);
    FAIL("expected capability error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::capability);
    CHECK(std::string(e.what()).find("second_derivative") != std::string::npos);
  }
}

TEST_CASE("classification") {
  const auto e = classify_domain(builtin_spec("exponential"));
  CHECK(e.classified_domain == Domain::Gumbel);
  CHECK(e.gamma_hat == 0.0);
  const auto p = classify_domain(builtin_spec("pareto:4"));
  CHECK(p.classified_domain == Domain::Frechet);
  CHECK(std::abs(p.gamma_hat - 0.25) < 1e-4);
  const auto u = classify_domain(builtin_spec("uniform"));
  CHECK(u.classified_domain == Domain::Weibull);
  CHECK(std::abs(u.gamma_hat + 1) < 0.05);
  CHECK(classify_domain(builtin_spec("gpd:0.3,1")).classified_domain == Domain::Frechet);
  CHECK(classify_domain(builtin_spec("gpd:-0.3,1")).classified_domain == Domain::Weibull);
}

TEST_CASE("every builtin name parses") {
  for (const auto& name : builtin_spec_names()) {
    CHECK_NOTHROW(builtin_spec(name));
  }
  CHECK_THROWS_AS(builtin_spec("cauchy"), Error);
}

TEST_CASE("karamata quantile") {
  KaramataRep power;
  power.gamma = 0.5;
  CHECK(karamata_quantile(power, 0.25) == Approx(2.0).epsilon(1e-14));

  KaramataRep bounded;
  bounded.gamma = -1;
  bounded.uep = 1;
  CHECK(karamata_quantile(bounded, 0.5) == Approx(0.5).epsilon(1e-14));

  KaramataRep gumbel;
  gumbel.gamma = 0;
  CHECK(karamata_quantile(gumbel, std::exp(-1.0)) == Approx(2.0).epsilon(1e-8));

  KaramataRep bad;
  bad.gamma = -0.5;
  try {
    karamata_quantile(bad, 0.5);
    FAIL("expected invalid representation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_representation);
  }
}

TEST_CASE("karamata sampling") {
  KaramataRep power;
  power.gamma = 0.5;
  CHECK(karamata_sample(power, 0, 5).empty());
  const auto x = karamata_sample(power, 10000, 5);
  CHECK(std::abs(hill_estimator(x, 500) - 0.5) < 0.07);

  KaramataRep bounded;
  bounded.gamma = -1;
  bounded.uep = 1;
  for (double v : karamata_sample(bounded, 1000, 5)) REQUIRE(v < 1);
}
