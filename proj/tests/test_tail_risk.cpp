#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "evt/dist.hpp"
#include "evt/error.hpp"
#include "evt/fit.hpp"
#include "evt/tail_risk.hpp"
#include "evt/threshold.hpp"

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

TEST_CASE("tail probability") {
  const TailModel m{3.0, 0.2, 1.0, 100, 5};
  CHECK(tail_prob(m, 3.0) == Approx(0.05));
  CHECK(tail_prob(m, 8.0) == Approx(0.0015625).epsilon(1e-13));
  const TailModel e{0.0, 0.0, 1.0, 10, 1};
  CHECK(tail_prob(e, std::log(10.0)) == Approx(0.01).epsilon(1e-13));
  CHECK(code_of([&] { tail_prob(m, 2.9); }) == Errc::below_threshold);
}

TEST_CASE("value at risk") {
  const TailModel e{0.0, 0.0, 1.0, 10, 10};
  CHECK(var_q(e, 1 - std::exp(-1.0)) == Approx(1.0).epsilon(1e-14));
  const TailModel m{0.0, 0.2, 1.0, 100, 5};
  CHECK(var_q(m, 0.9984375) == Approx(5.0).epsilon(1e-10));
  CHECK(var_q(m, 0.95 + 1e-12) == Approx(0.0).scale(1).epsilon(1e-9));
  CHECK(code_of([&] { var_q(m, 0.95); }) == Errc::below_threshold);
  CHECK(code_of([&] { var_q(m, 1.5); }) == Errc::domain);
  CHECK(std::isinf(var_q(m, 1.0)));
  const TailModel b{1.0, -0.5, 1.0, 100, 5};
  CHECK(var_q(b, 1.0) == Approx(3.0));
}

TEST_CASE("expected shortfall") {
  const TailModel m{0.0, 0.5, 1.0, 10, 10};
  const double q = 0.84;  // var = 2 (0.16^-0.5 - 1) = 3
  CHECK(var_q(m, q) == Approx(3.0).epsilon(1e-12));
  CHECK(es_q(m, q) == Approx(8.0).epsilon(1e-12));
  const TailModel inf{0.0, 1.0, 1.0, 10, 10};
  CHECK(std::isinf(es_q(inf, 0.9)));
  const TailModel heavy{0.0, 1.5, 1.0, 10, 10};
  CHECK(std::isinf(es_q(heavy, 0.9)));
  const TailModel nearly{0.0, 0.999, 1.0, 10, 10};
  CHECK(std::isfinite(es_q(nearly, 0.9)));
}

TEST_CASE("var and es algebra") {
  for (double xi : {-0.4, -0.1, 0.0, 0.3, 0.8}) {
    const TailModel m{2.0, xi, 1.5, 1000, 80};
    for (double q : {0.93, 0.95, 0.99, 0.999, 0.99999}) {
      const double v = var_q(m, q);
      CHECK(std::abs(tail_prob(m, v) - (1 - q)) < 1e-10);
      CHECK(es_q(m, q) >= v);

      // Translation and scale by a power of two.
      TailModel t = m;
      t.u += 10;
      CHECK(var_q(t, q) == Approx(v + 10).epsilon(1e-12));
      CHECK(es_q(t, q) == Approx(es_q(m, q) + 10).epsilon(1e-12));
      TailModel s = m;
      s.u *= 4;
      s.beta *= 4;
      CHECK(var_q(s, q) == 4 * v);
    }
  }
}

TEST_CASE("risk table") {
  const TailModel m{0.0, 0.2, 1.0, 100, 5};
  const std::vector<double> qs{0.99, 0.999};
  const auto t = risk_table(m, qs);
  REQUIRE(t.size() == 2);
  CHECK(t[1].var_q > t[0].var_q);
  CHECK(t[0].es_q == es_q(m, 0.99));
}

TEST_CASE("return level") {
  const TailModel e{0.0, 0.0, 1.0, 10, 10};
  CHECK(return_level(e, 1, std::numbers::e) == Approx(1.0).epsilon(1e-14));
  const TailModel m{0.0, 0.2, 1.0, 10, 10};
  CHECK(return_level(m, 4, 8) == Approx(5.0).epsilon(1e-12));
  const TailModel sparse{0.0, 0.2, 1.0, 100, 5};
  CHECK(code_of([&] { return_level(sparse, 1, 2); }) == Errc::below_threshold);
}

TEST_CASE("invalid tail models") {
  CHECK(code_of([] { validate(TailModel{0, 0, 1, 10, 0}); }) == Errc::invalid_parameter);
  CHECK(code_of([] { validate(TailModel{0, 0, 1, 10, 11}); }) == Errc::invalid_parameter);
  CHECK(code_of([] { validate(TailModel{0, 0, -1, 10, 5}); }) == Errc::invalid_parameter);
}

TEST_CASE("var from a large fitted sample approaches the true quantile") {
  const GpdParams p{0.2, 1};
  const auto x = gpd_sample(p, 1000000, 77);
  const double u = gpd_quantile(p, 0.9);
  const auto fit = fit_gpd_mle(exceedances(x, u));
  const TailModel m = TailModel::from_fit(fit);
  CHECK(m.n == 1000000);
  const double truth = gpd_quantile(p, 0.999);
  CHECK(std::abs(var_q(m, 0.999) / truth - 1) < 0.02);
}
