#include "evt/tail_risk.hpp"

#include <cmath>
#include <limits>

#include "evt/error.hpp"
#include "evt/fit.hpp"

namespace evt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (x^xi - 1) / xi written as expm1(xi log x) / xi, continuous at xi = 0.
double box_cox(double xi, double log_x) {
  if (std::abs(xi) < kShapeZero) return log_x;
  return std::expm1(xi * log_x) / xi;
}

}  // namespace

TailModel TailModel::from_fit(const GpdFit& fit) {
  TailModel m{fit.threshold, fit.params.xi, fit.params.beta, fit.n_total, fit.n_exceed};
  validate(m);
  return m;
}

double TailModel::exceed_fraction() const {
  return static_cast<double>(n_u) / static_cast<double>(n);
}

void validate(const TailModel& m) {
  if (m.n_u == 0 || m.n_u > m.n) throw Error(Errc::invalid_parameter, "tail model needs 0 < n_u <= n");
  if (!std::isfinite(m.u) || !std::isfinite(m.xi)) throw Error(Errc::invalid_parameter, "tail model parameters must be finite");
  validate(m.params());
}

double tail_prob(const TailModel& m, double y) {
  validate(m);
  if (!(y >= m.u)) throw Error(Errc::below_threshold, "tail estimate is undefined below the threshold");
  return m.exceed_fraction() * gpd_sf(m.params(), y - m.u);
}

double var_q(const TailModel& m, double q) {
  validate(m);
  if (!(q >= 0 && q <= 1)) throw Error(Errc::domain, "probability must lie in [0, 1]");
  const double p = 1 - q;
  const double anchor = m.exceed_fraction();
  if (!(p < anchor)) throw Error(Errc::below_threshold, "quantile level is not above the threshold");
  if (p == 0) return m.u + gpd_upper_endpoint(m.params());
  // u + beta ((p / anchor)^(-xi) - 1) / xi
  return m.u - m.beta * box_cox(-m.xi, std::log(p / anchor));
}

double es_q(const TailModel& m, double q) {
  const double v = var_q(m, q);
  if (m.xi >= 1) return kInf;
  if (!std::isfinite(v)) return v;
  // var plus the mean of the GPD excess over var (scale beta + xi (var - u)).
  return v + (m.beta + m.xi * (v - m.u)) / (1 - m.xi);
}

std::vector<RiskEstimates> risk_table(const TailModel& m, std::span<const double> qs) {
  std::vector<RiskEstimates> out;
  out.reserve(qs.size());
  for (double q : qs) out.push_back({q, var_q(m, q), es_q(m, q)});
  return out;
}

double return_level(const TailModel& m, double r, double period_count) {
  validate(m);
  if (!(r > 0) || !(period_count > 0)) throw Error(Errc::domain, "observation rate and period count must be positive");
  const double mult = r * period_count * m.exceed_fraction();
  if (!(mult >= 1)) throw Error(Errc::below_threshold, "return level lies below the threshold");
  return m.u + m.beta * box_cox(m.xi, std::log(mult));
}

}  // namespace evt
