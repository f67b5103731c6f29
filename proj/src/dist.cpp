#include "evt/dist.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "evt/error.hpp"
#include "evt/rng.hpp"

namespace evt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool zero_shape(double xi) { return std::abs(xi) < kShapeZero; }

}  // namespace

void validate(const GpdParams& p) {
  if (!(p.beta > 0.0) || !std::isfinite(p.beta) || !std::isfinite(p.xi)) {
    throw Error(Errc::invalid_parameter,
                "gpd: scale must be finite and positive, got beta=" +
                    std::to_string(p.beta));
  }
}

double gpd_upper_endpoint(const GpdParams& p) {
  validate(p);
  if (p.xi >= 0.0 || zero_shape(p.xi)) return kInf;
  return -p.beta / p.xi;
}

double gpd_sf(const GpdParams& p, double x) {
  validate(p);
  if (x <= 0.0) return 1.0;
  if (zero_shape(p.xi)) return std::exp(-x / p.beta);
  const double z = p.xi * x / p.beta;
  if (z <= -1.0) return 0.0;
  return std::exp(-std::log1p(z) / p.xi);
}

double gpd_cdf(const GpdParams& p, double x) {
  validate(p);
  if (x <= 0.0) return 0.0;
  if (zero_shape(p.xi)) return -std::expm1(-x / p.beta);
  const double z = p.xi * x / p.beta;
  if (z <= -1.0) return 1.0;
  return -std::expm1(-std::log1p(z) / p.xi);
}

double gpd_pdf(const GpdParams& p, double x) {
  validate(p);
  if (x < 0.0) return 0.0;
  if (zero_shape(p.xi)) return std::exp(-x / p.beta) / p.beta;
  const double z = p.xi * x / p.beta;
  if (z <= -1.0) return 0.0;
  return std::exp((-1.0 / p.xi - 1.0) * std::log1p(z)) / p.beta;
}

// Written as beta * (unit-scale quantile) so that scaling beta scales the
// result exactly.
double gpd_quantile(const GpdParams& p, double q) {
  validate(p);
  if (!(q >= 0.0 && q < 1.0)) {
    throw Error(Errc::domain,
                "gpd_quantile: probability must lie in [0, 1), got " +
                    std::to_string(q));
  }
  const double log_sf = std::log1p(-q);
  if (zero_shape(p.xi)) return p.beta * -log_sf;
  return p.beta * (std::expm1(-p.xi * log_sf) / p.xi);
}

double gpd_tail_quantile(const GpdParams& p, double u) {
  validate(p);
  if (!(u > 0.0 && u <= 1.0)) {
    throw Error(Errc::domain,
                "gpd_tail_quantile: tail probability must lie in (0, 1], got " +
                    std::to_string(u));
  }
  const double log_sf = std::log(u);
  if (zero_shape(p.xi)) return p.beta * -log_sf;
  return p.beta * (std::expm1(-p.xi * log_sf) / p.xi);
}

Moments gpd_moments(const GpdParams& p) {
  validate(p);
  Moments m{kInf, kInf};
  if (p.xi < 1.0) m.mean = p.beta / (1.0 - p.xi);
  if (p.xi < 0.5) {
    const double one_minus = 1.0 - p.xi;
    m.variance = p.beta * p.beta / (one_minus * one_minus * (1.0 - 2.0 * p.xi));
  }
  return m;
}

std::vector<double> gpd_sample(const GpdParams& p, std::size_t n,
                               std::uint64_t seed) {
  validate(p);
  SplitMix64 rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(gpd_quantile(p, rng.uniform()));
  return out;
}

double gev_cdf(const GevParams& g, double x) {
  if (zero_shape(g.gamma)) return std::exp(-std::exp(-x));
  const double t = g.gamma * x;
  if (t <= -1.0) return g.gamma > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log1p(t) / g.gamma));
}

double gev_quantile(const GevParams& g, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(Errc::domain,
                "gev_quantile: probability must lie in (0, 1), got " +
                    std::to_string(q));
  }
  const double log_log = std::log(-std::log(q));
  if (zero_shape(g.gamma)) return -log_log;
  return std::expm1(-g.gamma * log_log) / g.gamma;
}

std::vector<double> gev_sample(const GevParams& g, std::size_t n,
                               std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(gev_quantile(g, rng.uniform()));
  return out;
}

}  // namespace evt
