#pragma once

#include <cstdint>
#include <vector>

namespace evt {

// Generalized Pareto law of threshold excesses. Support is [0, inf) for
// xi >= 0 and [0, -beta/xi] for xi < 0.
struct GpdParams {
  double xi = 0.0;
  double beta = 1.0;
};

// Standardized generalized extreme value law H_gamma(x) = exp(-(1+gamma x)^(-1/gamma)).
struct GevParams {
  double gamma = 0.0;
};

struct Moments {
  double mean;      // +inf when not finite
  double variance;  // +inf when not finite
};

// Below this magnitude the shape is treated as exactly zero.
inline constexpr double kShapeZero = 1e-12;

/// Throws Errc::invalid_parameter unless beta is finite and positive.
void validate(const GpdParams& p);

// Values outside the support clamp: the cdf to 0 or 1 and the pdf to 0.
double gpd_cdf(const GpdParams& p, double x);
double gpd_sf(const GpdParams& p, double x);
double gpd_pdf(const GpdParams& p, double x);
/// Inverse cdf for q in [0, 1); Errc::domain otherwise.
double gpd_quantile(const GpdParams& p, double q);
/// F^{-1}(1 - u) evaluated without forming 1 - u, for u in (0, 1].
double gpd_tail_quantile(const GpdParams& p, double u);
/// +inf for xi >= 0, otherwise -beta/xi.
double gpd_upper_endpoint(const GpdParams& p);
Moments gpd_moments(const GpdParams& p);
std::vector<double> gpd_sample(const GpdParams& p, std::size_t n,
                               std::uint64_t seed);

double gev_cdf(const GevParams& g, double x);
/// Inverse cdf for q in (0, 1); Errc::domain otherwise.
double gev_quantile(const GevParams& g, double q);
std::vector<double> gev_sample(const GevParams& g, std::size_t n,
                               std::uint64_t seed);

}  // namespace evt
