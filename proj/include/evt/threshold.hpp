#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evt/excess.hpp"
#include "evt/lmoments.hpp"

namespace evt {

inline constexpr std::size_t kDefaultMinExceed = 30;

/// Mean of the excesses over u; Errc::no_exceedance when nothing exceeds u.
double empirical_mean_excess(std::span<const double> data, double u);

struct MrlPoint {
  double u;
  double mean_excess;
  std::size_t n_u;
  double se;  // standard error of the mean excess (0 with one exceedance)
};

// Fits to excesses over u, reported with the threshold-free scale
// sigma_star = beta - xi u.
struct StabilityPoint {
  double u;
  double sigma_star;
  double xi_hat;
  double se_sigma_star;
  double se_xi;
  std::size_t n_u;
};

struct StabilityCurve {
  std::vector<StabilityPoint> points;
  std::size_t skipped = 0;  // qualifying thresholds whose fit failed
};

struct LmomPoint {
  double u;
  double tau3;
  double tau4;
  double tau4_gpd;
  std::size_t n_u;
};

struct CountCheck {
  double mean_count = 0.0;
  double var_count = 0.0;
  double dispersion_ratio = 0.0;  // var / mean, 0 when the mean is 0
};

// Grid points with fewer than min_exceed exceedances are left out of every
// curve; output follows grid order.
std::vector<MrlPoint> mrl_curve(std::span<const double> data,
                                std::span<const double> u_grid,
                                std::size_t min_exceed = kDefaultMinExceed);
StabilityCurve stability_curve(std::span<const double> data,
                               std::span<const double> u_grid,
                               std::size_t min_exceed = kDefaultMinExceed);
std::vector<LmomPoint> lmoment_curve(std::span<const double> data,
                                     std::span<const double> u_grid,
                                     std::size_t min_exceed = kDefaultMinExceed);

/// Mean and sample variance of the per-batch exceedance counts over u.
CountCheck exceedance_count_check(std::span<const std::vector<double>> batches,
                                  double u);

/// Linear-interpolation sample percentile (p in [0, 1]).
double percentile(std::span<const double> data, double p);

/// `steps` evenly spaced thresholds between the 50th and 99.5th percentiles.
std::vector<double> default_u_grid(std::span<const double> data,
                                   std::size_t steps = 40);

struct SuggestOptions {
  std::size_t min_exceed = kDefaultMinExceed;
  /// Number of grid points, starting at the candidate, in the straight-line
  /// fit to the mean excess curve; 0 takes every higher point.
  std::size_t linearity_window = 0;
  /// Bound on the weighted squared residual per degree of freedom. Points on
  /// one curve share most of their data, so under a GPD tail this statistic
  /// sits well below 1.
  double linearity_bound = 1.0;
  /// Number of later grid points the shape estimate is compared against;
  /// 0 takes every higher point.
  std::size_t stability_window = 0;
  /// Bound on |xi_j - xi_i| / sqrt((1 + xi_i)^2 (1/n_j - 1/n_i)).
  double stability_bound = 3.0;
};

struct ThresholdScore {
  double u;
  std::size_t n_u;
  double linearity;  // NaN when not computable
  double stability;  // largest z over the window, NaN when not computable
  bool linear;
  bool stable;
};

struct ThresholdSuggestion {
  double u_star;
  bool found;
  std::vector<ThresholdScore> scores;
};

/// Smallest grid threshold passing both the mean-excess linearity test and
/// the shape-stability test. Falls back to the grid maximum with found=false.
ThresholdSuggestion suggest_threshold(std::span<const double> data,
                                      std::span<const double> u_grid,
                                      const SuggestOptions& opts = {});

}  // namespace evt
