#pragma once

#include <span>

namespace evt {

struct LMoments {
  double l1 = 0.0;
  double l2 = 0.0;
  double tau3 = 0.0;  // l3 / l2, zero when l2 == 0
  double tau4 = 0.0;  // l4 / l2, zero when l2 == 0
};

/// Unbiased order-statistic estimator. Needs at least four points.
LMoments sample_lmoments(std::span<const double> data);

/// GPD L-kurtosis as a function of L-skewness: tau3 (1 + 5 tau3) / (5 + tau3).
double gpd_tau4_of_tau3(double tau3);

}  // namespace evt
