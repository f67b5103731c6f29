#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evt/dist.hpp"

namespace evt {

struct GpdFit;

// A GPD fitted to the excesses over u, anchored by the empirical exceedance
// fraction n_u / n.
struct TailModel {
  double u = 0.0;
  double xi = 0.0;
  double beta = 1.0;
  std::size_t n = 1;
  std::size_t n_u = 1;

  static TailModel from_fit(const GpdFit& fit);
  GpdParams params() const { return {xi, beta}; }
  double exceed_fraction() const;
};

struct RiskEstimates {
  double q;
  double var_q;
  double es_q;  // +inf when xi >= 1
};

/// Throws Errc::invalid_parameter unless 0 < n_u <= n and beta > 0.
void validate(const TailModel& m);

/// P(X > y) for y >= u; Errc::below_threshold for y < u.
double tail_prob(const TailModel& m, double y);

/// q-quantile for 1 - n_u/n < q <= 1. q == 1 gives the upper endpoint,
/// which is +inf unless xi < 0. Errc::below_threshold for q at or below the
/// anchor and Errc::domain for q outside [0, 1].
double var_q(const TailModel& m, double q);

/// Expected loss beyond var_q; +inf when xi >= 1.
double es_q(const TailModel& m, double q);

std::vector<RiskEstimates> risk_table(const TailModel& m, std::span<const double> qs);

/// Level exceeded on average once every `period_count` periods of `r`
/// observations. Errc::below_threshold if that level lies below u.
double return_level(const TailModel& m, double r, double period_count);

}  // namespace evt
