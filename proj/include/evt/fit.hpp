#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evt/dist.hpp"
#include "evt/error.hpp"
#include "evt/excess.hpp"

namespace evt {

enum class FitMethod { MLE, PWM };

std::string_view to_string(FitMethod m) noexcept;

// Covariance of (xi, beta).
struct Cov2 {
  double xi_xi = 0.0;
  double xi_beta = 0.0;
  double beta_beta = 0.0;
};

struct GpdFit {
  GpdParams params;
  double threshold = 0.0;
  std::size_t n_total = 0;
  std::size_t n_exceed = 0;
  double loglik = 0.0;
  std::optional<Cov2> cov;
  double se_xi = 0.0;    // NaN when no covariance is available
  double se_beta = 0.0;  // NaN when no covariance is available
  // True only for a likelihood optimum whose scaled gradient passed the
  // stationarity check; closed-form PWM fits never set it.
  bool converged = false;
  bool reliable = false;  // Smith's rule: xi > -0.5
  FitMethod method = FitMethod::MLE;
  double grad_norm = 0.0;  // max-norm of the gradient of -loglik / n
  int evaluations = 0;
  int restarts = 0;
};

struct ModelScore {
  std::string label;
  double aic = 0.0;
  double deviance = 0.0;
  int k = 2;
  double loglik = 0.0;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, GpdParams best, double loglik)
      : Error(Errc::non_convergence, what), best_(best), loglik_(loglik) {}

  const GpdParams& best() const noexcept { return best_; }
  double best_loglik() const noexcept { return loglik_; }

 private:
  GpdParams best_;
  double loglik_;
};

inline bool smith_reliable(double xi) { return xi > -0.5; }

/// Sum of log densities; -inf if any excess falls outside the support.
double gpd_loglik(const GpdParams& p, std::span<const double> excesses);

/// Probability-weighted-moments estimator: xi = 2 - l1/l2, beta = l1 (1 - xi).
GpdFit fit_gpd_pwm(std::span<const double> excesses);

/// Maximum likelihood over (xi, log beta) with a Nelder-Mead search started
/// at `init` (PWM when absent), restarting once from (0.1, mean excess).
GpdFit fit_gpd_mle(std::span<const double> excesses,
                   std::optional<GpdParams> init = std::nullopt);
/// As above, with the threshold and counts copied from the sample.
GpdFit fit_gpd_mle(const ExcessSample& sample,
                   std::optional<GpdParams> init = std::nullopt);

/// Mean of log spacings of the k largest observations over the (k+1)-th.
double hill_estimator(std::span<const double> data, std::size_t k);

/// AIC and deviance per fit, sorted by AIC (ties: smaller k, then label).
/// Scores are only comparable when every fit saw the same observations.
std::vector<ModelScore> score_models(std::span<const GpdFit> fits,
                                     std::span<const std::string> labels);

/// Sorts scores by AIC and fills in deviance = 2 (max loglik - loglik).
std::vector<ModelScore> rank_scores(std::vector<ModelScore> scores);

// Threshold candidates compared on one observation set: all data at or above
// the smallest candidate. A candidate u models the region below it with a
// histogram of fixed-width bins anchored at the smallest candidate and the
// region above it with a fitted GPD weighted by the exceedance fraction, so
// each score has k = 2 + (number of bins).
struct SplicedFit {
  double threshold = 0.0;
  GpdFit tail;
  std::size_t bins = 0;
  std::size_t n_region = 0;
  double loglik = 0.0;
};

struct ThresholdSelection {
  double region_lower = 0.0;
  double bin_width = 0.0;
  std::vector<SplicedFit> fits;      // candidate order
  std::vector<ModelScore> ranking;   // best first
};

/// bin_width <= 0 selects a fifth of the smallest candidate spacing. Every
/// candidate must sit a whole number of bins above the smallest one.
ThresholdSelection score_thresholds(std::span<const double> data,
                                    std::span<const double> candidates,
                                    double bin_width = 0.0);

std::string threshold_label(double u);

}  // namespace evt
