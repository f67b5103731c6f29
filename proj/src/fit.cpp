#include "evt/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "evt/lmoments.hpp"
#include "evt/numfmt.hpp"
#include "evt/simplex.hpp"

namespace evt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kGradTol = 1e-6;
constexpr std::size_t kMinMle = 10;

// Negative log-likelihood over theta = (xi, log beta). xi <= -1 is excluded
// because the likelihood is unbounded there.
double nll(const optim::Point2& th, std::span<const double> x) {
  const double xi = th[0];
  if (!std::isfinite(xi) || !std::isfinite(th[1]) || xi <= -1) return kInf;
  const double ll = gpd_loglik({xi, std::exp(th[1])}, x);
  return std::isfinite(ll) ? -ll : kInf;
}

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

optim::Point2 gradient(const optim::Point2& th, std::span<const double> x) {
  optim::Point2 g{};
  for (int i = 0; i < 2; ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(th[i]));
    optim::Point2 lo = th, hi = th;
    lo[i] -= h;
    hi[i] += h;
    g[i] = (nll(hi, x) - nll(lo, x)) / (2 * h);
  }
  return g;
}

// Central-difference Hessian with relative steps of 1e-4 per coordinate.
std::optional<std::array<double, 3>> hessian(const optim::Point2& th,
                                             std::span<const double> x) {
  const double h0 = 1e-4 * std::max(1.0, std::abs(th[0]));
  const double h1 = 1e-4 * std::max(1.0, std::abs(th[1]));
  auto f = [&](double d0, double d1) { return nll({th[0] + d0, th[1] + d1}, x); };
  const double f00 = f(0, 0);
  const double a = (f(h0, 0) - 2 * f00 + f(-h0, 0)) / (h0 * h0);
  const double c = (f(0, h1) - 2 * f00 + f(0, -h1)) / (h1 * h1);
  const double b = (f(h0, h1) - f(h0, -h1) - f(-h0, h1) + f(-h0, -h1)) / (4 * h0 * h1);
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) return std::nullopt;
  return std::array<double, 3>{a, b, c};
}

struct Attempt {
  optim::SimplexResult res;
  double grad_norm;
};

Attempt minimize(std::span<const double> x, optim::Point2 start) {
  optim::SimplexOptions opts;
  opts.step = {0.1, 0.1};
  Attempt a{optim::nelder_mead([&](const optim::Point2& th) { return nll(th, x); },
                               start, opts),
            kInf};
  if (std::isfinite(a.res.f)) {
    const auto g = gradient(a.res.x, x);
    const double n = static_cast<double>(x.size());
    a.grad_norm = std::max(std::abs(g[0]), std::abs(g[1])) / n;
    if (!std::isfinite(a.grad_norm)) a.grad_norm = kInf;
  }
  return a;
}

bool all_equal(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

void check_excesses(std::span<const double> x) {
  for (double v : x) {
    if (!(v > 0) || !std::isfinite(v)) throw Error(Errc::invalid_input, "excesses must be finite and positive");
  }
}

}  // namespace

std::string_view to_string(FitMethod m) noexcept {
  return m == FitMethod::MLE ? "MLE" : "PWM";
}

double gpd_loglik(const GpdParams& p, std::span<const double> excesses) {
  if (excesses.empty()) throw Error(Errc::insufficient_data, "log-likelihood of an empty sample");
  validate(p);
  const double n = static_cast<double>(excesses.size());
  double acc = 0.0;
  if (std::abs(p.xi) < kShapeZero) {
    for (double x : excesses) {
      if (x < 0) return -kInf;
      acc += x;
    }
    return -n * std::log(p.beta) - acc / p.beta;
  }
  for (double x : excesses) {
    if (x < 0) return -kInf;
    const double z = p.xi * x / p.beta;
    if (!(z > -1)) return -kInf;
    acc += std::log1p(z);
  }
  return -n * std::log(p.beta) - (1 + 1 / p.xi) * acc;
}

GpdFit fit_gpd_pwm(std::span<const double> excesses) {
  if (excesses.size() < 4) throw Error(Errc::insufficient_data, "PWM fit needs at least 4 excesses");
  check_excesses(excesses);
  const LMoments lm = sample_lmoments(excesses);
  if (!(lm.l2 > 0)) throw Error(Errc::degenerate_sample, "PWM fit: zero sample L-scale");
  const double xi = 2 - lm.l1 / lm.l2;
  const double beta = lm.l1 * (1 - xi);
  if (!(beta > 0) || !std::isfinite(beta)) {
    throw Error(Errc::degenerate_sample, "PWM fit: implied shape is not below 1");
  }

  GpdFit fit;
  fit.params = {xi, beta};
  fit.n_total = fit.n_exceed = excesses.size();
  fit.loglik = gpd_loglik(fit.params, excesses);
  fit.se_xi = fit.se_beta = kNaN;
  fit.converged = false;
  fit.reliable = smith_reliable(xi);
  fit.method = FitMethod::PWM;
  fit.grad_norm = kNaN;
  return fit;
}

GpdFit fit_gpd_mle(std::span<const double> excesses, std::optional<GpdParams> init) {
  if (excesses.size() < kMinMle) throw Error(Errc::insufficient_data, "MLE fit needs at least 10 excesses");
  check_excesses(excesses);
  if (all_equal(excesses)) throw Error(Errc::degenerate_sample, "MLE fit: all excesses are equal");

  if (!init) {
    try {
      init = fit_gpd_pwm(excesses).params;
    } catch (const Error&) {
    }
  }
  const double mean = mean_of(excesses);
  const optim::Point2 fallback{0.1, std::log(mean)};
  optim::Point2 start = fallback;
  if (init && init->beta > 0 && std::isfinite(init->beta) && init->xi > -1 && std::isfinite(init->xi)) {
    start = {init->xi, std::log(init->beta)};
    if (!std::isfinite(nll(start, excesses))) {
      // Pull the shape up until every excess is inside the support.
      const double xmax = *std::max_element(excesses.begin(), excesses.end());
      start[0] = std::max(start[0], -0.5 * init->beta / xmax);
    }
  }

  Attempt best = minimize(excesses, start);
  if (best.grad_norm >= kGradTol) {
    Attempt again = minimize(excesses, fallback);
    if (again.grad_norm < kGradTol || again.res.f < best.res.f) best = again;
  }
  if (best.grad_norm >= kGradTol) {
    // One polishing pass from the best point found so far.
    Attempt polish = minimize(excesses, best.res.x);
    if (polish.res.f <= best.res.f) best = polish;
  }

  const GpdParams params{best.res.x[0], std::exp(best.res.x[1])};
  if (best.grad_norm >= kGradTol) {
    throw NonConvergenceError("MLE fit did not reach a stationary point", params, -best.res.f);
  }

  GpdFit fit;
  fit.params = params;
  fit.n_total = fit.n_exceed = excesses.size();
  fit.loglik = gpd_loglik(params, excesses);
  fit.converged = true;
  fit.reliable = smith_reliable(params.xi);
  fit.method = FitMethod::MLE;
  fit.grad_norm = best.grad_norm;
  fit.evaluations = best.res.evals;
  fit.restarts = best.res.restarts;
  fit.se_xi = fit.se_beta = kNaN;

  if (const auto h = hessian(best.res.x, excesses)) {
    const auto [a, b, c] = *h;
    const double det = a * c - b * b;
    if (a > 0 && c > 0 && det > 0) {
      // Inverse in (xi, log beta), then the Jacobian diag(1, beta).
      const double vxx = c / det, vxl = -b / det, vll = a / det;
      const double beta = params.beta;
      fit.cov = Cov2{vxx, beta * vxl, beta * beta * vll};
      fit.se_xi = std::sqrt(fit.cov->xi_xi);
      fit.se_beta = std::sqrt(fit.cov->beta_beta);
    }
  }
  return fit;
}

GpdFit fit_gpd_mle(const ExcessSample& sample, std::optional<GpdParams> init) {
  GpdFit fit = fit_gpd_mle(sample.excesses, init);
  fit.threshold = sample.threshold;
  fit.n_total = sample.n_total;
  fit.n_exceed = sample.n_exceed;
  return fit;
}

double hill_estimator(std::span<const double> data, std::size_t k) {
  const std::size_t n = data.size();
  if (k < 2 || k >= n) throw Error(Errc::out_of_range, "Hill estimator needs 2 <= k < n");
  for (double v : data) {
    if (!(v > 0) || !std::isfinite(v)) throw Error(Errc::domain, "Hill estimator needs positive data");
  }
  std::vector<double> x(data.begin(), data.end());
  std::sort(x.begin(), x.end());
  const double ref = x[n - k - 1];
  double acc = 0.0;
  for (std::size_t i = n - k; i < n; ++i) acc += std::log(x[i] / ref);
  return acc / static_cast<double>(k);
}

std::vector<ModelScore> rank_scores(std::vector<ModelScore> scores) {
  if (scores.empty()) return scores;
  double top = -kInf;
  for (auto& s : scores) {
    s.aic = 2.0 * s.k - 2.0 * s.loglik;
    top = std::max(top, s.loglik);
  }
  for (auto& s : scores) s.deviance = 2.0 * (top - s.loglik);
  std::stable_sort(scores.begin(), scores.end(), [](const ModelScore& a, const ModelScore& b) {
    if (a.aic != b.aic) return a.aic < b.aic;
    if (a.k != b.k) return a.k < b.k;
    return a.label < b.label;
  });
  return scores;
}

std::vector<ModelScore> score_models(std::span<const GpdFit> fits,
                                     std::span<const std::string> labels) {
  if (fits.size() != labels.size()) throw Error(Errc::invalid_input, "one label per fit is required");
  std::vector<ModelScore> out;
  out.reserve(fits.size());
  for (std::size_t i = 0; i < fits.size(); ++i) {
    if (!fits[i].converged) throw Error(Errc::invalid_input, "fit '" + labels[i] + "' did not converge");
    out.push_back({labels[i], 0.0, 0.0, 2, fits[i].loglik});
  }
  return rank_scores(std::move(out));
}

std::string threshold_label(double u) {
  return "u=" + format_number(u);
}

ThresholdSelection score_thresholds(std::span<const double> data,
                                    std::span<const double> candidates,
                                    double bin_width) {
  if (candidates.empty()) throw Error(Errc::invalid_input, "no candidate thresholds");
  std::vector<double> us(candidates.begin(), candidates.end());
  std::sort(us.begin(), us.end());
  if (std::adjacent_find(us.begin(), us.end()) != us.end()) {
    throw Error(Errc::invalid_input, "duplicate candidate thresholds");
  }
  const double lower = us.front();
  if (bin_width <= 0) {
    double gap = kInf;
    for (std::size_t i = 1; i < us.size(); ++i) gap = std::min(gap, us[i] - us[i - 1]);
    bin_width = std::isfinite(gap) ? gap / 5 : 1.0;
  }

  std::vector<double> region;
  for (double x : data) {
    if (x > lower) region.push_back(x);
  }
  const double n_region = static_cast<double>(region.size());

  ThresholdSelection sel;
  sel.region_lower = lower;
  sel.bin_width = bin_width;
  std::vector<ModelScore> scores;

  for (double u : candidates) {
    const double steps = (u - lower) / bin_width;
    const double whole = std::round(steps);
    if (std::abs(steps - whole) > 1e-6) {
      throw Error(Errc::invalid_input, "candidate " + threshold_label(u) + " is not on the bin lattice");
    }
    const auto bins = static_cast<std::size_t>(whole);

    SplicedFit sf;
    sf.threshold = u;
    sf.bins = bins;
    sf.n_region = region.size();

    std::vector<std::size_t> counts(bins, 0);
    std::vector<double> tail;
    for (double x : region) {
      if (x > u) {
        tail.push_back(x - u);
      } else {
        // Bins are (lower + j h, lower + (j+1) h].
        auto j = static_cast<std::size_t>(std::ceil((x - lower) / bin_width)) - 1;
        counts[std::min(j, bins - 1)]++;
      }
    }
    double body = 0.0;
    for (std::size_t c : counts) {
      if (c > 0) {
        const double cd = static_cast<double>(c);
        body += cd * std::log(cd / (n_region * bin_width));
      }
    }
    if (tail.size() < kMinMle) {
      throw Error(Errc::insufficient_data, "too few exceedances above " + threshold_label(u));
    }
    ExcessSample es{u, tail, data.size(), tail.size()};
    sf.tail = fit_gpd_mle(es);
    const double nt = static_cast<double>(tail.size());
    sf.loglik = body + nt * std::log(nt / n_region) + sf.tail.loglik;
    scores.push_back({threshold_label(u), 0.0, 0.0, static_cast<int>(bins) + 2, sf.loglik});
    sel.fits.push_back(std::move(sf));
  }
  sel.ranking = rank_scores(std::move(scores));
  return sel;
}

}  // namespace evt
