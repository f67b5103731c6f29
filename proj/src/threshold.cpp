#include "evt/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <thread>
#include <limits>
#include <numeric>

#include "evt/error.hpp"
#include "evt/fit.hpp"

namespace evt {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_sorted(std::span<const double> grid) {
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw Error(Errc::invalid_input, "threshold grid must be sorted ascending");
  }
}

std::size_t count_above(std::span<const double> data, double u) {
  return static_cast<std::size_t>(
      std::count_if(data.begin(), data.end(), [u](double x) { return x > u; }));
}

}  // namespace

ExcessSample exceedances(std::span<const double> data, double u) {
  if (data.empty()) throw Error(Errc::invalid_input, "exceedances of an empty sample");
  ExcessSample s;
  s.threshold = u;
  s.n_total = data.size();
  for (double x : data) {
    if (x > u) s.excesses.push_back(x - u);
  }
  s.n_exceed = s.excesses.size();
  return s;
}

double empirical_mean_excess(std::span<const double> data, double u) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : data) {
    if (x > u) {
      sum += x - u;
      ++n;
    }
  }
  if (n == 0) throw Error(Errc::no_exceedance, "no observation exceeds the threshold");
  return sum / static_cast<double>(n);
}

std::vector<MrlPoint> mrl_curve(std::span<const double> data,
                                std::span<const double> u_grid,
                                std::size_t min_exceed) {
  require_sorted(u_grid);
  std::vector<MrlPoint> out;
  for (double u : u_grid) {
    const ExcessSample s = exceedances(data, u);
    if (s.n_exceed == 0 || s.n_exceed < min_exceed) continue;
    const double n = static_cast<double>(s.n_exceed);
    const double mean = std::accumulate(s.excesses.begin(), s.excesses.end(), 0.0) / n;
    double ss = 0.0;
    for (double e : s.excesses) ss += (e - mean) * (e - mean);
    const double se = s.n_exceed > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    out.push_back({u, mean, s.n_exceed, se});
  }
  return out;
}

StabilityCurve stability_curve(std::span<const double> data,
                               std::span<const double> u_grid,
                               std::size_t min_exceed) {
  require_sorted(u_grid);
  // Fits are independent, so they run concurrently; results are collected in
  // grid order.
  std::vector<std::future<std::optional<StabilityPoint>>> jobs;
  const auto fit_at = [data](double u) -> std::optional<StabilityPoint> {
    const ExcessSample s = exceedances(data, u);
    try {
      const GpdFit f = fit_gpd_mle(s);
      if (!f.converged || !f.cov) return std::nullopt;
      const Cov2& c = *f.cov;
      const double var = c.beta_beta + u * u * c.xi_xi - 2 * u * c.xi_beta;
      return StabilityPoint{u, f.params.beta - f.params.xi * u, f.params.xi,
                            std::sqrt(std::max(var, 0.0)), f.se_xi, s.n_exceed};
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  StabilityCurve curve;
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  std::vector<double> todo;
  for (double u : u_grid) {
    const std::size_t n_u = count_above(data, u);
    if (n_u > 0 && n_u >= min_exceed) todo.push_back(u);
  }
  for (std::size_t start = 0; start < todo.size(); start += width) {
    const std::size_t stop = std::min(todo.size(), start + width);
    for (std::size_t i = start; i < stop; ++i) {
      jobs.push_back(std::async(std::launch::async, fit_at, todo[i]));
    }
    for (std::size_t i = start; i < stop; ++i) {
      if (auto p = jobs[i].get()) {
        curve.points.push_back(*p);
      } else {
        ++curve.skipped;
      }
    }
  }
  return curve;
}

std::vector<LmomPoint> lmoment_curve(std::span<const double> data,
                                     std::span<const double> u_grid,
                                     std::size_t min_exceed) {
  require_sorted(u_grid);
  std::vector<LmomPoint> out;
  for (double u : u_grid) {
    const ExcessSample s = exceedances(data, u);
    if (s.n_exceed < std::max<std::size_t>(min_exceed, 4)) continue;
    const LMoments lm = sample_lmoments(s.excesses);
    out.push_back({u, lm.tau3, lm.tau4, gpd_tau4_of_tau3(lm.tau3), s.n_exceed});
  }
  return out;
}

CountCheck exceedance_count_check(std::span<const std::vector<double>> batches,
                                  double u) {
  if (batches.size() < 2) throw Error(Errc::invalid_input, "at least two batches are required");
  std::vector<double> counts;
  counts.reserve(batches.size());
  for (const auto& b : batches) counts.push_back(static_cast<double>(count_above(b, u)));
  const double m = static_cast<double>(counts.size());
  CountCheck r;
  r.mean_count = std::accumulate(counts.begin(), counts.end(), 0.0) / m;
  double ss = 0.0;
  for (double c : counts) ss += (c - r.mean_count) * (c - r.mean_count);
  r.var_count = ss / (m - 1);
  r.dispersion_ratio = r.mean_count > 0 ? r.var_count / r.mean_count : 0.0;
  return r;
}

double percentile(std::span<const double> data, double p) {
  if (data.empty()) throw Error(Errc::insufficient_data, "percentile of an empty sample");
  if (!(p >= 0 && p <= 1)) throw Error(Errc::domain, "percentile level must lie in [0, 1]");
  std::vector<double> x(data.begin(), data.end());
  std::sort(x.begin(), x.end());
  const double h = p * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

std::vector<double> default_u_grid(std::span<const double> data, std::size_t steps) {
  if (steps < 2) throw Error(Errc::invalid_input, "a threshold grid needs at least two points");
  const double lo = percentile(data, 0.5);
  const double hi = percentile(data, 0.995);
  std::vector<double> grid(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  return grid;
}

ThresholdSuggestion suggest_threshold(std::span<const double> data,
                                      std::span<const double> u_grid,
                                      const SuggestOptions& opts) {
  require_sorted(u_grid);
  if (u_grid.empty()) throw Error(Errc::invalid_input, "empty threshold grid");
  const auto mrl = mrl_curve(data, u_grid, opts.min_exceed);
  const auto stab = stability_curve(data, u_grid, opts.min_exceed).points;

  auto mrl_at = [&](double u) -> const MrlPoint* {
    for (const auto& p : mrl) if (p.u == u) return &p;
    return nullptr;
  };
  auto stab_index = [&](double u) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < stab.size(); ++i) if (stab[i].u == u) return static_cast<std::ptrdiff_t>(i);
    return -1;
  };

  ThresholdSuggestion out{u_grid.back(), false, {}};
  for (std::size_t gi = 0; gi < u_grid.size(); ++gi) {
    const double u = u_grid[gi];
    ThresholdScore sc{u, count_above(data, u), kNaN, kNaN, false, false};

    // Weighted straight-line fit to the mean excess curve from u upwards.
    std::vector<const MrlPoint*> win;
    for (const auto& p : mrl) {
      if (p.u >= u && (opts.linearity_window == 0 || win.size() < opts.linearity_window)) {
        win.push_back(&p);
      }
    }
    if (mrl_at(u) && win.size() >= 3) {
      double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
      std::vector<double> w;
      for (const auto* p : win) {
        const double wi = 1.0 / std::max(p->se * p->se, 1e-300);
        w.push_back(wi);
        sw += wi;
        sx += wi * p->u;
        sy += wi * p->mean_excess;
        sxx += wi * p->u * p->u;
        sxy += wi * p->u * p->mean_excess;
      }
      const double den = sw * sxx - sx * sx;
      if (den > 0) {
        const double slope = (sw * sxy - sx * sy) / den;
        const double icpt = (sy - slope * sx) / sw;
        double chi = 0;
        for (std::size_t k = 0; k < win.size(); ++k) {
          const double r = win[k]->mean_excess - (icpt + slope * win[k]->u);
          chi += w[k] * r * r;
        }
        sc.linearity = chi / static_cast<double>(win.size() - 2);
        sc.linear = sc.linearity <= opts.linearity_bound;
      }
    }

    // Estimates at higher thresholds use nested subsets of the excesses, so
    // the variance of the difference is approximately var_j - var_i, with the
    // asymptotic GPD variance (1 + xi)^2 / n_u.
    const auto si = stab_index(u);
    if (si >= 0 && static_cast<std::size_t>(si) + 1 < stab.size()) {
      const auto& a = stab[static_cast<std::size_t>(si)];
      const double k = (1 + a.xi_hat) * (1 + a.xi_hat);
      double worst = 0;
      std::size_t used = 0;
      for (std::size_t j = static_cast<std::size_t>(si) + 1;
           j < stab.size() && (opts.stability_window == 0 || used < opts.stability_window);
           ++j, ++used) {
        const auto& b = stab[j];
        const double dv = k * (1.0 / static_cast<double>(b.n_u) - 1.0 / static_cast<double>(a.n_u));
        if (!(dv > 0)) continue;
        worst = std::max(worst, std::abs(b.xi_hat - a.xi_hat) / std::sqrt(dv));
      }
      sc.stability = worst;
      sc.stable = worst <= opts.stability_bound;
    }

    if (!out.found && sc.linear && sc.stable) {
      out.found = true;
      out.u_star = u;
    }
    out.scores.push_back(sc);
  }
  return out;
}

}  // namespace evt
