#include "evt/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "evt/error.hpp"

namespace evt {
namespace {

std::vector<double> sorted(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  return v;
}

struct Line {
  double slope;
  double intercept;
};

Line least_squares(const std::vector<XY>& pts) {
  const double n = static_cast<double>(pts.size());
  double mx = 0, my = 0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (const auto& p : pts) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
  }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  return {slope, my - slope * mx};
}

// Leading coefficient of a least-squares parabola, fitted in centered and
// scaled coordinates and mapped back.
double quadratic_coefficient(const std::vector<XY>& pts) {
  const double n = static_cast<double>(pts.size());
  double mx = 0;
  for (const auto& p : pts) mx += p.x;
  mx /= n;
  double sc = 0;
  for (const auto& p : pts) sc = std::max(sc, std::abs(p.x - mx));
  if (sc == 0 || pts.size() < 3) return 0.0;

  double s[5] = {}, t[3] = {};
  for (const auto& p : pts) {
    const double z = (p.x - mx) / sc;
    double zk = 1;
    for (int k = 0; k < 5; ++k) {
      s[k] += zk;
      if (k < 3) t[k] += zk * p.y;
      zk *= z;
    }
  }
  // Solve [s0 s1 s2; s1 s2 s3; s2 s3 s4] c = t by Cramer's rule for c2.
  auto det3 = [](double a, double b, double c, double d, double e, double f,
                 double g, double h, double i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  };
  const double d = det3(s[0], s[1], s[2], s[1], s[2], s[3], s[2], s[3], s[4]);
  if (d == 0) return 0.0;
  const double d2 = det3(s[0], s[1], t[0], s[1], s[2], t[1], s[2], s[3], t[2]);
  return d2 / d / (sc * sc);
}

void require_converged(const GpdFit& fit) {
  if (!fit.converged) throw Error(Errc::invalid_input, "diagnostics need a converged fit");
}

}  // namespace

std::string_view to_string(PlotKind k) noexcept {
  switch (k) {
    case PlotKind::QQExp: return "qqexp";
    case PlotKind::PP: return "pp";
    case PlotKind::QQGpd: return "qqgpd";
    case PlotKind::ReturnLevel: return "return_level";
    case PlotKind::Density: return "density";
    case PlotKind::Histogram: return "histogram";
  }
  return "unknown";
}

double plotting_position(std::size_t i, std::size_t n) {
  return static_cast<double>(i) / static_cast<double>(n + 1);
}

PlotSeries qq_exponential(std::span<const double> data) {
  if (data.size() < 2) throw Error(Errc::insufficient_data, "QQ plot needs at least 2 points");
  const auto x = sorted(data);
  const std::size_t n = x.size();
  PlotSeries s{PlotKind::QQExp, {}, std::nullopt, {}};
  s.points.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    s.points.push_back({-std::log1p(-plotting_position(i, n)), x[i - 1]});
  }
  const Line l = least_squares(s.points);
  s.meta["slope"] = l.slope;
  s.meta["intercept"] = l.intercept;
  s.meta["concavity"] = quadratic_coefficient(s.points);
  return s;
}

PlotSeries pp_plot(const GpdFit& fit, std::span<const double> excesses) {
  require_converged(fit);
  const auto x = sorted(excesses);
  const std::size_t n = x.size();
  PlotSeries s{PlotKind::PP, {}, std::nullopt, {}};
  double worst = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    const XY p{plotting_position(i, n), gpd_cdf(fit.params, x[i - 1])};
    worst = std::max(worst, std::abs(p.y - p.x));
    s.points.push_back(p);
  }
  s.meta["max_abs_dev"] = worst;
  return s;
}

PlotSeries qq_gpd(const GpdFit& fit, std::span<const double> excesses) {
  require_converged(fit);
  const auto x = sorted(excesses);
  const std::size_t n = x.size();
  PlotSeries s{PlotKind::QQGpd, {}, std::nullopt, {}};
  for (std::size_t i = 1; i <= n; ++i) {
    s.points.push_back({gpd_quantile(fit.params, plotting_position(i, n)), x[i - 1]});
  }
  if (n >= 2) {
    const Line l = least_squares(s.points);
    s.meta["slope"] = l.slope;
    s.meta["intercept"] = l.intercept;
  }
  return s;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0) || !(hi >= lo) || count == 0) throw Error(Errc::invalid_input, "log grid needs 0 < lo <= hi");
  std::vector<double> out(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? lo : std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return out;
}

PlotSeries return_level_series(const TailModel& model, const Cov2& cov,
                               std::span<const double> periods,
                               double obs_per_period) {
  validate(model);
  PlotSeries s{PlotKind::ReturnLevel, {}, std::vector<Band>{}, {}};
  std::vector<double> grid(periods.begin(), periods.end());
  std::sort(grid.begin(), grid.end());
  constexpr double z = 1.959963984540054;
  for (double t : grid) {
    double level;
    try {
      level = return_level(model, obs_per_period, t);
    } catch (const Error&) {
      continue;
    }
    // Central differences in xi and beta.
    auto at = [&](double dxi, double dbeta) {
      TailModel m = model;
      m.xi += dxi;
      m.beta += dbeta;
      return return_level(m, obs_per_period, t);
    };
    const double hx = 1e-6 * std::max(1.0, std::abs(model.xi));
    const double hb = 1e-6 * model.beta;
    const double gx = (at(hx, 0) - at(-hx, 0)) / (2 * hx);
    const double gb = (at(0, hb) - at(0, -hb)) / (2 * hb);
    const double var = gx * gx * cov.xi_xi + 2 * gx * gb * cov.xi_beta + gb * gb * cov.beta_beta;
    const double half = z * std::sqrt(std::max(var, 0.0));
    s.points.push_back({t, level});
    s.bands->push_back({t, level - half, level + half});
  }
  s.meta["obs_per_period"] = obs_per_period;
  return s;
}

DensitySeries density_series(const GpdFit& fit, std::span<const double> excesses,
                             std::size_t bins) {
  if (bins == 0) throw Error(Errc::invalid_input, "histogram needs at least one bin");
  if (excesses.empty()) throw Error(Errc::insufficient_data, "histogram of an empty sample");
  const auto [lo_it, hi_it] = std::minmax_element(excesses.begin(), excesses.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  const double width = range > 0 ? range / static_cast<double>(bins) : 1.0;
  std::vector<std::size_t> counts(bins, 0);
  for (double x : excesses) {
    auto j = static_cast<std::size_t>((x - lo) / width);
    counts[std::min(j, bins - 1)]++;
  }
  const double n = static_cast<double>(excesses.size());
  DensitySeries d{{PlotKind::Histogram, {}, std::nullopt, {}},
                  {PlotKind::Density, {}, std::nullopt, {}}};
  for (std::size_t j = 0; j < bins; ++j) {
    d.histogram.points.push_back({lo + (static_cast<double>(j) + 0.5) * width,
                                  static_cast<double>(counts[j]) / (n * width)});
  }
  d.histogram.meta["bin_width"] = width;
  constexpr std::size_t kGrid = 200;
  const double top = range > 0 ? *hi_it : lo + width;
  for (std::size_t i = 0; i < kGrid; ++i) {
    const double x = lo + (top - lo) * static_cast<double>(i) / (kGrid - 1);
    d.fitted.points.push_back({x, gpd_pdf(fit.params, x)});
  }
  return d;
}

}  // namespace evt
