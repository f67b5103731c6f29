#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evt/fit.hpp"
#include "evt/tail_risk.hpp"

namespace evt {

enum class PlotKind { QQExp, PP, QQGpd, ReturnLevel, Density, Histogram };

std::string_view to_string(PlotKind k) noexcept;

struct XY {
  double x;
  double y;
};

struct Band {
  double x;
  double lo;
  double hi;
};

struct PlotSeries {
  PlotKind kind;
  std::vector<XY> points;                // ordered by x
  std::optional<std::vector<Band>> bands;
  std::map<std::string, double> meta;    // line fits and summaries
};

/// i / (n + 1), the plotting position shared by every probability plot.
double plotting_position(std::size_t i, std::size_t n);

/// Order statistics against standard exponential quantiles. Meta holds the
/// least-squares line (slope, intercept) and the quadratic coefficient of a
/// degree-2 fit (concavity: positive bends up, i.e. heavier than exponential).
PlotSeries qq_exponential(std::span<const double> data);

/// Plotting positions against the fitted cdf at the sorted excesses.
PlotSeries pp_plot(const GpdFit& fit, std::span<const double> excesses);

/// Fitted quantiles against the sorted excesses; meta holds the LS slope.
PlotSeries qq_gpd(const GpdFit& fit, std::span<const double> excesses);

/// Return levels over the period grid (x = period count) with delta-method
/// 95% bands from the (xi, beta) covariance. Infeasible periods are skipped.
PlotSeries return_level_series(const TailModel& model, const Cov2& cov,
                               std::span<const double> periods,
                               double obs_per_period = 1.0);

/// `count` log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

struct DensitySeries {
  PlotSeries histogram;  // bin centre, density
  PlotSeries fitted;     // fitted pdf on a 200-point grid
};

/// Density-normalized equal-width histogram over [min, max] of the excesses.
DensitySeries density_series(const GpdFit& fit, std::span<const double> excesses,
                             std::size_t bins);

}  // namespace evt
