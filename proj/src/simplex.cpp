#include "evt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evt::optim {
namespace {

constexpr int kStallLimit = 60;

struct Vertex {
  Point2 x;
  double f;
};

Point2 lerp(const Point2& a, const Point2& b, double t) {
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
}

}  // namespace

SimplexResult nelder_mead(const Objective2& f, Point2 start,
                          const SimplexOptions& opts) {
  int evals = 0;
  auto eval = [&](const Point2& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  Vertex best{start, eval(start)};
  int restarts = 0;
  for (; restarts <= opts.max_restarts; ++restarts) {
    std::array<Vertex, 3> s = {
        best,
        Vertex{{best.x[0] + opts.step[0], best.x[1]}, 0.0},
        Vertex{{best.x[0], best.x[1] + opts.step[1]}, 0.0}};
    s[1].f = eval(s[1].x);
    s[2].f = eval(s[2].x);

    double stall_best = s[0].f;
    int stall = 0;
    while (evals < opts.max_evals) {
      std::sort(s.begin(), s.end(),
                [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
      const double spread = std::abs(s[2].f - s[0].f);
      const double diameter =
          std::max({std::abs(s[1].x[0] - s[0].x[0]), std::abs(s[1].x[1] - s[0].x[1]),
                    std::abs(s[2].x[0] - s[0].x[0]), std::abs(s[2].x[1] - s[0].x[1])});
      const double scale = 1.0 + std::abs(s[0].x[0]) + std::abs(s[0].x[1]);
      if (diameter <= opts.xtol * scale) break;
      if (std::isfinite(s[2].f) && spread <= opts.ftol * (std::abs(s[0].f) + 1e-300)) break;
      // Near the optimum rounding noise can keep the simplex moving without
      // progress; stop once the best value has stalled for a while.
      if (s[0].f < stall_best) {
        stall_best = s[0].f;
        stall = 0;
      } else if (++stall > kStallLimit) {
        break;
      }

      const Point2 centroid = lerp(s[0].x, s[1].x, 0.5);
      const Point2 xr = lerp(centroid, s[2].x, -1.0);
      const double fr = eval(xr);
      if (fr < s[0].f) {
        const Point2 xe = lerp(centroid, s[2].x, -2.0);
        const double fe = eval(xe);
        s[2] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
        continue;
      }
      if (fr < s[1].f) {
        s[2] = {xr, fr};
        continue;
      }
      const bool outside = fr < s[2].f;
      const Point2 xc = outside ? lerp(centroid, xr, 0.5) : lerp(centroid, s[2].x, 0.5);
      const double fc = eval(xc);
      if (fc < std::min(fr, s[2].f)) {
        s[2] = {xc, fc};
        continue;
      }
      for (int i = 1; i < 3; ++i) {
        s[i].x = lerp(s[0].x, s[i].x, 0.5);
        s[i].f = eval(s[i].x);
      }
    }
    std::sort(s.begin(), s.end(),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    const bool improved = s[0].f < best.f - opts.ftol * (std::abs(best.f) + 1e-300);
    const bool first = restarts == 0;
    if (s[0].f <= best.f) best = s[0];
    if ((!first && !improved) || evals >= opts.max_evals) break;
  }
  return {best.x, best.f, evals, restarts};
}

}  // namespace evt::optim
