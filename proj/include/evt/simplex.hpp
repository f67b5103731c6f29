#pragma once

#include <array>
#include <functional>

namespace evt::optim {

using Point2 = std::array<double, 2>;
using Objective2 = std::function<double(const Point2&)>;

struct SimplexOptions {
  Point2 step = {0.1, 0.1};
  double ftol = 1e-15;  // relative spread of the simplex values
  double xtol = 1e-10;  // simplex diameter, relative to 1 + |x|
  int max_evals = 20000;
  int max_restarts = 8;
};

struct SimplexResult {
  Point2 x;
  double f;
  int evals;
  int restarts;
};

/// Nelder-Mead minimization in two dimensions. Infinite objective values are
/// allowed and simply rejected as moves. A pass ends when the simplex
/// diameter or value spread falls below tolerance, or progress stalls. After each collapse the simplex is
/// rebuilt around the best vertex until a rebuild no longer improves it.
SimplexResult nelder_mead(const Objective2& f, Point2 start,
                          const SimplexOptions& opts = {});

}  // namespace evt::optim
