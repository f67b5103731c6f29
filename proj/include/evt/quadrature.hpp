#pragma once

#include <functional>

namespace evt::quad {

struct Result {
  double value;
  double error;  // estimated absolute error
};

using Integrand = std::function<double(double)>;

// Adaptive 15-point Gauss-Kronrod with interval bisection. Stops when the
// summed error estimate drops below max(abs_tol, rel_tol * |value|) or the
// interval budget is exhausted.
Result integrate(const Integrand& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 0.0, int max_intervals = 2000);

// Integral of f over [a, inf) for a nonnegative, eventually decreasing f.
// The half-line is cut into blocks of doubling width starting at `scale`;
// once the block contributions decay geometrically the remainder is summed in
// closed form. Throws Errc::diverged_integral when they stop decaying.
Result integrate_tail(const Integrand& f, double a, double scale,
                      double rel_tol = 1e-10);

}  // namespace evt::quad
