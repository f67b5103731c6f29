#include "evt/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "evt/error.hpp"

namespace evt::quad {
namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gauss_kronrod(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  const double value = kronrod * half;
  const double error = std::abs((kronrod - gauss) * half);
  return {a, b, value, error};
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, double rel_tol,
                 double abs_tol, int max_intervals) {
  if (a == b) return {0.0, 0.0};
  std::priority_queue<Piece> heap;
  Piece first = gauss_kronrod(f, a, b);
  double value = first.value;
  double error = first.error;
  heap.push(first);
  int intervals = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) &&
         intervals < max_intervals) {
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b) {
      heap.push(worst);
      break;
    }
    Piece left = gauss_kronrod(f, worst.a, mid);
    Piece right = gauss_kronrod(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Recompute the totals to shed accumulated cancellation.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error};
}

Result integrate_tail(const Integrand& f, double a, double scale,
                      double rel_tol) {
  constexpr int kMaxBlocks = 400;
  constexpr int kRatioWindow = 4;
  std::vector<double> blocks;
  double total = 0.0;
  double error = 0.0;
  double lo = a;
  double width = scale;
  for (int k = 0; k < kMaxBlocks; ++k) {
    const double hi = lo + width;
    if (!std::isfinite(hi)) break;
    const Result r = integrate(f, lo, hi, rel_tol * 0.1);
    blocks.push_back(r.value);
    total += r.value;
    error += r.error;
    if (k >= 3 && std::abs(r.value) <= rel_tol * 1e-2 * std::abs(total)) {
      return {total, error + std::abs(r.value)};
    }
    if (total == 0.0 && k >= 8) return {0.0, error};
    lo = hi;
    width *= 2.0;
  }
  // Blocks of doubling width shrink geometrically for regularly varying
  // integrands; extrapolate the remainder from the observed ratio.
  if (blocks.size() < kRatioWindow + 1) {
    throw Error(Errc::diverged_integral, "integrate_tail: too few blocks");
  }
  double ratio = 0.0;
  for (int i = 0; i < kRatioWindow; ++i) {
    const double prev = blocks[blocks.size() - 2 - i];
    const double cur = blocks[blocks.size() - 1 - i];
    if (!(prev > 0.0)) {
      throw Error(Errc::diverged_integral, "integrate_tail: nonpositive block");
    }
    ratio += cur / prev;
  }
  ratio /= kRatioWindow;
  if (!(ratio < 0.99)) {
    throw Error(Errc::diverged_integral,
                "integrate_tail: tail contributions do not decay (ratio " +
                    std::to_string(ratio) + ")");
  }
  const double remainder = blocks.back() * ratio / (1.0 - ratio);
  return {total + remainder, error + 1e-3 * remainder};
}

}  // namespace evt::quad
