#include "evt/lmoments.hpp"

#include <algorithm>
#include <vector>

#include "evt/error.hpp"

namespace evt {

LMoments sample_lmoments(std::span<const double> data) {
  const std::size_t n = data.size();
  if (n < 4) throw Error(Errc::insufficient_data, "L-moments need at least 4 points");

  std::vector<double> x(data.begin(), data.end());
  std::sort(x.begin(), x.end());

  // b_r = n^-1 sum_i x_(i) prod_{j=1..r} (i-j)/(n-j), i 1-based.
  const double nd = static_cast<double>(n);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double i = static_cast<double>(k);  // i - 1
    const double w1 = i / (nd - 1);
    const double w2 = w1 * (i - 1) / (nd - 2);
    const double w3 = w2 * (i - 2) / (nd - 3);
    b0 += x[k];
    b1 += w1 * x[k];
    b2 += w2 * x[k];
    b3 += w3 * x[k];
  }
  b0 /= nd;
  b1 /= nd;
  b2 /= nd;
  b3 /= nd;

  LMoments m;
  m.l1 = b0;
  m.l2 = 2 * b1 - b0;
  const double l3 = 6 * b2 - 6 * b1 + b0;
  const double l4 = 20 * b3 - 30 * b2 + 12 * b1 - b0;
  if (m.l2 > 0) {
    m.tau3 = std::clamp(l3 / m.l2, -1.0, 1.0);
    m.tau4 = std::clamp(l4 / m.l2, -1.0, 1.0);
  } else {
    m.l2 = 0;
  }
  return m;
}

double gpd_tau4_of_tau3(double tau3) {
  if (!(tau3 >= -1 && tau3 <= 1)) throw Error(Errc::domain, "tau3 must lie in [-1, 1]");
  return tau3 * (1 + 5 * tau3) / (5 + tau3);
}

}  // namespace evt
