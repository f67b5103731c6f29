#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace evt {

// Observations above a threshold, stored as positive excesses x - u in the
// order they appear in the source data.
struct ExcessSample {
  double threshold = 0.0;
  std::vector<double> excesses;
  std::size_t n_total = 0;
  std::size_t n_exceed = 0;
};

ExcessSample exceedances(std::span<const double> data, double u);

}  // namespace evt
