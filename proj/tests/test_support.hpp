#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "corrclust/rng.hpp"
#include "corrclust/types.hpp"

namespace test_support {

// Seeded point cloud in the unit square under the Euclidean metric.
inline ccl::Matrix euclidean_metric(int n, std::uint64_t seed) {
  ccl::Xoshiro256ss rng(seed);
  std::vector<double> px(n), py(n);
  for (int i = 0; i < n; ++i) {
    px[i] = rng.uniform();
    py[i] = rng.uniform();
  }
  ccl::Matrix d(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = px[i] - px[j], dy = py[i] - py[j];
      const double e = std::sqrt(dx * dx + dy * dy);
      ccl::mat_at(d, n, i, j) = e;
      ccl::mat_at(d, n, j, i) = e;
    }
  }
  return d;
}

// Evenly spaced points on a segment of length `span`.
inline ccl::Matrix lattice_metric(int n, double span) {
  ccl::Matrix d(static_cast<std::size_t>(n) * n, 0.0);
  const double step = n > 1 ? span / (n - 1) : 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      ccl::mat_at(d, n, i, j) = std::abs(i - j) * step;
    }
  }
  return d;
}

}  // namespace test_support
