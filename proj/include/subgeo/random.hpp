#pragma once

#include "subgeo/linalg.hpp"

#include <cstdint>
#include <random>

namespace subgeo {

/// Seeded source of standard complex Gaussians. Not thread-safe; give each trial its own.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

  /// (g1 + i g2) / sqrt(2) with g1, g2 independent N(0, 1).
  linalg::Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
  }

  linalg::ComplexMatrix gaussian(Eigen::Index rows, Eigen::Index cols) {
    linalg::ComplexMatrix a(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = complex_normal();
    return a;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Per-trial seed: seed + index, so trials are independent of scheduling.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) { return seed + index; }

}  // namespace subgeo
