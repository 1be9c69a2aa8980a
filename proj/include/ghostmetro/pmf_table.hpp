// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "ghostmetro/detail/numeric.hpp"
#include "ghostmetro/errors.hpp"

namespace ghostmetro {

/// Truncated joint photon-number distribution p[n1][n2] over
/// 0 <= n1 <= n1_max, 0 <= n2 <= n2_max. Whatever probability falls
/// outside the table is carried in tail_mass.
struct JointPMF {
  int n1_max = 0;
  int n2_max = 0;
  std::vector<double> p;      // row-major in n1
  double tail_mass = 0.0;     // 1 - sum of the table, never negative
  double tail_bound = 0.0;    // a-priori bound used to size the table (0 if none)

  JointPMF() = default;
  JointPMF(int n1, int n2)
      : n1_max(n1), n2_max(n2),
        p(static_cast<std::size_t>(n1 + 1) * static_cast<std::size_t>(n2 + 1), 0.0) {}

  int rows() const noexcept { return n1_max + 1; }
  int cols() const noexcept { return n2_max + 1; }

  double& operator()(int n1, int n2) { return p[index(n1, n2)]; }
  double operator()(int n1, int n2) const { return p[index(n1, n2)]; }

  /// Probability, returning 0 outside the table.
  double at(int n1, int n2) const {
    if (n1 < 0 || n2 < 0 || n1 > n1_max || n2 > n2_max) return 0.0;
    return p[index(n1, n2)];
  }

  double total() const {
    detail::CompensatedSum s;
    for (double v : p) s += v;
    return s.value();
  }

  bool same_grid(const JointPMF& other) const noexcept {
    return n1_max == other.n1_max && n2_max == other.n2_max;
  }

  /// Flushes denormal-scale entries into the tail and recomputes tail_mass.
  void finalize(double flush_below = 1e-300) {
    for (double& v : p)
      if (v < flush_below) v = 0.0;
    const double rest = 1.0 - total();
    tail_mass = rest > 0.0 ? rest : 0.0;
  }

private:
  std::size_t index(int n1, int n2) const noexcept {
    return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2_max + 1) +
           static_cast<std::size_t>(n2);
  }
};

}  // namespace ghostmetro
