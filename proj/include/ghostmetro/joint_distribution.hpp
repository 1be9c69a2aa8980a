// SPDX-License-Identifier: Apache-2.0
#pragma once

/*! \file
 *  \brief K-mode joint law P_k(n1, n2 | {T_i}) of bucket and analyzer counts.
 *
 *  n1 collects arm-1 photons from every mode, n2 only those of mode k.
 *  The arm-1 contributions of spectator modes are independent thermal
 *  variables with means T_j nbar, so P_k is the single-mode table of mode k
 *  convolved along n1 with each spectator's thermal law.
 *  joint_pmf_enumerate performs the literal sum over compositions of n1 and
 *  is kept only as a small-scale oracle.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ghostmetro/detail/numeric.hpp"
#include "ghostmetro/errors.hpp"
#include "ghostmetro/mgf.hpp"
#include "ghostmetro/photon_statistics.hpp"
#include "ghostmetro/pmf_table.hpp"

namespace ghostmetro {

/// How far to tabulate a joint law.
///
/// With no window the bounds come from truncation_bound(tol); caps turn an
/// oversized bound into a TruncationError. A window fixes the bounds
/// directly and the excluded probability is only reported, not bounded.
struct TruncationSpec {
  double tol = 1e-12;
  std::optional<int> n1_cap;
  std::optional<int> n2_cap;
  std::optional<std::pair<int, int>> window;

  static TruncationSpec tolerance(double tol) {
    TruncationSpec s;
    s.tol = tol;
    return s;
  }
  static TruncationSpec fixed_window(int n1_max, int n2_max) {
    TruncationSpec s;
    s.window = std::pair{n1_max, n2_max};
    return s;
  }
};

struct TruncationBounds {
  int n1_max = 0;
  int n2_max = 0;
};

namespace detail {

/// Chernoff bound log P(sum of geometric variables >= n) minimized over s.
inline double log_chernoff_tail(std::span<const double> means, double max_mean, double n) {
  const double s_max = std::log1p(1.0 / max_mean);
  auto objective = [&](double s) {
    double v = -s * n;
    for (double m : means) v -= std::log1p(m - m * std::exp(s));
    return v;
  };
  double lo = 0.0, hi = s_max * (1.0 - 1e-12);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double fa = objective(a), fb = objective(b);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * s_max; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = objective(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = objective(b);
    }
  }
  return std::min({fa, fb, 0.0});
}

inline std::size_t largest_mode(std::span<const double> T) {
  return static_cast<std::size_t>(std::max_element(T.begin(), T.end()) - T.begin());
}

}  // namespace detail

/// Bounds (n1_max, n2_max) such that P(n1 > n1_max) + P(n2 > n2_max) < tol.
///
/// n1 is a sum of independent geometric variables with means T_j nbar over
/// all modes (mode k included, by its thermal marginal); its tail gets a
/// Chernoff bound. n2 is thermal with mean nbar and its tail is exact.
/// Each arm receives half of tol.
inline TruncationBounds truncation_bound(std::span<const double> T, double nbar, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw DomainError("truncation tolerance must lie in (0, 1)");
  detail::check_mean(nbar, "nbar");
  for (double v : T)
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("transmittivities must lie in [0, 1]");
  TruncationBounds b;
  if (nbar == 0.0) return b;
  const double log_half_tol = std::log(0.5 * tol);

  // P(n2 > c) = (nbar / (1 + nbar))^(c + 1)
  const double log_ratio = std::log(nbar / (1.0 + nbar));
  b.n2_max = std::max(0, static_cast<int>(std::ceil(log_half_tol / log_ratio - 1.0)));
  while (static_cast<double>(b.n2_max + 1) * log_ratio >= log_half_tol) ++b.n2_max;

  std::vector<double> means;
  for (double v : T)
    if (v > 0.0) means.push_back(v * nbar);
  if (means.empty()) return b;
  const double max_mean = *std::max_element(means.begin(), means.end());
  // smallest N with P(n1 >= N + 1) < tol / 2
  auto ok = [&](long long n) {
    return detail::log_chernoff_tail(means, max_mean, static_cast<double>(n + 1)) < log_half_tol;
  };
  long long hi = 1;
  while (!ok(hi)) hi *= 2;
  long long lo = -1;  // ok(lo) false by convention
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    if (mid >= 0 && ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  if (hi > std::numeric_limits<int>::max() / 4) throw DomainError("truncation bound overflow");
  b.n1_max = static_cast<int>(hi);
  return b;
}

namespace detail {

inline TruncationBounds resolve_bounds(std::size_t k, std::span<const double> T, double nbar,
                                       const TruncationSpec& trunc) {
  if (trunc.window) {
    if (trunc.window->first < 0 || trunc.window->second < 0)
      throw DomainError("truncation window must be non-negative");
    return {trunc.window->first, trunc.window->second};
  }
  TruncationBounds b = truncation_bound(T, nbar, trunc.tol);
  if (trunc.n1_cap && b.n1_max > *trunc.n1_cap) {
    const std::size_t mode = largest_mode(T);
    throw TruncationError("bucket-arm bound " + std::to_string(b.n1_max) + " exceeds cap " +
                              std::to_string(*trunc.n1_cap) + "; largest tail from mode " +
                              std::to_string(mode + 1),
                          mode);
  }
  if (trunc.n2_cap && b.n2_max > *trunc.n2_cap)
    throw TruncationError("analyzer-arm bound " + std::to_string(b.n2_max) + " exceeds cap " +
                              std::to_string(*trunc.n2_cap) + " for mode " + std::to_string(k + 1),
                          k);
  return b;
}

}  // namespace detail

/// P_k on the bounds given by trunc. Deterministic; cost O(K n1_max^2 n2_max).
inline JointPMF joint_pmf_convolve(std::size_t k, std::span<const double> T, double nbar,
                                   const TruncationSpec& trunc = {}) {
  detail::check_profile(T, k);
  detail::check_mean(nbar, "nbar");
  const TruncationBounds b = detail::resolve_bounds(k, T, nbar, trunc);
  const ThermalParam source = ThermalParam::arm_mean(nbar);
  JointPMF pmf = single_mode_joint_table(Transmittivity(T[k]), source, b.n1_max, b.n2_max);

  const int rows = b.n1_max + 1;
  const int cols = b.n2_max + 1;
  std::vector<double> thermal(static_cast<std::size_t>(rows));
  std::vector<detail::CompensatedSum> acc(static_cast<std::size_t>(cols));
  JointPMF next(b.n1_max, b.n2_max);
  for (std::size_t j = 0; j < T.size(); ++j) {
    if (j == k || T[j] == 0.0) continue;
    for (int n = 0; n < rows; ++n) thermal[static_cast<std::size_t>(n)] = thermal_pmf(n, T[j] * nbar);
    for (int n1 = 0; n1 < rows; ++n1) {
      std::fill(acc.begin(), acc.end(), detail::CompensatedSum{});
      for (int nu = 0; nu <= n1; ++nu) {
        const double w = thermal[static_cast<std::size_t>(nu)];
        if (w == 0.0) break;
        const double* row = &pmf.p[static_cast<std::size_t>(n1 - nu) * static_cast<std::size_t>(cols)];
        for (int n2 = 0; n2 < cols; ++n2) acc[static_cast<std::size_t>(n2)] += w * row[n2];
      }
      for (int n2 = 0; n2 < cols; ++n2) next(n1, n2) = acc[static_cast<std::size_t>(n2)].value();
    }
    std::swap(pmf.p, next.p);
  }
  pmf.finalize();
  pmf.tail_bound = trunc.window ? 0.0 : trunc.tol;
  return pmf;
}

/// Literal sum over compositions of n1 into K parts. Oracle scale only.
inline JointPMF joint_pmf_enumerate(std::size_t k, std::span<const double> T, double nbar,
                                    const TruncationSpec& trunc = {}) {
  detail::check_profile(T, k);
  detail::check_mean(nbar, "nbar");
  if (T.size() > 4) throw ContractViolation("enumeration oracle refuses K > 4");
  const TruncationBounds b = detail::resolve_bounds(k, T, nbar, trunc);
  if (b.n1_max > 15) throw ContractViolation("enumeration oracle refuses n1_max > 15");

  const ThermalParam source = ThermalParam::arm_mean(nbar);
  const Transmittivity Tk(T[k]);
  const std::size_t K = T.size();
  JointPMF pmf(b.n1_max, b.n2_max);
  std::vector<int> nu(K, 0);

  for (int n1 = 0; n1 <= b.n1_max; ++n1) {
    for (int n2 = 0; n2 <= b.n2_max; ++n2) {
      detail::CompensatedSum cell;
      // odometer over (nu_0 .. nu_{K-2}); the last part takes the remainder
      std::fill(nu.begin(), nu.end(), 0);
      for (;;) {
        int used = 0;
        for (std::size_t i = 0; i + 1 < K; ++i) used += nu[i];
        if (used <= n1) {
          nu[K - 1] = n1 - used;
          double term = single_mode_joint(nu[k], n2, Tk, source);
          for (std::size_t j = 0; j < K && term != 0.0; ++j)
            if (j != k) term *= thermal_pmf(nu[j], T[j] * nbar);
          cell += term;
        }
        std::size_t pos = 0;
        while (pos + 1 < K) {
          if (++nu[pos] <= n1) break;
          nu[pos++] = 0;
        }
        if (pos + 1 >= K) break;
      }
      pmf(n1, n2) = cell.value();
    }
  }
  pmf.finalize();
  pmf.tail_bound = trunc.window ? 0.0 : trunc.tol;
  return pmf;
}

struct MomentEstimate {
  double value = 0.0;
  double bias_bound = 0.0;  ///< tail_mass * n1_max^alpha * n2_max^beta
};

/// Direct sum of n1^alpha n2^beta over the table.
inline MomentEstimate pmf_moments(const JointPMF& pmf, int alpha, int beta) {
  if (alpha < 0 || beta < 0) throw DomainError("moment orders must be >= 0");
  detail::CompensatedSum s;
  for (int n1 = 0; n1 <= pmf.n1_max; ++n1) {
    const double w1 = std::pow(static_cast<double>(n1), alpha);
    for (int n2 = 0; n2 <= pmf.n2_max; ++n2)
      s += w1 * std::pow(static_cast<double>(n2), beta) * pmf(n1, n2);
  }
  return {s.value(), pmf.tail_mass * std::pow(static_cast<double>(pmf.n1_max), alpha) *
                         std::pow(static_cast<double>(pmf.n2_max), beta)};
}

}  // namespace ghostmetro
