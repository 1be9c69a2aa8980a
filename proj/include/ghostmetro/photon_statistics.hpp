// SPDX-License-Identifier: Apache-2.0
#pragma once

/*! \file
 *  \brief Single-mode photon counting statistics of split thermal light.
 *
 *  A thermal mode with mean n_th is divided on a balanced beam splitter.
 *  Arm 1 crosses a filter of transmittivity T before a bucket detector;
 *  arm 2 goes to the analyzer. Photons removed by the filter are counted
 *  in a virtual loss mode so the three-outcome split is multinomial:
 *  each photon lands in arm 1 with probability T/2, in the loss mode with
 *  probability (1-T)/2 and in arm 2 with probability 1/2.
 */

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ghostmetro/detail/numeric.hpp"
#include "ghostmetro/errors.hpp"
#include "ghostmetro/pmf_table.hpp"

namespace ghostmetro {

/// Mean photon number of a thermal source mode; nbar() is the per-arm
/// mean after the balanced splitter.
class ThermalParam {
public:
  static ThermalParam source_mean(double n_th) { return ThermalParam(n_th); }
  static ThermalParam arm_mean(double nbar) { return ThermalParam(2.0 * nbar); }

  double n_th() const noexcept { return n_th_; }
  double nbar() const noexcept { return 0.5 * n_th_; }

private:
  explicit ThermalParam(double n_th) : n_th_(n_th) {
    if (!(n_th >= 0.0) || !std::isfinite(n_th))
      throw DomainError("thermal mean photon number must be finite and >= 0");
  }
  double n_th_;
};

class Transmittivity {
public:
  explicit Transmittivity(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0))
      throw DomainError("transmittivity must lie in [0, 1], got " + std::to_string(value));
  }
  double value() const noexcept { return value_; }

private:
  double value_;
};

namespace detail {

inline void require_count(std::int64_t n, const char* name) {
  if (n < 0) throw DomainError(std::string(name) + " must be a non-negative count");
}

}  // namespace detail

/// Bose-Einstein (geometric) photon-number law with mean n_th.
inline double thermal_pmf(std::int64_t m, double n_th) {
  detail::require_count(m, "m");
  if (!(n_th >= 0.0) || !std::isfinite(n_th)) throw DomainError("thermal mean must be >= 0");
  if (n_th == 0.0) return m == 0 ? 1.0 : 0.0;
  const double base = 1.0 / (n_th + 1.0);
  return base * std::pow(n_th * base, static_cast<double>(m));
}

inline double thermal_pmf(std::int64_t m, ThermalParam mean) { return thermal_pmf(m, mean.n_th()); }

/// Probability of n1 photons on the bucket arm, n2 on the analyzer arm and
/// n0 in the virtual loss mode, for one source mode.
///
/// Each photon is routed with probability 1/2 per splitter output; the
/// printed 1/sqrt(2) amplitude factor does not normalize.
inline double triple_pmf(std::int64_t n1, std::int64_t n2, std::int64_t n0, Transmittivity t,
                         ThermalParam source) {
  detail::require_count(n1, "n1");
  detail::require_count(n2, "n2");
  detail::require_count(n0, "n0");
  const double T = t.value();
  const double n_th = source.n_th();
  const std::int64_t m = n1 + n2 + n0;
  if (n_th == 0.0) return m == 0 ? 1.0 : 0.0;
  if (T == 0.0 && n1 > 0) return 0.0;
  if (T == 1.0 && n0 > 0) return 0.0;

  double log_p = detail::log_binomial(m, n1 + n0) + detail::log_binomial(n1 + n0, n0);
  log_p += -std::log1p(n_th) + static_cast<double>(m) * std::log(n_th / (2.0 * (n_th + 1.0)));
  if (n1 > 0) log_p += static_cast<double>(n1) * std::log(T);
  if (n0 > 0) log_p += static_cast<double>(n0) * std::log1p(-T);
  return std::exp(log_p);
}

namespace detail {

/// Sum over the loss mode of the ratios term(n0)/term(0) for a fixed
/// a = n1 + n2. Successive ratios are (a + n0 + 1) / (n0 + 1) * z, which
/// decrease toward z < 1, so once a ratio drops below one the remainder is
/// bounded by a geometric series.
inline double loss_mode_series(std::int64_t a, double z) {
  if (z == 0.0) return 1.0;
  CompensatedSum sum;
  double term = 1.0;
  sum += term;
  for (std::int64_t n0 = 0;; ++n0) {
    const double r = static_cast<double>(a + n0 + 1) / static_cast<double>(n0 + 1) * z;
    term *= r;
    sum += term;
    if (term == 0.0) break;
    const double next = static_cast<double>(a + n0 + 2) / static_cast<double>(n0 + 2) * z;
    if (next < 1.0 && term * next / (1.0 - next) <= 1e-15 * sum.value()) break;
  }
  return sum.value();
}

/// log of the n0 = 0 term of the triple law, without the T^n1 factor
/// special cases (caller guarantees n_th > 0).
inline double log_leading_term(std::int64_t n1, std::int64_t n2, double T, double n_th) {
  const std::int64_t a = n1 + n2;
  double lp = log_binomial(a, n1) - std::log1p(n_th) +
              static_cast<double>(a) * std::log(n_th / (2.0 * (n_th + 1.0)));
  if (n1 > 0) lp += static_cast<double>(n1) * std::log(T);
  return lp;
}

}  // namespace detail

/// Joint law of (n1, n2) for one mode, marginalized over the loss mode.
inline double single_mode_joint(std::int64_t n1, std::int64_t n2, Transmittivity t,
                                ThermalParam source) {
  detail::require_count(n1, "n1");
  detail::require_count(n2, "n2");
  const double T = t.value();
  const double n_th = source.n_th();
  if (n_th == 0.0) return (n1 == 0 && n2 == 0) ? 1.0 : 0.0;
  if (T == 0.0 && n1 > 0) return 0.0;
  const double z = n_th / (2.0 * (n_th + 1.0)) * (1.0 - T);
  const double series = detail::loss_mode_series(n1 + n2, z);
  return std::exp(detail::log_leading_term(n1, n2, T, n_th) + std::log(series));
}

/// Dense table of single_mode_joint over [0, n1_max] x [0, n2_max].
inline JointPMF single_mode_joint_table(Transmittivity t, ThermalParam source, int n1_max,
                                        int n2_max) {
  if (n1_max < 0 || n2_max < 0) throw DomainError("table bounds must be >= 0");
  JointPMF table(n1_max, n2_max);
  const double T = t.value();
  const double n_th = source.n_th();
  if (n_th == 0.0) {
    table(0, 0) = 1.0;
  } else {
    const double z = n_th / (2.0 * (n_th + 1.0)) * (1.0 - T);
    std::vector<double> log_series(static_cast<std::size_t>(n1_max + n2_max + 1));
    for (std::size_t a = 0; a < log_series.size(); ++a)
      log_series[a] = std::log(detail::loss_mode_series(static_cast<std::int64_t>(a), z));
    const int n1_top = T == 0.0 ? 0 : n1_max;
    for (int n1 = 0; n1 <= n1_top; ++n1)
      for (int n2 = 0; n2 <= n2_max; ++n2)
        table(n1, n2) = std::exp(detail::log_leading_term(n1, n2, T, n_th) +
                                 log_series[static_cast<std::size_t>(n1 + n2)]);
  }
  table.finalize();
  return table;
}

inline JointPMF single_mode_joint_table(Transmittivity t, ThermalParam source, int n_max) {
  return single_mode_joint_table(t, source, n_max, n_max);
}

}  // namespace ghostmetro
