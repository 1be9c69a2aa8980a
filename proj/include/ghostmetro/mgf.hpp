// SPDX-License-Identifier: Apache-2.0
#pragma once

/*! \file
 *  \brief Moment generating functions of the classical ghost scheme.
 *
 *  For the analyzed mode k the joint generating function factorizes into
 *  the split-mode factor g_k(x, y | T_k) and one thermal factor g_th(x | T_j nbar)
 *  per spectator mode. Evaluated on TaylorJet values, the coefficients give
 *  the moments <n1^a n2^b> for a, b <= 2 and, through the t seed, d/dT_k.
 */

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "ghostmetro/errors.hpp"
#include "ghostmetro/taylor_jet.hpp"

namespace ghostmetro {

/// Per-repetition moments of the bucket/analyzer counts for one mode.
struct MomentSet {
  double mean_n1 = 0.0;
  double mean_n2 = 0.0;
  double c12 = 0.0;           ///< <n1 n2>
  double n1sq_n2sq = 0.0;     ///< <n1^2 n2^2>
  double var_c12 = 0.0;       ///< <n1^2 n2^2> - <n1 n2>^2
  double dc12_dT = 0.0;       ///< derivative of <n1 n2> with respect to T_k
};

namespace detail {

inline void check_mean(double m, const char* what) {
  if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError(std::string(what) + " must be >= 0");
}

inline void check_profile(std::span<const double> T, std::size_t k) {
  if (T.empty()) throw ContractViolation("transmission profile has no modes");
  if (k >= T.size())
    throw ContractViolation("mode index " + std::to_string(k) + " out of range for K = " +
                            std::to_string(T.size()));
  for (double v : T)
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("transmittivities must lie in [0, 1]");
}

}  // namespace detail

/// (1 + m - m e^x)^-1
inline TaylorJet g_th_jet(double m) {
  detail::check_mean(m, "thermal mean");
  const TaylorJet ex = exp(TaylorJet::x());
  return (1.0 + m - m * ex).reciprocal();
}

/// [1 + nbar (1 + T - T e^x - e^y)]^-1 with T replaced by T + t.
inline TaylorJet g_k_jet(double T, double nbar) {
  if (!(T >= 0.0 && T <= 1.0)) throw DomainError("transmittivity must lie in [0, 1]");
  detail::check_mean(nbar, "nbar");
  const TaylorJet Tt = TaylorJet::t() + T;
  const TaylorJet ex = exp(TaylorJet::x());
  const TaylorJet ey = exp(TaylorJet::y());
  return (1.0 + nbar * (1.0 + Tt - Tt * ex - ey)).reciprocal();
}

/// Generating function for mode k (zero-based) of the K-mode profile.
inline TaylorJet mgf_product(std::size_t k, std::span<const double> T, double nbar) {
  detail::check_profile(T, k);
  TaylorJet g = g_k_jet(T[k], nbar);
  for (std::size_t j = 0; j < T.size(); ++j)
    if (j != k && T[j] > 0.0) g *= g_th_jet(T[j] * nbar);
  return g;
}

/// <n1^alpha n2^beta> = alpha! beta! c[alpha][beta][0]
inline double extract_moment(const TaylorJet& jet, int alpha, int beta) {
  if (alpha < 0 || beta < 0 || alpha > TaylorJet::kMaxX || beta > TaylorJet::kMaxY)
    throw ContractViolation("moment order exceeds the jet truncation");
  static constexpr double fact[] = {1.0, 1.0, 2.0};
  return fact[alpha] * fact[beta] * jet.coeff(alpha, beta, 0);
}

inline MomentSet correlation_stats(std::size_t k, std::span<const double> T, double nbar) {
  const TaylorJet g = mgf_product(k, T, nbar);
  MomentSet m;
  m.mean_n1 = extract_moment(g, 1, 0);
  m.mean_n2 = extract_moment(g, 0, 1);
  m.c12 = extract_moment(g, 1, 1);
  m.n1sq_n2sq = extract_moment(g, 2, 2);
  m.var_c12 = m.n1sq_n2sq - m.c12 * m.c12;
  m.dc12_dT = g.coeff(1, 1, 1);
  return m;
}

}  // namespace ghostmetro
