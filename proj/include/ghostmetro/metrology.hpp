// SPDX-License-Identifier: Apache-2.0
#pragma once

/*! \file
 *  \brief Precision of the quantum and classical ghost spectrometers.
 *
 *  Three figures per mode, all at a matched photon budget N_tot:
 *   - quantum: binomial variance of the heralded (Klyshko) estimate with
 *     N_k = eta N_tot heralds;
 *   - classical propagation: the C12 = <n1 n2> estimator over M = N_tot / nbar
 *     repetitions, error-propagated through dC12/dT_k;
 *   - classical Cramer-Rao bound 1 / (M F_k), F_k from the Hellinger
 *     distance between P_k at T_k and at T_k + eps.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "ghostmetro/detail/numeric.hpp"
#include "ghostmetro/errors.hpp"
#include "ghostmetro/joint_distribution.hpp"
#include "ghostmetro/mgf.hpp"

namespace ghostmetro {

/// Photons committed to one transmittivity estimate, shared by both schemes.
/// nbar * repetitions == n_tot by construction.
class ResourceBudget {
public:
  ResourceBudget(double n_tot, double eta, double nbar) : n_tot_(n_tot), eta_(eta), nbar_(nbar) {
    if (!(n_tot > 0.0) || !std::isfinite(n_tot)) throw DomainError("N_tot must be > 0");
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("detection efficiency must lie in (0, 1]");
    if (!(nbar > 0.0) || !std::isfinite(nbar)) throw DomainError("nbar must be > 0");
  }

  /// Budget granted by N_k heralds collected at efficiency eta: N_tot = N_k / eta.
  static ResourceBudget from_heralds(double n_k, double eta, double nbar) {
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("detection efficiency must lie in (0, 1]");
    return ResourceBudget(n_k / eta, eta, nbar);
  }

  double n_tot() const noexcept { return n_tot_; }
  double eta() const noexcept { return eta_; }
  double nbar() const noexcept { return nbar_; }
  double repetitions() const noexcept { return n_tot_ / nbar_; }
  double heralds() const noexcept { return eta_ * n_tot_; }

private:
  double n_tot_;
  double eta_;
  double nbar_;
};

struct KlyshkoEstimate {
  double transmittivity = 0.0;
  double variance = 0.0;
};

/// T = C / N with binomial variance T (1 - T) / N.
inline KlyshkoEstimate klyshko_estimate(std::int64_t coincidences, std::int64_t singles) {
  if (singles < 1) throw DomainError("singles count must be >= 1");
  if (coincidences < 0 || coincidences > singles)
    throw DomainError("coincidences must lie in [0, singles]");
  const double n = static_cast<double>(singles);
  const double t = static_cast<double>(coincidences) / n;
  return {t, t * (1.0 - t) / n};
}

inline double quantum_variance_at_budget(double T, const ResourceBudget& budget) {
  if (!(T >= 0.0 && T <= 1.0)) throw DomainError("transmittivity must lie in [0, 1]");
  return T * (1.0 - T) / budget.heralds();
}

inline double classical_variance_propagation(std::size_t k, std::span<const double> T,
                                             const ResourceBudget& budget) {
  const MomentSet m = correlation_stats(k, T, budget.nbar());
  if (m.dc12_dT == 0.0) throw SingularEstimatorError("dC12/dT vanishes; C12 carries no information");
  return m.var_c12 / (m.dc12_dT * m.dc12_dT) / budget.repetitions();
}

/// sqrt(sum (sqrt p - sqrt q)^2) over a common grid.
inline double hellinger_distance(const JointPMF& P, const JointPMF& Q) {
  if (!P.same_grid(Q)) throw ContractViolation("Hellinger distance needs a common support grid");
  detail::CompensatedSum s;
  for (std::size_t i = 0; i < P.p.size(); ++i) {
    const double a = P.p[i], b = Q.p[i];
    if (a == b) continue;
    const double d = (a - b) / (std::sqrt(a) + std::sqrt(b));
    s += d * d;
  }
  return std::sqrt(s.value());
}

inline double crb_bound(double fisher, double repetitions) {
  if (!(fisher > 0.0)) throw DomainError("Fisher information must be > 0");
  if (!(repetitions >= 1.0)) throw DomainError("repetitions must be >= 1");
  return 1.0 / (repetitions * fisher);
}

struct FisherResult {
  double value = 0.0;
  double eps = 0.0;               ///< signed step actually applied to T_k
  std::vector<double> sweep;      ///< values at eps * {10, 1, 0.1}, empty if not swept
  double sweep_spread = 0.0;      ///< (max - min) / value over the sweep
  bool stable = true;
  double tail_mass = 0.0;         ///< largest tail over the pmfs involved
  int n1_max = 0;
  int n2_max = 0;
};

namespace detail {

inline TruncationBounds union_bounds(TruncationBounds a, TruncationBounds b) {
  return {std::max(a.n1_max, b.n1_max), std::max(a.n2_max, b.n2_max)};
}

/// Window covering both the nominal profile and every perturbed one.
inline TruncationSpec common_window(std::size_t k, std::span<const double> T, double nbar,
                                    double reach, const TruncationSpec& trunc) {
  if (trunc.window) return trunc;
  std::vector<double> moved(T.begin(), T.end());
  moved[k] = std::clamp(T[k] + reach, 0.0, 1.0);
  TruncationBounds b = union_bounds(resolve_bounds(k, T, nbar, trunc),
                                    resolve_bounds(k, moved, nbar, trunc));
  TruncationSpec w = TruncationSpec::fixed_window(b.n1_max, b.n2_max);
  return w;
}

inline double hellinger_fisher_at(std::size_t k, std::span<const double> T, double nbar,
                                  double eps, const JointPMF& base, const TruncationSpec& window,
                                  double& tail) {
  std::vector<double> moved(T.begin(), T.end());
  moved[k] = T[k] + eps;
  const JointPMF shifted = joint_pmf_convolve(k, moved, nbar, window);
  tail = std::max(tail, shifted.tail_mass);
  const double d = hellinger_distance(base, shifted);
  return 4.0 * d * d / (eps * eps);
}

}  // namespace detail

/// Fisher information about T_k from 4 D_H^2 / eps^2.
///
/// The step is taken downward when T_k + 10 eps would leave [0, 1]. With
/// sweep enabled the value is recomputed at 10 eps and eps / 10 and the
/// result is marked unstable if the three disagree by more than
/// stability_tol relative.
inline FisherResult fisher_hellinger(std::size_t k, std::span<const double> T, double nbar,
                                     double eps = 1e-7, const TruncationSpec& trunc = {},
                                     bool sweep = true, double stability_tol = 1e-3) {
  detail::check_profile(T, k);
  if (!(eps > 0.0 && eps < 0.1)) throw DomainError("eps must lie in (0, 0.1)");
  const double reach = sweep ? 10.0 * eps : eps;
  const double step = T[k] + reach <= 1.0 ? eps : -eps;
  if (T[k] + (step > 0 ? reach : -reach) < 0.0)
    throw DomainError("eps too large for this transmittivity");

  const TruncationSpec window = detail::common_window(k, T, nbar, step > 0 ? reach : -reach, trunc);
  const JointPMF base = joint_pmf_convolve(k, T, nbar, window);

  FisherResult r;
  r.eps = step;
  r.n1_max = base.n1_max;
  r.n2_max = base.n2_max;
  r.tail_mass = base.tail_mass;
  r.value = detail::hellinger_fisher_at(k, T, nbar, step, base, window, r.tail_mass);
  if (sweep) {
    r.sweep = {detail::hellinger_fisher_at(k, T, nbar, 10.0 * step, base, window, r.tail_mass),
               r.value,
               detail::hellinger_fisher_at(k, T, nbar, 0.1 * step, base, window, r.tail_mass)};
    const auto [lo, hi] = std::minmax_element(r.sweep.begin(), r.sweep.end());
    r.sweep_spread = r.value > 0.0 ? (*hi - *lo) / r.value : 0.0;
    r.stable = std::isfinite(r.sweep_spread) && r.sweep_spread < stability_tol;
  }
  return r;
}

struct LoglikFisher {
  double value = 0.0;
  double excluded_mass = 0.0;  ///< mass of cells where log P is undefined
};

/// Sum over cells of P (d log P / d T_k)^2 with central differences; falls
/// back to a one-sided difference at the ends of [0, 1].
inline LoglikFisher fisher_loglik_fd(std::size_t k, std::span<const double> T, double nbar,
                                     double step = 1e-5, const TruncationSpec& trunc = {}) {
  detail::check_profile(T, k);
  if (!(step > 0.0 && step < 0.5)) throw DomainError("finite-difference step must lie in (0, 0.5)");
  const double up = std::min(1.0, T[k] + step);
  const double down = std::max(0.0, T[k] - step);

  TruncationSpec window = trunc;
  if (!trunc.window) {
    std::vector<double> hi(T.begin(), T.end());
    hi[k] = up;
    const TruncationBounds b =
        detail::union_bounds(detail::resolve_bounds(k, T, nbar, trunc),
                             detail::resolve_bounds(k, hi, nbar, trunc));
    window = TruncationSpec::fixed_window(b.n1_max, b.n2_max);
  }
  std::vector<double> moved(T.begin(), T.end());
  const JointPMF center = joint_pmf_convolve(k, T, nbar, window);
  moved[k] = up;
  const JointPMF plus = joint_pmf_convolve(k, moved, nbar, window);
  moved[k] = down;
  const JointPMF minus = joint_pmf_convolve(k, moved, nbar, window);

  const double h = up - down;
  LoglikFisher r;
  detail::CompensatedSum sum, excluded;
  for (std::size_t i = 0; i < center.p.size(); ++i) {
    const double p = center.p[i];
    if (p == 0.0) continue;
    if (plus.p[i] == 0.0 || minus.p[i] == 0.0) {
      excluded += p;
      continue;
    }
    const double score = (std::log(plus.p[i]) - std::log(minus.p[i])) / h;
    sum += p * score * score;
  }
  r.value = sum.value();
  r.excluded_mass = excluded.value();
  return r;
}

/// Per-mode precision summary.
struct ComparisonRow {
  std::size_t k = 0;  ///< zero-based mode index
  double T = 0.0;
  double var_quantum = 0.0;
  double var_classical_prop = 0.0;
  double var_classical_crb = std::numeric_limits<double>::quiet_NaN();
  double fisher = std::numeric_limits<double>::quiet_NaN();
  double n_tot = 0.0;
  double tail_mass = 0.0;
  double eps = 0.0;
  bool degenerate = false;    ///< T in {0, 1}: the binomial variance vanishes
  bool crb_unstable = false;  ///< eps sweep disagreed
  bool crb_skipped = false;   ///< K above the CRB guard

  std::string flags() const {
    std::string f;
    auto add = [&](const char* s) {
      if (!f.empty()) f += '|';
      f += s;
    };
    if (degenerate) add("degenerate");
    if (crb_unstable) add("crb_unstable");
    if (crb_skipped) add("crb_skipped");
    return f;
  }
};

struct CompareOptions {
  TruncationSpec trunc{};
  bool with_crb = false;
  double eps = 1e-7;
  std::size_t max_crb_modes = 12;  ///< CRB refused above this K
  unsigned threads = 0;            ///< 0: hardware concurrency
};

namespace detail {

template <class Job>
void parallel_for(std::size_t n, unsigned threads, Job&& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// One row per mode; budgets holds one entry per mode. Rows come back in
/// mode order whatever the scheduling.
inline std::vector<ComparisonRow> compare_modes(std::span<const double> T,
                                                std::span<const ResourceBudget> budgets,
                                                const CompareOptions& opt = {}) {
  if (T.empty()) throw ContractViolation("profile has no modes");
  if (budgets.size() != T.size()) throw ContractViolation("one budget per mode is required");
  detail::check_profile(T, 0);
  std::vector<ComparisonRow> rows(T.size());
  const bool crb_allowed = opt.with_crb && T.size() <= opt.max_crb_modes;

  detail::parallel_for(T.size(), opt.threads, [&](std::size_t k) {
    const ResourceBudget& b = budgets[k];
    ComparisonRow& row = rows[k];
    row.k = k;
    row.T = T[k];
    row.n_tot = b.n_tot();
    row.degenerate = T[k] == 0.0 || T[k] == 1.0;
    row.var_quantum = quantum_variance_at_budget(T[k], b);
    row.var_classical_prop = classical_variance_propagation(k, T, b);
    if (opt.with_crb && !crb_allowed) {
      row.crb_skipped = true;
    } else if (crb_allowed) {
      const FisherResult f = fisher_hellinger(k, T, b.nbar(), opt.eps, opt.trunc, true);
      row.fisher = f.value;
      row.eps = f.eps;
      row.tail_mass = f.tail_mass;
      row.crb_unstable = !f.stable;
      if (f.value > 0.0) row.var_classical_crb = crb_bound(f.value, b.repetitions());
    }
  });
  return rows;
}

inline std::vector<ComparisonRow> compare_modes(std::span<const double> T, const ResourceBudget& budget,
                                                const CompareOptions& opt = {}) {
  const std::vector<ResourceBudget> budgets(T.size(), budget);
  return compare_modes(T, budgets, opt);
}

}  // namespace ghostmetro
