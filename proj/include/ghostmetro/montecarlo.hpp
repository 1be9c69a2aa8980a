// SPDX-License-Identifier: Apache-2.0
#pragma once

/*! \file
 *  \brief Stochastic simulation of both ghost spectrometers.
 *
 *  Repetitions (classical) and pairs (quantum) are processed in fixed-size
 *  batches. Every (batch, mode) pair owns an mt19937_64 stream seeded from
 *  the master seed via splitmix64, so results depend only on the seed and
 *  the batch size, never on how batches are scheduled. Summaries merge in
 *  batch order.
 */

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ghostmetro/detail/numeric.hpp"
#include "ghostmetro/errors.hpp"
#include "ghostmetro/metrology.hpp"
#include "ghostmetro/mgf.hpp"

namespace ghostmetro {

inline constexpr const char* kRngIdentity = "mt19937_64/splitmix64-streams/libstdc++-distributions";

struct RunConfig {
  std::vector<double> transmittivities;
  double nbar = 1.0;                  ///< per-arm mean; the source mode carries 2 nbar
  double eta = 1.0;                   ///< analysis-arm efficiency (quantum scheme)
  std::uint64_t repetitions = 0;      ///< classical repetitions M
  std::uint64_t pairs = 0;            ///< quantum pair count
  std::uint64_t seed = 0;
  std::vector<double> mode_weights;   ///< quantum mode occupancy; empty = uniform
  std::uint64_t batch_size = 1 << 16;
  unsigned threads = 0;

  void validate() const {
    if (transmittivities.empty()) throw ContractViolation("run needs at least one mode");
    for (double t : transmittivities)
      if (!(t >= 0.0 && t <= 1.0)) throw DomainError("transmittivities must lie in [0, 1]");
    if (!(nbar >= 0.0)) throw DomainError("nbar must be >= 0");
    if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("eta must lie in [0, 1]");
    if (batch_size == 0) throw ContractViolation("batch size must be > 0");
    if (!mode_weights.empty()) {
      if (mode_weights.size() != transmittivities.size())
        throw ContractViolation("one occupancy weight per mode is required");
      double s = 0.0;
      for (double w : mode_weights) {
        if (!(w >= 0.0)) throw DomainError("occupancy weights must be >= 0");
        s += w;
      }
      if (std::abs(s - 1.0) > 1e-9) throw DomainError("occupancy weights must sum to 1");
    }
  }
};

/// Dense, growable count histogram over (n1, n2).
class JointHistogram {
public:
  void add(int n1, int n2, std::uint64_t count = 1) {
    if (n1 >= rows_ || n2 >= cols_) grow(std::max(rows_, n1 + 1), std::max(cols_, n2 + 1));
    counts_[static_cast<std::size_t>(n1) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(n2)] += count;
    total_ += count;
  }

  void merge(const JointHistogram& o) {
    grow(std::max(rows_, o.rows_), std::max(cols_, o.cols_));
    for (int a = 0; a < o.rows_; ++a)
      for (int b = 0; b < o.cols_; ++b) {
        const std::uint64_t c = o.at(a, b);
        counts_[static_cast<std::size_t>(a) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(b)] += c;
      }
    total_ += o.total_;
  }

  std::uint64_t at(int n1, int n2) const {
    if (n1 < 0 || n2 < 0 || n1 >= rows_ || n2 >= cols_) return 0;
    return counts_[static_cast<std::size_t>(n1) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(n2)];
  }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::uint64_t total() const noexcept { return total_; }

  friend bool operator==(const JointHistogram&, const JointHistogram&) = default;

private:
  void grow(int rows, int cols) {
    if (rows == rows_ && cols == cols_) return;
    std::vector<std::uint64_t> next(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0);
    for (int a = 0; a < rows_; ++a)
      for (int b = 0; b < cols_; ++b)
        next[static_cast<std::size_t>(a) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(b)] = at(a, b);
    counts_ = std::move(next);
    rows_ = rows;
    cols_ = cols;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> counts_;
};

/// Power sums of n1, n2 and products per analyzed mode.
struct MomentSums {
  std::uint64_t count = 0;
  double n1 = 0, n2 = 0, n1sq = 0, n2sq = 0, n1n2 = 0, n1sq_n2sq = 0, n1_4_n2_4 = 0;

  void add(double a, double b) {
    ++count;
    const double ab = a * b;
    n1 += a;
    n2 += b;
    n1sq += a * a;
    n2sq += b * b;
    n1n2 += ab;
    n1sq_n2sq += ab * ab;
    n1_4_n2_4 += ab * ab * ab * ab;
  }
  void merge(const MomentSums& o) {
    count += o.count;
    n1 += o.n1;
    n2 += o.n2;
    n1sq += o.n1sq;
    n2sq += o.n2sq;
    n1n2 += o.n1n2;
    n1sq_n2sq += o.n1sq_n2sq;
    n1_4_n2_4 += o.n1_4_n2_4;
  }
  friend bool operator==(const MomentSums&, const MomentSums&) = default;
};

struct ClassicalRunSummary {
  std::uint64_t repetitions = 0;
  std::vector<JointHistogram> histograms;  ///< per analyzed mode, over (n1, n2_k)
  std::vector<MomentSums> sums;            ///< per analyzed mode
  std::vector<std::uint64_t> n1_marginal;  ///< histogram of the bucket count
  std::uint64_t drawn = 0, survived = 0, lost = 0, analyzed = 0;

  friend bool operator==(const ClassicalRunSummary&, const ClassicalRunSummary&) = default;
};

struct QuantumRunSummary {
  std::uint64_t pairs = 0;
  std::vector<std::uint64_t> singles;       ///< N_k: analysis-arm detections
  std::vector<std::uint64_t> coincidences;  ///< C_k
  std::vector<std::uint64_t> bucket;        ///< object-arm detections per emitted mode

  friend bool operator==(const QuantumRunSummary&, const QuantumRunSummary&) = default;
};

/// Geometric draw with mean n_th.
template <class URBG>
std::int64_t sample_thermal(double n_th, URBG& rng) {
  if (!(n_th >= 0.0)) throw DomainError("thermal mean must be >= 0");
  if (n_th == 0.0) return 0;
  std::geometric_distribution<std::int64_t> dist(1.0 / (1.0 + n_th));
  return dist(rng);
}

/// Receives (repetition, mode, n1, n2_mode) for every classical record.
using RecordSink = std::function<void(std::uint64_t, std::size_t, int, int)>;

namespace detail {

inline std::uint64_t batch_count(std::uint64_t total, std::uint64_t batch) {
  return (total + batch - 1) / batch;
}

inline ClassicalRunSummary classical_batch(const RunConfig& cfg, std::uint64_t b,
                                           const RecordSink* sink) {
  const std::size_t K = cfg.transmittivities.size();
  const std::uint64_t first = b * cfg.batch_size;
  const std::uint64_t n = std::min(cfg.batch_size, cfg.repetitions - first);
  const double n_th = 2.0 * cfg.nbar;

  std::vector<std::mt19937_64> streams;
  streams.reserve(K);
  for (std::size_t j = 0; j < K; ++j) streams.emplace_back(derive_seed(cfg.seed, b, j));

  ClassicalRunSummary s;
  s.repetitions = n;
  s.histograms.resize(K);
  s.sums.resize(K);
  std::vector<int> n2(K);
  for (std::uint64_t r = 0; r < n; ++r) {
    int n1 = 0;
    for (std::size_t j = 0; j < K; ++j) {
      auto& rng = streams[j];
      const std::int64_t m = sample_thermal(n_th, rng);
      int analyzed = 0, survived = 0;
      if (m > 0) {
        analyzed = std::binomial_distribution<int>(static_cast<int>(m), 0.5)(rng);
        const int rest = static_cast<int>(m) - analyzed;
        survived = rest > 0 ? std::binomial_distribution<int>(rest, cfg.transmittivities[j])(rng) : 0;
        s.lost += static_cast<std::uint64_t>(rest - survived);
      }
      s.drawn += static_cast<std::uint64_t>(m);
      s.analyzed += static_cast<std::uint64_t>(analyzed);
      s.survived += static_cast<std::uint64_t>(survived);
      n1 += survived;
      n2[j] = analyzed;
    }
    if (static_cast<std::size_t>(n1) >= s.n1_marginal.size())
      s.n1_marginal.resize(static_cast<std::size_t>(n1) + 1, 0);
    ++s.n1_marginal[static_cast<std::size_t>(n1)];
    for (std::size_t j = 0; j < K; ++j) {
      s.histograms[j].add(n1, n2[j]);
      s.sums[j].add(n1, n2[j]);
      if (sink) (*sink)(first + r, j, n1, n2[j]);
    }
  }
  return s;
}

inline void merge_into(ClassicalRunSummary& into, const ClassicalRunSummary& b) {
  into.repetitions += b.repetitions;
  if (into.histograms.empty()) {
    into.histograms.resize(b.histograms.size());
    into.sums.resize(b.sums.size());
  }
  for (std::size_t j = 0; j < b.histograms.size(); ++j) {
    into.histograms[j].merge(b.histograms[j]);
    into.sums[j].merge(b.sums[j]);
  }
  if (b.n1_marginal.size() > into.n1_marginal.size()) into.n1_marginal.resize(b.n1_marginal.size(), 0);
  for (std::size_t i = 0; i < b.n1_marginal.size(); ++i) into.n1_marginal[i] += b.n1_marginal[i];
  into.drawn += b.drawn;
  into.survived += b.survived;
  into.lost += b.lost;
  into.analyzed += b.analyzed;
}

}  // namespace detail

/// Split thermal light: per repetition each mode emits a thermal number of
/// photons with mean 2 nbar, each routed to arm 1 and surviving the filter
/// (T_j / 2), to arm 1 and lost ((1 - T_j) / 2) or to the analyzer (1 / 2).
/// n1 sums the arm-1 survivors over modes; the analyzer resolves modes.
///
/// With a sink, batches run sequentially so records arrive in order.
inline ClassicalRunSummary simulate_classical_run(const RunConfig& cfg, const RecordSink* sink = nullptr) {
  cfg.validate();
  const std::uint64_t batches = detail::batch_count(cfg.repetitions, cfg.batch_size);
  std::vector<ClassicalRunSummary> parts(batches);
  detail::parallel_for(batches, sink ? 1u : cfg.threads,
                       [&](std::size_t b) { parts[b] = detail::classical_batch(cfg, b, sink); });
  ClassicalRunSummary total;
  total.histograms.resize(cfg.transmittivities.size());
  total.sums.resize(cfg.transmittivities.size());
  for (const auto& p : parts) detail::merge_into(total, p);
  return total;
}

/// Photon pairs: each pair occupies one mode drawn from the occupancy
/// weights. The analysis photon is detected with probability eta, the
/// object photon passes the filter and the bucket detector with
/// probability T_k; a coincidence needs both.
inline QuantumRunSummary simulate_quantum_run(const RunConfig& cfg) {
  cfg.validate();
  const std::size_t K = cfg.transmittivities.size();
  std::vector<double> weights = cfg.mode_weights;
  if (weights.empty()) weights.assign(K, 1.0 / static_cast<double>(K));

  const std::uint64_t batches = detail::batch_count(cfg.pairs, cfg.batch_size);
  std::vector<QuantumRunSummary> parts(batches);
  detail::parallel_for(batches, cfg.threads, [&](std::size_t b) {
    std::mt19937_64 rng(detail::derive_seed(cfg.seed, b, 0x7175616e74756dULL));
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::bernoulli_distribution herald(cfg.eta);
    QuantumRunSummary& s = parts[b];
    s.singles.assign(K, 0);
    s.coincidences.assign(K, 0);
    s.bucket.assign(K, 0);
    const std::uint64_t first = b * cfg.batch_size;
    s.pairs = std::min(cfg.batch_size, cfg.pairs - first);
    for (std::uint64_t i = 0; i < s.pairs; ++i) {
      const std::size_t k = pick(rng);
      const bool analyzed = herald(rng);
      const bool through = std::bernoulli_distribution(cfg.transmittivities[k])(rng);
      s.singles[k] += analyzed;
      s.bucket[k] += through;
      s.coincidences[k] += analyzed && through;
    }
  });
  QuantumRunSummary total;
  total.singles.assign(K, 0);
  total.coincidences.assign(K, 0);
  total.bucket.assign(K, 0);
  for (const auto& p : parts) {
    total.pairs += p.pairs;
    for (std::size_t k = 0; k < K; ++k) {
      total.singles[k] += p.singles[k];
      total.coincidences[k] += p.coincidences[k];
      total.bucket[k] += p.bucket[k];
    }
  }
  return total;
}

/// Sample moments and their standard errors for one analyzed mode.
struct EmpiricalStats {
  MomentSet moments;  ///< dc12_dT is not observable and stays 0
  double se_mean_n1 = 0.0;
  double se_mean_n2 = 0.0;
  double se_c12 = 0.0;
  double se_n1sq_n2sq = 0.0;
  std::uint64_t samples = 0;
};

inline EmpiricalStats empirical_stats(const MomentSums& s) {
  if (s.count == 0) throw ContractViolation("empirical statistics need a non-empty run");
  const double M = static_cast<double>(s.count);
  auto se = [M](double mean, double mean_sq) {
    const double var = std::max(0.0, mean_sq - mean * mean);
    return std::sqrt(var / M);
  };
  EmpiricalStats e;
  e.samples = s.count;
  e.moments.mean_n1 = s.n1 / M;
  e.moments.mean_n2 = s.n2 / M;
  e.moments.c12 = s.n1n2 / M;
  e.moments.n1sq_n2sq = s.n1sq_n2sq / M;
  e.moments.var_c12 = e.moments.n1sq_n2sq - e.moments.c12 * e.moments.c12;
  e.se_mean_n1 = se(e.moments.mean_n1, s.n1sq / M);
  e.se_mean_n2 = se(e.moments.mean_n2, s.n2sq / M);
  e.se_c12 = se(e.moments.c12, e.moments.n1sq_n2sq);
  e.se_n1sq_n2sq = se(e.moments.n1sq_n2sq, s.n1_4_n2_4 / M);
  return e;
}

inline EmpiricalStats empirical_stats(const ClassicalRunSummary& summary, std::size_t k) {
  if (k >= summary.sums.size()) throw ContractViolation("mode index out of range");
  return empirical_stats(summary.sums[k]);
}

/// Raw classical records as CSV with columns repetition,k,n1,n2 (k 1-based).
inline void dump_classical_records(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "repetition,k,n1,n2\n";
  const RecordSink sink = [&out](std::uint64_t r, std::size_t k, int n1, int n2) {
    out << r << ',' << (k + 1) << ',' << n1 << ',' << n2 << '\n';
  };
  simulate_classical_run(cfg, &sink);
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace ghostmetro
