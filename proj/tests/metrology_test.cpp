// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ghostmetro/metrology.hpp"
#include "ghostmetro/profile.hpp"

using namespace ghostmetro;

TEST(Klyshko, EstimateAndVariance) {
  const KlyshkoEstimate e = klyshko_estimate(50, 100);
  EXPECT_DOUBLE_EQ(e.transmittivity, 0.5);
  EXPECT_DOUBLE_EQ(e.variance, 0.0025);
  EXPECT_EQ(klyshko_estimate(0, 40).variance, 0.0);
  EXPECT_EQ(klyshko_estimate(40, 40).transmittivity, 1.0);
  EXPECT_EQ(klyshko_estimate(40, 40).variance, 0.0);
  EXPECT_THROW(klyshko_estimate(5, 4), DomainError);
  EXPECT_THROW(klyshko_estimate(0, 0), DomainError);
}

TEST(Klyshko, BinomialEnsembleMatchesVarianceAndIsUnbiased) {
  std::mt19937_64 rng(101);
  std::binomial_distribution<int> draw(1000, 0.3);
  const int replicas = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < replicas; ++i) {
    const double t = klyshko_estimate(draw(rng), 1000).transmittivity;
    s += t;
    s2 += t * t;
  }
  const double mean = s / replicas;
  const double var = s2 / replicas - mean * mean;
  const double expected = 0.3 * 0.7 / 1000.0;
  EXPECT_NEAR(var, expected, 0.05 * expected);
  EXPECT_LT(std::abs(mean - 0.3), 3.0 * std::sqrt(expected / replicas));
}

TEST(ResourceBudget, MatchesRepetitionsAndHeralds) {
  const ResourceBudget b(1e4, 0.35, 0.5);
  EXPECT_DOUBLE_EQ(b.nbar() * b.repetitions(), b.n_tot());
  EXPECT_DOUBLE_EQ(b.heralds(), 3500.0);
  const ResourceBudget q = ResourceBudget::from_heralds(3500.0, 0.35, 1.0);
  EXPECT_DOUBLE_EQ(q.n_tot(), 1e4);
  EXPECT_THROW(ResourceBudget(1e4, 0.0, 1.0), DomainError);
  EXPECT_THROW(ResourceBudget(0.0, 0.5, 1.0), DomainError);
}

TEST(QuantumVariance, AtBudget) {
  const ResourceBudget b(1e4, 0.35, 1.0);
  EXPECT_NEAR(quantum_variance_at_budget(0.5, b), 0.25 / 3500.0, 1e-18);
  EXPECT_NEAR(quantum_variance_at_budget(0.5, b), 7.1429e-5, 1e-9);
  EXPECT_EQ(quantum_variance_at_budget(0.0, b), 0.0);
  EXPECT_EQ(quantum_variance_at_budget(1.0, b), 0.0);
  EXPECT_DOUBLE_EQ(quantum_variance_at_budget(0.3, ResourceBudget(2e4, 0.35, 1.0)),
                   0.5 * quantum_variance_at_budget(0.3, b));
}

TEST(ClassicalPropagation, ScalesAsInverseRepetitions) {
  const std::vector<double> T{0.2, 0.6, 0.4};
  const double v1 = classical_variance_propagation(1, T, ResourceBudget(1e3, 0.35, 1.0));
  const double v2 = classical_variance_propagation(1, T, ResourceBudget(1e5, 0.35, 1.0));
  EXPECT_NEAR(v1 / v2, 100.0, 1e-10);
}

TEST(ClassicalPropagation, WorseThanQuantumOnSupergaussianTenModes) {
  SupergaussianFilter f;
  f.peak_T = 0.5;
  const TransmissionProfile p = rebin(supergaussian_profile(f, uniform_grid(810.0, 100, 0.33)), 10);
  const ResourceBudget b(1e4, 0.35, 1.0);
  for (std::size_t k = 0; k < p.modes(); ++k)
    EXPECT_GT(classical_variance_propagation(k, p.values(), b), quantum_variance_at_budget(p.values()[k], b)) << k;
}

TEST(Hellinger, IdentityMaximumAndDirectValue) {
  JointPMF a(1, 0), b(1, 0);
  a(0, 0) = 0.5;
  a(1, 0) = 0.5;
  b(0, 0) = 0.25;
  b(1, 0) = 0.75;
  EXPECT_EQ(hellinger_distance(a, a), 0.0);
  const long double direct = std::sqrt(std::pow(std::sqrt(0.5L) - std::sqrt(0.25L), 2) +
                                       std::pow(std::sqrt(0.5L) - std::sqrt(0.75L), 2));
  EXPECT_NEAR(hellinger_distance(a, b), static_cast<double>(direct), 1e-15);
  EXPECT_NEAR(hellinger_distance(a, b), 0.261052, 1e-6);
  EXPECT_DOUBLE_EQ(hellinger_distance(a, b), hellinger_distance(b, a));

  JointPMF x(1, 0), y(1, 0);
  x(0, 0) = 1.0;
  y(1, 0) = 1.0;
  EXPECT_NEAR(hellinger_distance(x, y), std::sqrt(2.0), 1e-15);
  EXPECT_THROW(hellinger_distance(a, JointPMF(2, 0)), ContractViolation);
}

TEST(Fisher, HellingerMatchesLoglikOracleSingleMode) {
  const std::vector<double> T{0.5};
  const LoglikFisher oracle = fisher_loglik_fd(0, T, 1.0);
  const FisherResult h = fisher_hellinger(0, T, 1.0, 1e-7);
  EXPECT_NEAR(h.value, oracle.value, 1e-4 * oracle.value);
  EXPECT_TRUE(h.stable);
  ASSERT_EQ(h.sweep.size(), 3u);
  EXPECT_LT(h.sweep_spread, 1e-3);
  EXPECT_EQ(oracle.excluded_mass, 0.0);
}

TEST(Fisher, PositiveInsideTheUnitInterval) {
  for (double t : {0.05, 0.3, 0.7, 0.95})
    for (double nbar : {0.3, 1.0}) {
      const std::vector<double> T{0.4, t};
      EXPECT_GT(fisher_hellinger(1, T, nbar).value, 0.0);
    }
}

TEST(Fisher, StepsDownwardNearUnitTransmission) {
  const std::vector<double> T{0.2, 1.0};
  const FisherResult h = fisher_hellinger(1, T, 1.0);
  EXPECT_LT(h.eps, 0.0);
  EXPECT_GT(h.value, 0.0);
  EXPECT_NEAR(h.value, fisher_loglik_fd(1, T, 1.0).value, 1e-3 * h.value);
}

TEST(Fisher, LoglikInvariantUnderSpectatorPermutation) {
  const std::vector<double> a{0.1, 0.5, 0.9};
  const std::vector<double> b{0.9, 0.5, 0.1};
  EXPECT_NEAR(fisher_loglik_fd(1, a, 1.0).value, fisher_loglik_fd(1, b, 1.0).value, 1e-10);
}

TEST(Fisher, SpectatorBackgroundTrendIsRecorded) {
  // Observed trend only: brighter spectators add bucket background.
  std::string trend;
  for (double spectator : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const std::vector<double> T{0.5, spectator, spectator};
    trend += std::to_string(fisher_loglik_fd(0, T, 1.0).value) + " ";
  }
  RecordProperty("fisher_vs_spectator_T", trend);
}

TEST(Crb, ArithmeticAndScaling) {
  EXPECT_DOUBLE_EQ(crb_bound(4.0, 100.0), 0.0025);
  EXPECT_DOUBLE_EQ(crb_bound(4.0, 1000.0) * 10.0, crb_bound(4.0, 100.0));
  EXPECT_THROW(crb_bound(0.0, 10.0), DomainError);
  EXPECT_THROW(crb_bound(1.0, 0.5), DomainError);
}

TEST(Crb, NeverExceedsPropagationVariance) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t K = 1 + trial % 4;
    std::vector<double> T(K);
    for (double& t : T) t = u(rng);
    const double nbar = 0.3 + 1.7 * u(rng);
    const ResourceBudget b(1e4, 0.35, nbar);
    const std::size_t k = trial % K;
    const FisherResult f = fisher_hellinger(k, T, nbar);
    const double crb = crb_bound(f.value, b.repetitions());
    EXPECT_LE(crb, classical_variance_propagation(k, T, b) * (1.0 + 1e-12));
  }
}

TEST(CompareModes, DegenerateModeIsFlaggedNotDropped) {
  const std::vector<double> T{0.0};
  CompareOptions opt;
  opt.with_crb = true;
  const auto rows = compare_modes(T, ResourceBudget(1e4, 0.35, 1.0), opt);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].var_quantum, 0.0);
  EXPECT_TRUE(rows[0].degenerate);
  EXPECT_NE(rows[0].flags().find("degenerate"), std::string::npos);
}

TEST(CompareModes, OrderFlipBetweenFewAndManyModes) {
  SupergaussianFilter f;
  f.peak_T = 0.5;
  CompareOptions opt;
  opt.with_crb = true;
  const ResourceBudget b(1e4, 0.35, 1.0);

  const TransmissionProfile k9 = binned_supergaussian(f, 33.0, 9);
  for (const auto& row : compare_modes(k9.values(), b, opt)) EXPECT_LT(row.var_quantum, row.var_classical_crb) << row.k;

  const TransmissionProfile k3 = binned_supergaussian(f, 33.0, 3);
  const auto rows = compare_modes(k3.values(), b, opt);
  EXPECT_LT(rows[1].var_classical_crb, rows[1].var_quantum);
}

TEST(CompareModes, OrderingIndependentOfBudgetAndThreads) {
  SupergaussianFilter f;
  const TransmissionProfile p = binned_supergaussian(f, 33.0, 5);
  CompareOptions opt;
  opt.with_crb = true;
  opt.threads = 1;
  const auto base = compare_modes(p.values(), ResourceBudget(1e3, 0.35, 1.0), opt);
  for (double n : {1e4, 1e5}) {
    opt.threads = 3;
    const auto rows = compare_modes(p.values(), ResourceBudget(n, 0.35, 1.0), opt);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      EXPECT_NEAR(rows[k].var_classical_prop * n, base[k].var_classical_prop * 1e3, 1e-12 * base[k].var_classical_prop * 1e3);
      EXPECT_NEAR(rows[k].var_classical_crb * n, base[k].var_classical_crb * 1e3, 1e-12 * base[k].var_classical_crb * 1e3);
      EXPECT_EQ(rows[k].var_quantum < rows[k].var_classical_crb, base[k].var_quantum < base[k].var_classical_crb);
      EXPECT_EQ(rows[k].fisher, base[k].fisher);
    }
  }
}

TEST(CompareModes, CrbGuardMarksRowsSkipped) {
  const std::vector<double> T(14, 0.3);
  CompareOptions opt;
  opt.with_crb = true;
  const auto rows = compare_modes(T, ResourceBudget(1e4, 0.35, 1.0), opt);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.crb_skipped);
    EXPECT_TRUE(std::isnan(r.var_classical_crb));
  }
}
