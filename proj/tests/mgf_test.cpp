// SPDX-License-Identifier: Apache-2.0
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ghostmetro/mgf.hpp"
#include "ghostmetro/photon_statistics.hpp"

using namespace ghostmetro;

TEST(ThermalJet, VacuumIsConstantOne) { EXPECT_EQ(g_th_jet(0.0), TaylorJet::constant(1.0)); }

TEST(ThermalJet, MomentsMatchDirectSummation) {
  for (double m : {0.3, 1.0, 2.5}) {
    double mean = 0.0, second = 0.0;
    for (int n = 0; n < 3000; ++n) {
      mean += n * thermal_pmf(n, m);
      second += double(n) * n * thermal_pmf(n, m);
    }
    const TaylorJet g = g_th_jet(m);
    EXPECT_NEAR(g.constant_term(), 1.0, 1e-15);
    EXPECT_NEAR(g.coeff(1, 0, 0), m, 1e-14);
    EXPECT_NEAR(extract_moment(g, 1, 0), mean, 1e-10);
    EXPECT_NEAR(extract_moment(g, 2, 0), second, 1e-9);
  }
  EXPECT_NEAR(extract_moment(g_th_jet(1.0), 2, 0), 3.0, 1e-14);
  EXPECT_THROW(g_th_jet(-0.1), DomainError);
}

TEST(SplitModeJet, BucketMarginalIsThermal) {
  for (double T : {0.0, 0.4, 1.0})
    for (double nbar : {0.5, 1.0, 2.0}) {
      const TaylorJet gk = g_k_jet(T, nbar);
      const TaylorJet th = g_th_jet(T * nbar);
      for (int i = 0; i <= 2; ++i) EXPECT_NEAR(gk.coeff(i, 0, 0), th.coeff(i, 0, 0), 1e-14);
    }
}

TEST(SplitModeJet, FirstAndMixedMoments) {
  const TaylorJet g = g_k_jet(0.5, 1.0);
  EXPECT_NEAR(extract_moment(g, 1, 0), 0.5, 1e-15);
  EXPECT_NEAR(extract_moment(g, 0, 1), 1.0, 1e-15);
  EXPECT_NEAR(extract_moment(g_k_jet(1.0, 1.0), 1, 1), 2.0, 1e-14);
  EXPECT_THROW(g_k_jet(1.2, 1.0), DomainError);
}

TEST(SplitModeJet, MomentsMatchSingleModeLaw) {
  const double T = 0.6, nbar = 0.8;
  const TaylorJet g = g_k_jet(T, nbar);
  const auto src = ThermalParam::arm_mean(nbar);
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b) {
      double s = 0.0;
      for (int n1 = 0; n1 < 200; ++n1)
        for (int n2 = 0; n2 < 200; ++n2)
          s += std::pow(n1, a) * std::pow(n2, b) * single_mode_joint(n1, n2, Transmittivity(T), src);
      EXPECT_NEAR(extract_moment(g, a, b), s, 1e-10 * std::max(1.0, s)) << a << b;
    }
}

TEST(MgfProduct, SingleModeReducesToSplitFactor) {
  const std::vector<double> T{0.7};
  EXPECT_EQ(mgf_product(0, T, 1.3), g_k_jet(0.7, 1.3));
}

TEST(MgfProduct, ClosedFormFirstMomentAndCovariance) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t K = 1 + trial % 7;
    std::vector<double> T(K);
    for (double& t : T) t = u(rng);
    const double nbar = 0.1 + 2.0 * u(rng);
    const std::size_t k = trial % K;
    const TaylorJet g = mgf_product(k, T, nbar);
    const double sum_T = std::accumulate(T.begin(), T.end(), 0.0);
    const double m1 = extract_moment(g, 1, 0), m2 = extract_moment(g, 0, 1);
    EXPECT_NEAR(g.constant_term(), 1.0, 1e-14);
    EXPECT_NEAR(m1, nbar * sum_T, 1e-12);
    EXPECT_NEAR(m2, nbar, 1e-13);
    EXPECT_NEAR(extract_moment(g, 1, 1) - m1 * m2, nbar * nbar * T[k], 1e-12);
  }
  const std::vector<double> half{0.5, 0.5};
  EXPECT_NEAR(extract_moment(mgf_product(0, half, 1.0), 1, 0), 1.0, 1e-15);
  EXPECT_THROW(mgf_product(2, half, 1.0), ContractViolation);
}

TEST(ExtractMoment, NormalizationAndOrderGuard) {
  const std::vector<double> T{0.2, 0.9, 0.4};
  EXPECT_NEAR(extract_moment(mgf_product(1, T, 1.0), 0, 0), 1.0, 1e-15);
  EXPECT_NEAR(extract_moment(g_th_jet(1.0), 1, 0), 1.0, 1e-15);
  EXPECT_THROW(extract_moment(g_th_jet(1.0), 3, 0), ContractViolation);
  EXPECT_THROW(extract_moment(g_th_jet(1.0), 0, -1), ContractViolation);
}

TEST(CorrelationStats, DerivativeIsTwoNbarSquared) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t K = 1 + trial % 5;
    std::vector<double> T(K);
    for (double& t : T) t = u(rng);
    const double nbar = 2.0 * u(rng);
    const std::size_t k = trial % K;
    const MomentSet m = correlation_stats(k, T, nbar);
    EXPECT_NEAR(m.dc12_dT, 2.0 * nbar * nbar, 1e-12);

    const double h = 1e-6;
    std::vector<double> up = T, down = T;
    up[k] += h;
    down[k] -= h;
    const double fd = (correlation_stats(k, up, nbar).c12 - correlation_stats(k, down, nbar).c12) / (2 * h);
    EXPECT_NEAR(fd, m.dc12_dT, 1e-6 * m.dc12_dT);
  }
}

TEST(CorrelationStats, VarianceKernelNonNegative) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t K = 1 + trial % 5;
    std::vector<double> T(K);
    for (double& t : T) t = u(rng);
    const MomentSet m = correlation_stats(trial % K, T, 3.0 * u(rng));
    EXPECT_GE(m.n1sq_n2sq, m.c12 * m.c12);
    EXPECT_GE(m.var_c12, 0.0);
    EXPECT_GE(m.mean_n1, 0.0);
  }
}

TEST(CorrelationStats, UnitTransmissionSingleMode) {
  const std::vector<double> T{1.0};
  EXPECT_NEAR(correlation_stats(0, T, 1.0).c12, 2.0, 1e-14);
}

TEST(CorrelationStats, CrossCorrelationExceedsOne) {
  const std::vector<double> T{0.1, 0.5, 0.9, 0.3};
  const double sum_T = 1.8;
  for (std::size_t k = 0; k < T.size(); ++k) {
    const MomentSet m = correlation_stats(k, T, 0.7);
    const double g2 = m.c12 / (m.mean_n1 * m.mean_n2);
    EXPECT_NEAR(g2, 1.0 + T[k] / sum_T, 1e-10);
    EXPECT_GT(g2, 1.0);
  }
}
