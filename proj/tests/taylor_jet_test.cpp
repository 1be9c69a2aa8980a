// SPDX-License-Identifier: Apache-2.0
#include <random>

#include <gtest/gtest.h>

#include "ghostmetro/taylor_jet.hpp"

using ghostmetro::TaylorJet;

namespace {

TaylorJet random_jet(std::mt19937_64& rng, double c0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TaylorJet j;
  for (int i = 0; i <= TaylorJet::kMaxX; ++i)
    for (int k = 0; k <= TaylorJet::kMaxY; ++k)
      for (int l = 0; l <= TaylorJet::kMaxT; ++l) j.coeff(i, k, l) = u(rng);
  j.coeff(0, 0, 0) = c0;
  return j;
}

void expect_close(const TaylorJet& a, const TaylorJet& b, double tol) {
  for (int i = 0; i <= TaylorJet::kMaxX; ++i)
    for (int k = 0; k <= TaylorJet::kMaxY; ++k)
      for (int l = 0; l <= TaylorJet::kMaxT; ++l)
        EXPECT_NEAR(a.coeff(i, k, l), b.coeff(i, k, l), tol) << i << k << l;
}

}  // namespace

TEST(TaylorJet, MultiplicationIsAssociative) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 50; ++n) {
    const TaylorJet a = random_jet(rng, 1.0), b = random_jet(rng, 1.0), c = random_jet(rng, 1.0);
    expect_close((a * b) * c, a * (b * c), 1e-13);
  }
}

TEST(TaylorJet, ReciprocalInvertsUnitJets) {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 50; ++n) {
    const TaylorJet a = random_jet(rng, 1.0);
    expect_close(a.reciprocal() * a, TaylorJet::constant(1.0), 1e-13);
  }
  const TaylorJet scaled = random_jet(rng, -2.5);
  expect_close(scaled * scaled.reciprocal(), TaylorJet::constant(1.0), 1e-13);
}

TEST(TaylorJet, TruncatesPerVariable) {
  const TaylorJet x2 = TaylorJet::x() * TaylorJet::x();
  EXPECT_EQ(x2.coeff(2, 0, 0), 1.0);
  const TaylorJet x3 = x2 * TaylorJet::x();
  EXPECT_EQ(x3, TaylorJet());
  const TaylorJet tt = TaylorJet::t() * TaylorJet::t();
  EXPECT_EQ(tt, TaylorJet());
  EXPECT_EQ((x2 * TaylorJet::y() * TaylorJet::t()).coeff(2, 1, 1), 1.0);
}

TEST(TaylorJet, ExponentialCoefficients) {
  const TaylorJet e = exp(TaylorJet::x() + TaylorJet::y());
  EXPECT_DOUBLE_EQ(e.coeff(0, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(e.coeff(1, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(e.coeff(2, 0, 0), 0.5);
  EXPECT_DOUBLE_EQ(e.coeff(1, 1, 0), 1.0);
  EXPECT_DOUBLE_EQ(e.coeff(2, 2, 0), 0.25);
  EXPECT_EQ(e.coeff(1, 1, 1), 0.0);
  const TaylorJet shifted = exp(TaylorJet::constant(0.3) + TaylorJet::t());
  EXPECT_NEAR(shifted.coeff(0, 0, 1), std::exp(0.3), 1e-15);
}

TEST(TaylorJet, GuardsIndicesAndZeroConstant) {
  TaylorJet j;
  EXPECT_THROW(j.coeff(3, 0, 0), ghostmetro::ContractViolation);
  EXPECT_THROW(j.coeff(0, 0, 2), ghostmetro::ContractViolation);
  EXPECT_THROW(TaylorJet::x().reciprocal(), ghostmetro::DomainError);
}
