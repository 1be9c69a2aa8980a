// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "ghostmetro/errors.hpp"

namespace ghostmetro {

/// Truncated power series in three variables x, y, t with degrees
/// x <= 2, y <= 2, t <= 1. x and y are the generating-function arguments of
/// the two detectors; t seeds a derivative with respect to one parameter.
///
/// Products truncate per variable, so the algebra is exact on the retained
/// coefficients.
class TaylorJet {
public:
  static constexpr int kMaxX = 2;
  static constexpr int kMaxY = 2;
  static constexpr int kMaxT = 1;
  static constexpr std::size_t kSize = (kMaxX + 1) * (kMaxY + 1) * (kMaxT + 1);

  TaylorJet() { c_.fill(0.0); }

  static TaylorJet constant(double v) {
    TaylorJet j;
    j.c_[0] = v;
    return j;
  }
  static TaylorJet x() { return monomial(1, 0, 0); }
  static TaylorJet y() { return monomial(0, 1, 0); }
  static TaylorJet t() { return monomial(0, 0, 1); }

  static TaylorJet monomial(int i, int j, int l, double v = 1.0) {
    TaylorJet r;
    r.coeff(i, j, l) = v;
    return r;
  }

  double& coeff(int i, int j, int l) {
    check(i, j, l);
    return c_[index(i, j, l)];
  }
  double coeff(int i, int j, int l) const {
    check(i, j, l);
    return c_[index(i, j, l)];
  }

  double constant_term() const noexcept { return c_[0]; }

  TaylorJet& operator+=(const TaylorJet& o) {
    for (std::size_t n = 0; n < kSize; ++n) c_[n] += o.c_[n];
    return *this;
  }
  TaylorJet& operator-=(const TaylorJet& o) {
    for (std::size_t n = 0; n < kSize; ++n) c_[n] -= o.c_[n];
    return *this;
  }
  TaylorJet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  TaylorJet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  TaylorJet& operator*=(const TaylorJet& o) { return *this = *this * o; }

  friend TaylorJet operator*(const TaylorJet& a, const TaylorJet& b) {
    TaylorJet r;
    for (int i = 0; i <= kMaxX; ++i)
      for (int j = 0; j <= kMaxY; ++j)
        for (int l = 0; l <= kMaxT; ++l) {
          const double av = a.c_[index(i, j, l)];
          if (av == 0.0) continue;
          for (int p = 0; p + i <= kMaxX; ++p)
            for (int q = 0; q + j <= kMaxY; ++q)
              for (int s = 0; s + l <= kMaxT; ++s)
                r.c_[index(i + p, j + q, l + s)] += av * b.c_[index(p, q, s)];
        }
    return r;
  }

  friend TaylorJet operator+(TaylorJet a, const TaylorJet& b) { return a += b; }
  friend TaylorJet operator-(TaylorJet a, const TaylorJet& b) { return a -= b; }
  friend TaylorJet operator*(TaylorJet a, double s) { return a *= s; }
  friend TaylorJet operator*(double s, TaylorJet a) { return a *= s; }
  friend TaylorJet operator+(TaylorJet a, double s) { return a += s; }
  friend TaylorJet operator+(double s, TaylorJet a) { return a += s; }
  friend TaylorJet operator-(TaylorJet a) { return a *= -1.0; }
  friend TaylorJet operator-(double s, const TaylorJet& a) { return -a + s; }

  /// 1/jet via the Neumann series of 1/(1+u) with u nilpotent of order
  /// kMaxX + kMaxY + kMaxT + 1.
  TaylorJet reciprocal() const {
    const double c0 = c_[0];
    if (c0 == 0.0) throw DomainError("reciprocal of a jet with zero constant term");
    TaylorJet u = *this * (1.0 / c0);
    u.c_[0] = 0.0;
    TaylorJet sum = constant(1.0);
    TaylorJet power = constant(1.0);
    for (int n = 1; n <= kMaxDegree; ++n) {
      power = power * u * -1.0;
      sum += power;
    }
    return sum * (1.0 / c0);
  }

  friend TaylorJet exp(const TaylorJet& a) {
    TaylorJet u = a;
    u.c_[0] = 0.0;
    TaylorJet sum = constant(1.0);
    TaylorJet power = constant(1.0);
    double factorial = 1.0;
    for (int n = 1; n <= kMaxDegree; ++n) {
      power = power * u;
      factorial *= n;
      sum += power * (1.0 / factorial);
    }
    return sum * std::exp(a.c_[0]);
  }

  friend bool operator==(const TaylorJet&, const TaylorJet&) = default;

private:
  static constexpr int kMaxDegree = kMaxX + kMaxY + kMaxT;

  static constexpr std::size_t index(int i, int j, int l) noexcept {
    return static_cast<std::size_t>((i * (kMaxY + 1) + j) * (kMaxT + 1) + l);
  }
  static void check(int i, int j, int l) {
    if (i < 0 || j < 0 || l < 0 || i > kMaxX || j > kMaxY || l > kMaxT)
      throw ContractViolation("jet coefficient index beyond truncation order");
  }

  std::array<double, kSize> c_;
};

}  // namespace ghostmetro
