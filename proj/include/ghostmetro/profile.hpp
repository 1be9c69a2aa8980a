// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ghostmetro/errors.hpp"

namespace ghostmetro {

/// Transmittivity sampled on a strictly increasing wavelength grid (nm).
/// Each grid point is one spectral mode.
class TransmissionProfile {
public:
  TransmissionProfile() = default;
  TransmissionProfile(std::vector<double> wavelength_nm, std::vector<double> T)
      : wavelength_(std::move(wavelength_nm)), T_(std::move(T)) {
    if (wavelength_.size() != T_.size())
      throw ContractViolation("wavelength grid and transmittivities differ in length");
    for (std::size_t i = 0; i < T_.size(); ++i) {
      if (!(T_[i] >= 0.0 && T_[i] <= 1.0))
        throw DomainError("transmittivity out of [0, 1] at point " + std::to_string(i + 1));
      if (i > 0 && !(wavelength_[i] > wavelength_[i - 1]))
        throw DomainError("wavelength grid must be strictly increasing");
    }
  }

  std::size_t modes() const noexcept { return T_.size(); }
  std::span<const double> wavelengths() const noexcept { return wavelength_; }
  std::span<const double> values() const noexcept { return T_; }

private:
  std::vector<double> wavelength_;
  std::vector<double> T_;
};

/// Parameters of a flat-topped filter, T = peak exp(-ln2 (2 d / fwhm)^(2 order)).
struct SupergaussianFilter {
  double center_nm = 810.0;
  double fwhm_nm = 7.3;
  int order = 4;
  double peak_T = 0.5;

  void validate() const {
    if (!(fwhm_nm > 0.0)) throw DomainError("FWHM must be > 0");
    if (order < 1) throw DomainError("supergaussian order must be >= 1");
    if (!(peak_T > 0.0 && peak_T <= 1.0)) throw DomainError("peak transmittivity must lie in (0, 1]");
  }

  double operator()(double wavelength_nm) const {
    const double u = 2.0 * (wavelength_nm - center_nm) / fwhm_nm;
    return peak_T * std::exp(-std::numbers::ln2 * std::pow(u * u, order));
  }
};

/// n points at the given spacing, centered on center_nm.
inline std::vector<double> uniform_grid(double center_nm, std::size_t n, double spacing_nm) {
  if (n == 0) throw DomainError("grid needs at least one point");
  if (!(spacing_nm > 0.0)) throw DomainError("grid spacing must be > 0");
  std::vector<double> g(n);
  const double first = center_nm - 0.5 * spacing_nm * static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = first + spacing_nm * static_cast<double>(i);
  return g;
}

inline TransmissionProfile supergaussian_profile(const SupergaussianFilter& f, std::span<const double> grid) {
  f.validate();
  std::vector<double> T(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) T[i] = f(grid[i]);
  return TransmissionProfile({grid.begin(), grid.end()}, std::move(T));
}

/// K equal-width modes tiling [center - span/2, center + span/2]; each
/// mode's transmittivity is the filter averaged over `oversample` evenly
/// spaced points in its bin. Used when K does not divide the point count.
inline TransmissionProfile binned_supergaussian(const SupergaussianFilter& f, double span_nm,
                                                std::size_t K, std::size_t oversample = 64) {
  f.validate();
  if (K == 0 || oversample == 0) throw DomainError("binning needs K >= 1 and oversample >= 1");
  if (!(span_nm > 0.0)) throw DomainError("span must be > 0");
  const double width = span_nm / static_cast<double>(K);
  const double start = f.center_nm - 0.5 * span_nm;
  std::vector<double> centers(K), T(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double lo = start + width * static_cast<double>(k);
    centers[k] = lo + 0.5 * width;
    double s = 0.0;
    for (std::size_t i = 0; i < oversample; ++i)
      s += f(lo + width * (static_cast<double>(i) + 0.5) / static_cast<double>(oversample));
    T[k] = s / static_cast<double>(oversample);
  }
  return TransmissionProfile(std::move(centers), std::move(T));
}

inline std::vector<std::size_t> divisors(std::size_t n) {
  std::vector<std::size_t> d;
  for (std::size_t i = 1; i <= n; ++i)
    if (n % i == 0) d.push_back(i);
  return d;
}

namespace detail {

inline void require_divisor(std::size_t points, std::size_t j) {
  if (j == 0 || points == 0 || points % j != 0) {
    std::string list;
    for (std::size_t d : divisors(points)) list += (list.empty() ? "" : ", ") + std::to_string(d);
    throw DomainError("group size " + std::to_string(j) + " does not divide " + std::to_string(points) +
                      " points; valid sizes: " + list);
  }
}

}  // namespace detail

/// Groups of j neighbouring points become one mode; wavelength and
/// transmittivity are plain group means. K = points / j.
inline TransmissionProfile rebin(const TransmissionProfile& p, std::size_t j) {
  detail::require_divisor(p.modes(), j);
  const std::size_t K = p.modes() / j;
  std::vector<double> w(K, 0.0), T(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < j; ++i) {
      w[k] += p.wavelengths()[k * j + i];
      T[k] += p.values()[k * j + i];
    }
    w[k] /= static_cast<double>(j);
    T[k] /= static_cast<double>(j);
  }
  return TransmissionProfile(std::move(w), std::move(T));
}

}  // namespace ghostmetro
