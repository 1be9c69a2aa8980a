// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ghostmetro/errors.hpp"
#include "ghostmetro/metrology.hpp"
#include "ghostmetro/montecarlo.hpp"
#include "ghostmetro/profile.hpp"

namespace ghostmetro {

inline constexpr std::string_view kCountsHeader = "wavelength_nm,coincidences,singles,window_s";

/// One spectrometer position: heralds N and coincidences C over a window.
struct CountRecord {
  double wavelength_nm = 0.0;
  std::int64_t coincidences = 0;
  std::int64_t singles = 0;
  double window_s = 0.0;

  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

struct CountData {
  std::vector<CountRecord> records;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(const std::string& s, std::size_t line, const char* what) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw ParseError(std::string("bad ") + what + " '" + s + "'", line);
  return v;
}

inline std::int64_t parse_count(const std::string& s, std::size_t line, const char* what) {
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || v < 0)
    throw ParseError(std::string("bad ") + what + " '" + s + "'", line);
  return v;
}

}  // namespace detail

/// Reads a counts CSV. Rows must follow a strictly increasing wavelength
/// grid and satisfy 0 <= C <= N.
inline CountData parse_counts(std::istream& in) {
  CountData data;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = detail::trim(line);
    if (row.empty() || row.front() == '#') continue;
    if (!header_seen) {
      if (row != kCountsHeader)
        throw ParseError("expected header '" + std::string(kCountsHeader) + "'", line_no);
      header_seen = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(row);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(detail::trim(cell));
    if (f.size() != 4) throw ParseError("expected 4 fields, got " + std::to_string(f.size()), line_no);
    CountRecord r;
    r.wavelength_nm = detail::parse_real(f[0], line_no, "wavelength");
    r.coincidences = detail::parse_count(f[1], line_no, "coincidence count");
    r.singles = detail::parse_count(f[2], line_no, "singles count");
    r.window_s = detail::parse_real(f[3], line_no, "window");
    if (r.coincidences > r.singles) throw ParseError("coincidences exceed singles", line_no);
    if (r.window_s < 0.0) throw ParseError("negative acquisition window", line_no);
    if (!data.records.empty() && !(r.wavelength_nm > data.records.back().wavelength_nm))
      throw ParseError("wavelength grid is not strictly increasing", line_no);
    data.records.push_back(r);
  }
  if (data.records.empty()) data.warnings.emplace_back("counts file holds no records");
  return data;
}

inline CountData load_counts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  return parse_counts(in);
}

inline std::string format_counts(const std::vector<CountRecord>& records) {
  std::ostringstream out;
  out.precision(17);
  out << kCountsHeader << '\n';
  for (const auto& r : records)
    out << r.wavelength_nm << ',' << r.coincidences << ',' << r.singles << ',' << r.window_s << '\n';
  return out.str();
}

/// Sums counts over groups of j points; the group wavelength is the mean
/// and the window is shared (points are assumed acquired with equal windows).
inline std::vector<CountRecord> rebin(const std::vector<CountRecord>& records, std::size_t j) {
  detail::require_divisor(records.size(), j);
  std::vector<CountRecord> out(records.size() / j);
  for (std::size_t k = 0; k < out.size(); ++k) {
    double w = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      const CountRecord& r = records[k * j + i];
      w += r.wavelength_nm;
      out[k].coincidences += r.coincidences;
      out[k].singles += r.singles;
      out[k].window_s = std::max(out[k].window_s, r.window_s);
    }
    out[k].wavelength_nm = w / static_cast<double>(j);
  }
  return out;
}

/// Klyshko transmittivities T_k = C_k / N_k; modes without heralds get 0.
inline TransmissionProfile klyshko_profile(const std::vector<CountRecord>& records) {
  std::vector<double> w, T;
  for (const auto& r : records) {
    w.push_back(r.wavelength_nm);
    T.push_back(r.singles > 0 ? klyshko_estimate(r.coincidences, r.singles).transmittivity : 0.0);
  }
  return TransmissionProfile(std::move(w), std::move(T));
}

inline std::vector<CountRecord> counts_from_run(const QuantumRunSummary& run, std::span<const double> grid,
                                                double window_s) {
  if (grid.size() != run.singles.size()) throw ContractViolation("grid and run differ in mode count");
  std::vector<CountRecord> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    out[k] = {grid[k], static_cast<std::int64_t>(run.coincidences[k]),
              static_cast<std::int64_t>(run.singles[k]), window_s};
  return out;
}


/// Synthetic acquisition: runs the pair simulator over the profile's grid
/// with uniform mode occupancy, sizing the pair count so that the
/// brightest point expects `peak_coincidences` coincidences.
inline std::vector<CountRecord> synthesize_counts(const TransmissionProfile& profile, double eta,
                                                  double peak_coincidences, double window_s,
                                                  std::uint64_t seed) {
  if (profile.modes() == 0) throw ContractViolation("profile has no points");
  double peak = 0.0;
  for (double t : profile.values()) peak = std::max(peak, t);
  if (!(peak > 0.0)) throw DomainError("profile transmits nothing");
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
  RunConfig cfg;
  cfg.transmittivities.assign(profile.values().begin(), profile.values().end());
  cfg.eta = eta;
  cfg.seed = seed;
  cfg.pairs = static_cast<std::uint64_t>(
      std::ceil(peak_coincidences / (peak * eta) * static_cast<double>(profile.modes())));
  const QuantumRunSummary run = simulate_quantum_run(cfg);
  return counts_from_run(run, profile.wavelengths(), window_s);
}

inline constexpr std::string_view kProfileHeader = "wavelength_nm,T";

/// Reads a profile CSV with header wavelength_nm,T.
inline TransmissionProfile parse_profile(std::istream& in) {
  std::vector<double> w, T;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = detail::trim(line);
    if (row.empty() || row.front() == '#') continue;
    if (!header_seen) {
      if (row != kProfileHeader) throw ParseError("expected header '" + std::string(kProfileHeader) + "'", line_no);
      header_seen = true;
      continue;
    }
    const auto comma = row.find(',');
    if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos)
      throw ParseError("expected 2 fields", line_no);
    w.push_back(detail::parse_real(detail::trim(row.substr(0, comma)), line_no, "wavelength"));
    T.push_back(detail::parse_real(detail::trim(row.substr(comma + 1)), line_no, "transmittivity"));
    if (!(T.back() >= 0.0 && T.back() <= 1.0)) throw ParseError("transmittivity outside [0, 1]", line_no);
    if (w.size() > 1 && !(w.back() > w[w.size() - 2]))
      throw ParseError("wavelength grid is not strictly increasing", line_no);
  }
  return TransmissionProfile(std::move(w), std::move(T));
}

inline TransmissionProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  return parse_profile(in);
}

inline std::string format_profile(const TransmissionProfile& p) {
  std::ostringstream out;
  out.precision(17);
  out << kProfileHeader << '\n';
  for (std::size_t i = 0; i < p.modes(); ++i) out << p.wavelengths()[i] << ',' << p.values()[i] << '\n';
  return out.str();
}

}  // namespace ghostmetro
