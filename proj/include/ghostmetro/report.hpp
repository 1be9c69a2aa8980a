// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ghostmetro/counts.hpp"
#include "ghostmetro/metrology.hpp"
#include "ghostmetro/montecarlo.hpp"
#include "ghostmetro/profile.hpp"

namespace ghostmetro {

inline constexpr const char* kVersion = "1.0.0";

/// How photon budgets are assigned to modes when counts are available.
enum class BudgetMode {
  per_mode,  ///< N_tot,k = N_k / eta for each mode
  shared,    ///< every mode gets sum_k N_k / (eta K)
};

struct ComparisonOptions {
  double nbar = 1.0;
  double eta = 0.35;
  std::optional<double> n_tot;  ///< fixed N_tot for every mode; overrides counts
  BudgetMode budget = BudgetMode::per_mode;
  CompareOptions compare{};
  std::uint64_t seed = 0;       ///< recorded; only synthetic inputs consume it
  std::string source;           ///< free-form input description
};

struct ComparisonReport {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<double> wavelengths;
  std::vector<ComparisonRow> rows;
  std::vector<bool> no_heralds;
};

namespace detail {

inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline ComparisonReport assemble(const TransmissionProfile& profile, const std::vector<ResourceBudget>& budgets,
                                 const ComparisonOptions& opt, std::string budget_label) {
  ComparisonReport r;
  r.wavelengths.assign(profile.wavelengths().begin(), profile.wavelengths().end());
  r.rows = compare_modes(profile.values(), budgets, opt.compare);
  r.no_heralds.assign(r.rows.size(), false);
  const auto& t = opt.compare.trunc;
  r.metadata = {
      {"version", kVersion},
      {"rng", kRngIdentity},
      {"seed", std::to_string(opt.seed)},
      {"source", opt.source},
      {"modes", std::to_string(profile.modes())},
      {"nbar", fmt17(opt.nbar)},
      {"eta", fmt17(opt.eta)},
      {"n_tot", std::move(budget_label)},
      {"eps", fmt17(opt.compare.eps)},
      {"tol", t.window ? "window" : fmt17(t.tol)},
      {"with_crb", opt.compare.with_crb ? "true" : "false"},
  };
  return r;
}

}  // namespace detail

/// Comparison for a known profile at one N_tot per mode (default 1e4).
inline ComparisonReport run_comparison(const TransmissionProfile& profile, const ComparisonOptions& opt) {
  const double n_tot = opt.n_tot.value_or(1e4);
  const std::vector<ResourceBudget> budgets(profile.modes(), ResourceBudget(n_tot, opt.eta, opt.nbar));
  return detail::assemble(profile, budgets, opt, detail::fmt17(n_tot));
}

/// Comparison driven by measured counts: T_k from the Klyshko ratio and the
/// budgets from the heralds. Modes without heralds are kept with T = 0 and
/// a one-herald budget, and reported with the no_heralds flag.
inline ComparisonReport run_comparison(const std::vector<CountRecord>& counts, const ComparisonOptions& opt) {
  if (counts.empty()) throw ContractViolation("no count records to compare");
  const TransmissionProfile profile = klyshko_profile(counts);
  std::vector<ResourceBudget> budgets;
  std::string label;
  if (opt.n_tot) {
    budgets.assign(counts.size(), ResourceBudget(*opt.n_tot, opt.eta, opt.nbar));
    label = detail::fmt17(*opt.n_tot);
  } else if (opt.budget == BudgetMode::shared) {
    double total = 0.0;
    for (const auto& c : counts) total += static_cast<double>(c.singles);
    const double per_mode = std::max(total, 1.0) / (opt.eta * static_cast<double>(counts.size()));
    budgets.assign(counts.size(), ResourceBudget(per_mode, opt.eta, opt.nbar));
    label = "shared:" + detail::fmt17(per_mode);
  } else {
    for (const auto& c : counts)
      budgets.push_back(ResourceBudget::from_heralds(static_cast<double>(std::max<std::int64_t>(c.singles, 1)),
                                                     opt.eta, opt.nbar));
    label = "per_mode";
  }
  ComparisonReport r = detail::assemble(profile, budgets, opt, std::move(label));
  for (std::size_t k = 0; k < counts.size(); ++k) r.no_heralds[k] = counts[k].singles == 0;
  return r;
}

inline std::string row_flags(const ComparisonReport& r, std::size_t k) {
  std::string f = r.rows[k].flags();
  if (r.no_heralds[k]) f += f.empty() ? "no_heralds" : "|no_heralds";
  return f;
}

/// CSV: '# key=value' metadata lines, then one row per mode (k is 1-based).
inline std::string format_report_csv(const ComparisonReport& r) {
  std::string out;
  for (const auto& [key, value] : r.metadata) out += "# " + key + "=" + value + "\n";
  out += "k,T,var_quantum,var_classical_prop,var_classical_crb,fisher,flags\n";
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const ComparisonRow& row = r.rows[k];
    out += std::to_string(row.k + 1) + ',' + detail::fmt17(row.T) + ',' + detail::fmt17(row.var_quantum) + ',' +
           detail::fmt17(row.var_classical_prop) + ',' + detail::fmt17(row.var_classical_crb) + ',' +
           detail::fmt17(row.fisher) + ',' + row_flags(r, k) + '\n';
  }
  return out;
}

inline std::string format_report_json(const ComparisonReport& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : r.metadata) meta[key] = value;
  j["metadata"] = meta;
  auto num = [](double v) -> nlohmann::ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return v;
  };
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const ComparisonRow& row = r.rows[k];
    rows.push_back({{"k", row.k + 1},
                    {"wavelength_nm", num(r.wavelengths[k])},
                    {"T", num(row.T)},
                    {"var_quantum", num(row.var_quantum)},
                    {"var_classical_prop", num(row.var_classical_prop)},
                    {"var_classical_crb", num(row.var_classical_crb)},
                    {"fisher", num(row.fisher)},
                    {"n_tot", num(row.n_tot)},
                    {"tail_mass", num(row.tail_mass)},
                    {"eps", num(row.eps)},
                    {"flags", row_flags(r, k)}});
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

/// Writes to a sibling temporary file and renames it over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ghostmetro
