// SPDX-License-Identifier: Apache-2.0
//
// ghostmetro: command-line front end for the ghost spectrometry precision
// library. Subcommands: profile, simulate, estimate, classical, crb, compare.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ghostmetro/ghostmetro.hpp"

namespace gm = ghostmetro;

namespace {

struct CommonOptions {
  std::size_t modes = 0;  // 0: keep the native grid
  std::size_t rebin = 0;
  double nbar = 1.0;
  double eta = 0.35;
  std::optional<double> ntot;
  double eps = 1e-7;
  double tol = 1e-12;
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string out;
  unsigned threads = 0;
  std::string budget = "per_mode";

  std::string counts_path;
  std::string profile_path;
  gm::SupergaussianFilter filter{};
  std::size_t points = 100;
  double spacing = 0.33;
  double peak_coincidences = 5500.0;
  double window = 5.0;
};

/// Column-oriented output rendered as CSV or JSON.
struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string render(const std::string& format) const {
    if (format == "json") {
      nlohmann::ordered_json j;
      nlohmann::ordered_json meta = nlohmann::ordered_json::object();
      for (const auto& [k, v] : metadata) meta[k] = v;
      j["metadata"] = meta;
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : rows) {
        nlohmann::ordered_json o;
        for (std::size_t c = 0; c < columns.size(); ++c) o[columns[c]] = r[c];
        arr.push_back(o);
      }
      j["rows"] = arr;
      return j.dump(2) + "\n";
    }
    std::string s;
    for (const auto& [k, v] : metadata) s += "# " + k + "=" + v + "\n";
    for (std::size_t c = 0; c < columns.size(); ++c) s += (c ? "," : "") + columns[c];
    s += "\n";
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) s += (c ? "," : "") + r[c];
      s += "\n";
    }
    return s;
  }
};

std::string num(double v) { return gm::detail::fmt17(v); }

void emit(const CommonOptions& o, const std::string& content) {
  if (o.out.empty() || o.out == "-")
    std::cout << content;
  else
    gm::write_file_atomic(o.out, content);
}

std::size_t group_size(const CommonOptions& o, std::size_t points) {
  if (o.rebin && o.modes && o.rebin * o.modes != points)
    throw gm::DomainError("--rebin and --modes disagree for " + std::to_string(points) + " points");
  if (o.rebin) return o.rebin;
  if (o.modes) {
    if (points % o.modes != 0) {
      std::string valid;
      for (std::size_t d : gm::divisors(points)) valid += (valid.empty() ? "" : ", ") + std::to_string(d);
      throw gm::DomainError("K = " + std::to_string(o.modes) + " does not divide " + std::to_string(points) +
                            " points; valid K: " + valid);
    }
    return points / o.modes;
  }
  return 1;
}

gm::TransmissionProfile fine_profile(const CommonOptions& o) {
  if (!o.profile_path.empty()) return gm::load_profile(o.profile_path);
  return gm::supergaussian_profile(o.filter, gm::uniform_grid(o.filter.center_nm, o.points, o.spacing));
}

/// Profile at the requested mode count. A synthetic filter whose K does not
/// divide the point count is binned over the grid span instead of regrouped.
gm::TransmissionProfile resolve_profile(const CommonOptions& o, std::string& source) {
  if (o.profile_path.empty() && o.modes && o.points % o.modes != 0 && !o.rebin) {
    source = "supergaussian-binned";
    return gm::binned_supergaussian(o.filter, o.spacing * static_cast<double>(o.points), o.modes);
  }
  const gm::TransmissionProfile fine = fine_profile(o);
  source = o.profile_path.empty() ? "supergaussian" : "profile:" + o.profile_path;
  return gm::rebin(fine, group_size(o, fine.modes()));
}

std::vector<gm::CountRecord> resolve_counts(const CommonOptions& o, std::string& source) {
  std::vector<gm::CountRecord> fine;
  if (!o.counts_path.empty()) {
    gm::CountData data = gm::load_counts(o.counts_path);
    for (const auto& w : data.warnings) std::cerr << "warning: " << w << "\n";
    fine = std::move(data.records);
    source = "counts:" + o.counts_path;
  } else {
    fine = gm::synthesize_counts(fine_profile(o), o.eta, o.peak_coincidences, o.window, o.seed);
    source = "synthetic-counts";
  }
  if (fine.empty()) return fine;
  return gm::rebin(fine, group_size(o, fine.size()));
}

gm::ComparisonOptions comparison_options(const CommonOptions& o, bool with_crb, std::size_t max_modes) {
  gm::ComparisonOptions c;
  c.nbar = o.nbar;
  c.eta = o.eta;
  c.n_tot = o.ntot;
  c.budget = o.budget == "shared" ? gm::BudgetMode::shared : gm::BudgetMode::per_mode;
  c.seed = o.seed;
  c.compare.trunc = gm::TruncationSpec::tolerance(o.tol);
  c.compare.with_crb = with_crb;
  c.compare.eps = o.eps;
  c.compare.max_crb_modes = max_modes;
  c.compare.threads = o.threads;
  return c;
}

void run_profile(const CommonOptions& o) {
  std::string source;
  const gm::TransmissionProfile p = resolve_profile(o, source);
  Table t;
  t.metadata = {{"version", gm::kVersion}, {"source", source}, {"modes", std::to_string(p.modes())}};
  t.columns = {"wavelength_nm", "T"};
  for (std::size_t i = 0; i < p.modes(); ++i) t.rows.push_back({num(p.wavelengths()[i]), num(p.values()[i])});
  emit(o, o.format == "json" ? t.render("json") : gm::format_profile(p));
}

void run_simulate(const CommonOptions& o, const std::string& scheme, std::uint64_t reps, std::uint64_t pairs,
                  const std::string& records) {
  std::string source;
  if (scheme == "quantum") {
    const gm::TransmissionProfile fine = fine_profile(o);
    std::vector<gm::CountRecord> counts;
    if (pairs) {
      gm::RunConfig cfg;
      cfg.transmittivities.assign(fine.values().begin(), fine.values().end());
      cfg.eta = o.eta;
      cfg.pairs = pairs;
      cfg.seed = o.seed;
      cfg.threads = o.threads;
      counts = gm::counts_from_run(gm::simulate_quantum_run(cfg), fine.wavelengths(), o.window);
    } else {
      counts = gm::synthesize_counts(fine, o.eta, o.peak_coincidences, o.window, o.seed);
    }
    counts = gm::rebin(counts, group_size(o, counts.size()));
    emit(o, gm::format_counts(counts));
    return;
  }
  const gm::TransmissionProfile p = resolve_profile(o, source);
  gm::RunConfig cfg;
  cfg.transmittivities.assign(p.values().begin(), p.values().end());
  cfg.nbar = o.nbar;
  cfg.repetitions = reps;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  if (!records.empty()) gm::dump_classical_records(cfg, records);
  const gm::ClassicalRunSummary run = gm::simulate_classical_run(cfg);
  Table t;
  t.metadata = {{"version", gm::kVersion}, {"rng", gm::kRngIdentity}, {"seed", std::to_string(o.seed)},
                {"source", source},        {"nbar", num(o.nbar)},     {"repetitions", std::to_string(reps)}};
  t.columns = {"k", "T", "mean_n1", "mean_n2", "c12", "se_c12", "n1sq_n2sq", "var_c12", "c12_analytic"};
  for (std::size_t k = 0; k < p.modes(); ++k) {
    const gm::EmpiricalStats e = gm::empirical_stats(run, k);
    const gm::MomentSet a = gm::correlation_stats(k, p.values(), o.nbar);
    t.rows.push_back({std::to_string(k + 1), num(p.values()[k]), num(e.moments.mean_n1), num(e.moments.mean_n2),
                      num(e.moments.c12), num(e.se_c12), num(e.moments.n1sq_n2sq), num(e.moments.var_c12),
                      num(a.c12)});
  }
  emit(o, t.render(o.format));
}

void run_estimate(const CommonOptions& o) {
  if (o.counts_path.empty()) throw gm::ContractViolation("estimate needs --counts");
  std::string source;
  const std::vector<gm::CountRecord> counts = resolve_counts(o, source);
  Table t;
  t.metadata = {{"version", gm::kVersion}, {"source", source}, {"eta", num(o.eta)}};
  t.columns = {"k", "wavelength_nm", "coincidences", "singles", "T", "var_quantum", "n_tot", "flags"};
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const gm::CountRecord& r = counts[k];
    std::string T = "nan", var = "nan", flags;
    if (r.singles > 0) {
      const gm::KlyshkoEstimate e = gm::klyshko_estimate(r.coincidences, r.singles);
      T = num(e.transmittivity);
      var = num(e.variance);
      if (e.transmittivity == 0.0 || e.transmittivity == 1.0) flags = "degenerate";
    } else {
      flags = "no_heralds";
    }
    t.rows.push_back({std::to_string(k + 1), num(r.wavelength_nm), std::to_string(r.coincidences),
                      std::to_string(r.singles), T, var, num(static_cast<double>(r.singles) / o.eta), flags});
  }
  emit(o, t.render(o.format));
}

void run_classical(const CommonOptions& o) {
  std::string source;
  const gm::TransmissionProfile p = resolve_profile(o, source);
  const gm::ResourceBudget budget(o.ntot.value_or(1e4), o.eta, o.nbar);
  Table t;
  t.metadata = {{"version", gm::kVersion}, {"source", source}, {"nbar", num(o.nbar)},
                {"n_tot", num(budget.n_tot())}, {"repetitions", num(budget.repetitions())}};
  t.columns = {"k", "T", "c12", "var_c12", "dc12_dT", "var_classical_prop"};
  for (std::size_t k = 0; k < p.modes(); ++k) {
    const gm::MomentSet m = gm::correlation_stats(k, p.values(), o.nbar);
    t.rows.push_back({std::to_string(k + 1), num(p.values()[k]), num(m.c12), num(m.var_c12), num(m.dc12_dT),
                      num(gm::classical_variance_propagation(k, p.values(), budget))});
  }
  emit(o, t.render(o.format));
}

void run_crb(const CommonOptions& o, std::size_t max_modes) {
  std::string source;
  const gm::TransmissionProfile p = resolve_profile(o, source);
  if (p.modes() > max_modes)
    throw gm::ContractViolation("crb refuses K = " + std::to_string(p.modes()) + " above --max-modes " +
                                std::to_string(max_modes));
  const gm::ResourceBudget budget(o.ntot.value_or(1e4), o.eta, o.nbar);
  std::vector<gm::FisherResult> fisher(p.modes());
  gm::detail::parallel_for(p.modes(), o.threads, [&](std::size_t k) {
    fisher[k] = gm::fisher_hellinger(k, p.values(), o.nbar, o.eps, gm::TruncationSpec::tolerance(o.tol));
  });
  Table t;
  t.metadata = {{"version", gm::kVersion}, {"source", source}, {"nbar", num(o.nbar)},
                {"n_tot", num(budget.n_tot())}, {"eps", num(o.eps)}, {"tol", num(o.tol)}};
  t.columns = {"k", "T", "fisher", "eps", "sweep_spread", "var_classical_crb", "tail_mass", "flags"};
  for (std::size_t k = 0; k < p.modes(); ++k) {
    const gm::FisherResult& f = fisher[k];
    const double crb = f.value > 0.0 ? gm::crb_bound(f.value, budget.repetitions()) : std::nan("");
    t.rows.push_back({std::to_string(k + 1), num(p.values()[k]), num(f.value), num(f.eps), num(f.sweep_spread),
                      num(crb), num(f.tail_mass), f.stable ? "" : "crb_unstable"});
  }
  emit(o, t.render(o.format));
}

void run_compare(const CommonOptions& o, bool with_crb, std::size_t max_modes) {
  gm::ComparisonOptions c = comparison_options(o, with_crb, max_modes);
  gm::ComparisonReport report;
  const bool counts_fit = !o.counts_path.empty() || !o.modes || o.points % o.modes == 0 || !o.profile_path.empty();
  if (counts_fit) {
    const std::vector<gm::CountRecord> counts = resolve_counts(o, c.source);
    report = gm::run_comparison(counts, c);
  } else {
    const gm::TransmissionProfile p = resolve_profile(o, c.source);
    report = gm::run_comparison(p, c);
  }
  emit(o, o.format == "json" ? gm::format_report_json(report) : gm::format_report_csv(report));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum vs classical ghost spectrometry precision"};
  app.set_config("--config", "", "Flat key = value file; command-line flags win");
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions o;
  app.add_option("-K,--modes", o.modes, "Number of spectral modes K");
  app.add_option("--rebin", o.rebin, "Group size j (K = points / j)");
  app.add_option("--nbar", o.nbar, "Classical mean photons per mode per arm")->check(CLI::PositiveNumber);
  app.add_option("--eta", o.eta, "Analysis-arm detection efficiency")->check(CLI::Range(0.0, 1.0));
  app.add_option("--ntot", o.ntot, "Photon budget per mode (overrides counts)");
  app.add_option("--eps", o.eps, "Hellinger step for the Fisher information");
  app.add_option("--tol", o.tol, "Tail tolerance of truncated distributions");
  app.add_option("--seed", o.seed, "Master seed for stochastic steps");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", o.out, "Output file (default stdout)");
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  app.add_option("--budget", o.budget, "Budget split across modes")->check(CLI::IsMember({"per_mode", "shared"}));
  app.add_option("--counts", o.counts_path, "Counts CSV: wavelength_nm,coincidences,singles,window_s");
  app.add_option("--profile", o.profile_path, "Profile CSV: wavelength_nm,T");
  app.add_option("--center", o.filter.center_nm, "Filter center (nm)");
  app.add_option("--fwhm", o.filter.fwhm_nm, "Filter FWHM (nm)");
  app.add_option("--order", o.filter.order, "Supergaussian order");
  app.add_option("--peak", o.filter.peak_T, "Peak transmittivity");
  app.add_option("--points", o.points, "Grid points N_s");
  app.add_option("--spacing", o.spacing, "Grid spacing (nm)");
  app.add_option("--peak-coincidences", o.peak_coincidences, "Synthetic coincidences at the brightest point");
  app.add_option("--window", o.window, "Acquisition window per point (s)");

  auto* profile = app.add_subcommand("profile", "Emit a synthetic supergaussian profile");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation of either scheme");
  std::string scheme = "quantum";
  std::uint64_t reps = 100000, pairs = 0;
  std::string records;
  simulate->add_option("--scheme", scheme, "quantum | classical")->check(CLI::IsMember({"quantum", "classical"}));
  simulate->add_option("--reps", reps, "Classical repetitions M");
  simulate->add_option("--pairs", pairs, "Quantum pair count (default sized by --peak-coincidences)");
  simulate->add_option("--records", records, "Classical raw-record CSV dump");

  auto* estimate = app.add_subcommand("estimate", "Klyshko estimates from a counts file");
  auto* classical = app.add_subcommand("classical", "Classical propagation variances for a profile");
  std::size_t max_modes = 12;
  auto* crb = app.add_subcommand("crb", "Classical Fisher information and Cramer-Rao bound");
  crb->add_option("--max-modes", max_modes, "Refuse profiles with more modes");
  auto* compare = app.add_subcommand("compare", "Quantum vs classical comparison report");
  bool with_crb = false;
  compare->add_flag("--crb", with_crb, "Include the classical Cramer-Rao bound");
  compare->add_option("--max-modes", max_modes, "Largest K for the CRB column");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*profile) run_profile(o);
    if (*simulate) run_simulate(o, scheme, reps, pairs, records);
    if (*estimate) run_estimate(o);
    if (*classical) run_classical(o);
    if (*crb) run_crb(o, max_modes);
    if (*compare) run_compare(o, with_crb, max_modes);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
