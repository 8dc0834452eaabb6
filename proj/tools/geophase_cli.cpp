#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "geophase/csv.hpp"
#include "geophase/errors.hpp"
#include "geophase/fringe.hpp"
#include "geophase/ga.hpp"
#include "geophase/io.hpp"
#include "geophase/oracle.hpp"
#include "geophase/phase.hpp"
#include "geophase/scan.hpp"

namespace fs = std::filesystem;
using namespace geophase;

namespace {

enum Exit { kOk = 0, kFailed = 1, kMissingFile = 2, kInvalidInput = 3 };

struct Common {
  std::string config;
  std::optional<std::string> output_dir;
  std::optional<unsigned> threads;
  std::optional<double> w0, gamma, dx;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "JSON configuration, or a previous output file");
  cmd->add_option("-o,--output-dir", c.output_dir, "Directory for output files");
  cmd->add_option("--threads", c.threads, "Maximum worker threads (0 = all cores)");
  cmd->add_option("--w0", c.w0, "Beam waist, mm");
  cmd->add_option("--gamma", c.gamma, "Residual compensation phase, rad");
  cmd->add_option("--dx", c.dx, "Displacer walk-off, mm");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig::defaults() : load_config(c.config);
  if (c.output_dir) cfg.output_dir = *c.output_dir;
  if (c.threads) cfg.threads = *c.threads;
  if (c.w0) cfg.optics.w0_mm = *c.w0;
  if (c.gamma) cfg.optics.gamma_rad = *c.gamma;
  if (c.dx) cfg.optics.dx_mm = *c.dx;
  cfg.validate();
  return cfg;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::cout << "wrote " << path.string() << '\n';
  return out;
}

CurveOptions curve_options(const RunConfig& cfg) {
  CurveOptions o;
  o.alpha_points = cfg.scan.alpha_points;
  return o;
}

TransitionOptions transition_options(const RunConfig& cfg) {
  TransitionOptions o;
  o.tol = cfg.scan.transition_tol_mm;
  o.scan_points = cfg.scan.transition_scan_points;
  o.curve = curve_options(cfg);
  return o;
}

int cmd_chi_curve(const RunConfig& cfg) {
  const PhaseCurve c = chi_curve_vs_alpha(cfg.setup_template(), cfg.optics.w0_mm, curve_options(cfg));
  auto out = open_output(cfg, "chi_curve.csv");
  write_preamble(out, "chi-curve", cfg);
  write_curve_csv(out, std::span<const PhaseCurve>(&c, 1));
  std::printf("w0_mm=%.6g delta_chi=%.9f m=%ld min_contrast=%.3e alpha_at_min=%.6f\n", c.w0,
              c.index.delta_chi + 0.0, c.index.m, c.min_contrast, c.alpha_at_min);
  return kOk;
}

int cmd_scan_w0(const RunConfig& cfg) {
  const SetupTemplate tmpl = cfg.setup_template();
  const std::vector<PhaseCurve> curves = scan_w0(tmpl, cfg.scan.w0_mm, curve_options(cfg), cfg.threads);
  {
    auto out = open_output(cfg, "scan_w0.csv");
    write_preamble(out, "scan-w0", cfg);
    write_curve_csv(out, curves);
  }
  {
    auto out = open_output(cfg, "scan_w0_summary.csv");
    write_preamble(out, "scan-w0", cfg);
    out << "w0_mm,m,delta_chi,residual,min_contrast\n";
    for (const PhaseCurve& c : curves) {
      out << csv_number(c.w0) << ',' << c.index.m << ',' << csv_number(c.index.delta_chi) << ','
          << csv_number(c.index.quantization_residual) << ',' << csv_number(c.min_contrast) << '\n';
    }
  }
  try {
    const TransitionResult t =
        locate_transition(tmpl, cfg.scan.transition_lo_mm, cfg.scan.transition_hi_mm, transition_options(cfg));
    auto out = open_output(cfg, "transition.csv");
    write_preamble(out, "scan-w0", cfg);
    out << "w0_star_mm,w0_lo_mm,w0_hi_mm,m_low,m_high,min_contrast,alpha_at_min,changes_on_scan\n"
        << csv_number(t.w0_star) << ',' << csv_number(t.w0_lo) << ',' << csv_number(t.w0_hi) << ',' << t.m_low
        << ',' << t.m_high << ',' << csv_number(t.min_contrast) << ',' << csv_number(t.alpha_at_min) << ','
        << t.changes_on_scan << '\n';
    std::printf("w0_star_mm=%.6f m: %ld -> %ld min_contrast=%.3e index changes on scan=%zu\n", t.w0_star,
                t.m_low, t.m_high, t.min_contrast, t.changes_on_scan);
  } catch (const NoTransitionError& e) {
    std::printf("no transition in [%g, %g] mm: %s\n", cfg.scan.transition_lo_mm, cfg.scan.transition_hi_mm,
                e.what());
  }
  return kOk;
}

int cmd_phase_diagram(const RunConfig& cfg) {
  ScanSpec spec;
  spec.w0_values = cfg.scan.w0_mm;
  spec.gamma_values = cfg.scan.gamma_rad;
  spec.alpha_grid = uniform_grid(0.0, kPi / 2.0, cfg.scan.alpha_points);
  const PhaseDiagram d = phase_diagram(spec, cfg.setup_template(), cfg.threads);
  auto out = open_output(cfg, "phase_diagram.csv");
  write_preamble(out, "phase-diagram", cfg);
  write_diagram_csv(out, d);
  std::size_t unresolved = 0;
  for (const DiagramCell& c : d.cells) unresolved += c.resolved ? 0 : 1;
  std::printf("cells=%zu m=0:%zu m=1:%zu unresolved=%zu\n", d.cells.size(), d.count(0), d.count(1), unresolved);
  return kOk;
}

int cmd_fit(RunConfig cfg, const std::optional<std::string>& data, std::uint64_t seed) {
  if (data) cfg.data_path = *data;
  cfg.seed = seed;
  if (!cfg.data_path) throw ConfigError("invalid configuration:\n  fit needs --data or data_path");
  const std::vector<ExperimentRecord> records = read_experiment_csv(*cfg.data_path);
  GAConfig ga = cfg.ga;
  ga.seed = seed;
  ga.threads = cfg.threads;
  const GAResult r = evolve(ga, records, cfg.setup_template());
  {
    auto out = open_output(cfg, "fit_genome.json");
    write_genome_json(out, cfg, r);
  }
  {
    auto out = open_output(cfg, "fit_history.csv");
    write_preamble(out, "fit", cfg);
    write_history_csv(out, r);
  }
  std::printf("records=%zu initial_best=%.6e best=%.6e ratio=%.3e\n", records.size(), r.initial_best_loss,
              r.best_loss, r.best_loss / r.initial_best_loss);
  for (std::size_t s = 0; s < kGenomeStages; ++s) {
    std::printf("stage %zu: nu=%.6f rad beta=%.3f arcsec\n", s + 1, r.best.nu(s), r.best.beta(s) / kArcsec);
  }
  return kOk;
}

int cmd_fringe(RunConfig cfg, const std::optional<double>& alpha) {
  if (alpha) cfg.fringe.alpha_rad = *alpha;
  cfg.validate();
  const Setup setup = cfg.setup_template().with_w0(cfg.optics.w0_mm).at(cfg.fringe.alpha_rad);
  const InterferenceReadout r =
      interference_readout(setup, cfg.optics, default_delta_grid(cfg.fringe.delta_points));
  auto out = open_output(cfg, "fringe.csv");
  write_preamble(out, "fringe", cfg);
  out << "delta_rad,power\n";
  std::vector<FringeSample> samples;
  for (std::size_t i = 0; i < r.delta.size(); ++i) {
    out << csv_number(r.delta[i]) << ',' << csv_number(r.power[i]) << '\n';
    samples.push_back({r.delta[i], r.power[i]});
  }
  const FringeFit fit = fringe_fit(samples);
  std::printf("chi=%.9f contrast=%.6f fitted_chi=%.9f fitted_contrast=%.6f phase_defined=%d\n", r.chi,
              r.contrast, fit.chi, 2.0 * fit.contrast, fit.phase_defined ? 1 : 0);
  return kOk;
}

int cmd_oracle_suite(const RunConfig& cfg) {
  const std::uint64_t seed = cfg.seed.value_or(1);
  const std::vector<OracleBattery> batteries{
      kraus_bargmann_battery(seed),
      overlap_quadrature_battery(cfg.optics, seed),
      single_stage_battery(cfg.optics),
      scale_invariance_battery(cfg.optics, cfg.n_stages),
  };
  bool all = true;
  for (const OracleBattery& b : batteries) {
    std::printf("%s %s worst=%.3e\n", b.passed() ? "PASS" : "FAIL", b.name.c_str(), b.worst_residual());
    for (const OracleCheck& c : b.checks) {
      std::printf("  %s %s residual=%.3e tol=%.1e\n", c.passed() ? "ok  " : "FAIL", c.name.c_str(), c.residual,
                  c.tolerance);
    }
    all = all && b.passed();
  }
  return all ? kOk : kFailed;
}

int cmd_critical_strength(RunConfig cfg, const std::optional<int>& n) {
  if (n) cfg.critical.n_measurements = *n;
  cfg.validate();
  CriticalStrengthOptions opts;
  opts.resolution = cfg.critical.resolution;
  const CriticalStrength c = critical_strength(cfg.critical.n_measurements, opts);
  auto out = open_output(cfg, "critical_strength.csv");
  write_preamble(out, "critical-strength", cfg);
  out << "n_measurements,zeta_lo,zeta_hi,zeta_c,eta_c,m_weak,m_strong,min_contrast,theta_at_min\n"
      << cfg.critical.n_measurements << ',' << csv_number(c.zeta_lo) << ',' << csv_number(c.zeta_hi) << ','
      << csv_number(c.zeta_c) << ',' << csv_number(strength_eta(c.zeta_c)) << ',' << c.m_weak << ','
      << c.m_strong << ',' << csv_number(c.min_contrast) << ',' << csv_number(c.theta_at_min) << '\n';
  std::printf("zeta_c=%.9f eta_c=%.9f m: %ld -> %ld min_contrast=%.3e\n", c.zeta_c, strength_eta(c.zeta_c),
              c.m_weak, c.m_strong, c.min_contrast);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurement-induced geometric phase: qubit chains and optical setups"};
  app.require_subcommand(1);

  Common c_curve, c_scan, c_diag, c_fit, c_fringe, c_oracle, c_crit;
  auto* chi = app.add_subcommand("chi-curve", "chi(alpha) at one waist");
  add_common(chi, c_curve);
  auto* scan = app.add_subcommand("scan-w0", "chi(alpha) over the waist list, plus the transition waist");
  add_common(scan, c_scan);
  auto* diag = app.add_subcommand("phase-diagram", "winding index over the (w0, gamma) grid");
  add_common(diag, c_diag);
  auto* fit = app.add_subcommand("fit", "GA fit of displacer imperfections to measured data");
  add_common(fit, c_fit);
  std::optional<std::string> data;
  std::uint64_t seed = 0;
  fit->add_option("--data", data, "CSV with w0_mm,alpha_rad,chi_rad,contrast[,weight]");
  fit->add_option("--seed", seed, "RNG seed")->required();
  auto* fringe = app.add_subcommand("fringe", "interference fringe over delta at one (w0, alpha)");
  add_common(fringe, c_fringe);
  std::optional<double> alpha;
  fringe->add_option("--alpha", alpha, "Plate angle, rad");
  auto* oracle = app.add_subcommand("oracle-suite", "cross-validation batteries");
  add_common(oracle, c_oracle);
  auto* crit = app.add_subcommand("critical-strength", "critical null-measurement strength of the qubit chain");
  add_common(crit, c_crit);
  std::optional<int> n_meas;
  crit->add_option("-n,--measurements", n_meas, "Number of measurements N");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*chi) return cmd_chi_curve(resolve(c_curve));
    if (*scan) return cmd_scan_w0(resolve(c_scan));
    if (*diag) return cmd_phase_diagram(resolve(c_diag));
    if (*fit) return cmd_fit(resolve(c_fit), data, seed);
    if (*fringe) return cmd_fringe(resolve(c_fringe), alpha);
    if (*oracle) return cmd_oracle_suite(resolve(c_oracle));
    if (*crit) return cmd_critical_strength(resolve(c_crit), n_meas);
  } catch (const FileNotFoundError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMissingFile;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kFailed;
}
