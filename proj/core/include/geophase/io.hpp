#pragma once

// Run configuration (JSON), output preambles and experiment-data CSV.
//
// Output files start with
//   # schema=1
//   # command=<subcommand>
//   # config=<resolved configuration as one-line JSON>
// and load_config accepts such a file in place of a JSON config, so any
// output can be regenerated from its own header.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geophase/ga.hpp"
#include "geophase/optics.hpp"
#include "geophase/scan.hpp"

namespace geophase {

inline constexpr int kSchemaVersion = 1;

struct ScanSettings {
  std::vector<double> w0_mm;
  std::size_t alpha_points = 181;
  std::vector<double> gamma_rad;
  double transition_lo_mm = 0.3;
  double transition_hi_mm = 3.0;
  double transition_tol_mm = 1e-3;
  std::size_t transition_scan_points = 33;
};

struct FringeSettings {
  double alpha_rad = kPi / 4.0;
  std::size_t delta_points = 64;
};

struct CriticalSettings {
  int n_measurements = 3;
  double resolution = 1e-6;
};

struct RunConfig {
  OpticsConfig optics;
  std::size_t n_stages = 3;
  std::vector<Imperfection> stages;  // empty, or one per stage
  std::optional<double> plate_retardance_rad;
  ScanSettings scan;
  FringeSettings fringe;
  CriticalSettings critical;
  GAConfig ga;
  std::optional<std::string> data_path;
  std::optional<std::uint64_t> seed;
  // Neither affects results, so neither is echoed.
  std::string output_dir = ".";
  unsigned threads = 0;

  static RunConfig defaults();
  SetupTemplate setup_template() const;
  // Throws ConfigError listing every problem.
  void validate() const;
};

// Parses JSON text. Unknown keys, wrong types and out-of-range values are
// collected and reported together in one ConfigError.
RunConfig parse_config(const std::string& json_text);

// Reads a JSON config, or the config line of a previous output file.
// Throws FileNotFoundError when the path cannot be opened.
RunConfig load_config(const std::filesystem::path& path);

// Canonical one-line JSON of everything that influences results.
std::string config_json(const RunConfig& cfg);

void write_preamble(std::ostream& out, const std::string& command, const RunConfig& cfg);

// Header `w0_mm,alpha_rad,chi_rad,contrast[,weight]`; '#' lines and blank
// lines are skipped. Malformed rows throw ConfigError naming the line.
std::vector<ExperimentRecord> read_experiment_csv(std::istream& in);
std::vector<ExperimentRecord> read_experiment_csv(const std::filesystem::path& path);
void write_experiment_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);

void write_genome_json(std::ostream& out, const RunConfig& cfg, const GAResult& result);
// generation,loss
void write_history_csv(std::ostream& out, const GAResult& result);

}  // namespace geophase
