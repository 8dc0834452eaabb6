#pragma once

// Genetic-algorithm fit of per-stage displacer imperfections to measured
// phase and contrast data.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "geophase/optics.hpp"
#include "geophase/scan.hpp"

namespace geophase {

inline constexpr std::size_t kGenomeStages = 3;
inline constexpr double kDefaultBetaMax = 60.0 * kArcsec;

// Genes (nu_1, beta_1, nu_2, beta_2, nu_3, beta_3), radians.
struct ImperfectionGenome {
  std::array<double, 2 * kGenomeStages> genes{};

  double nu(std::size_t stage) const { return genes[2 * stage]; }
  double beta(std::size_t stage) const { return genes[2 * stage + 1]; }
  void set(std::size_t stage, double nu, double beta);

  bool in_bounds(double beta_max = kDefaultBetaMax) const;
  std::vector<Imperfection> imperfections() const;
  static ImperfectionGenome ideal() { return {}; }
  bool operator==(const ImperfectionGenome&) const = default;
};

struct ExperimentRecord {
  double w0 = 0.0;        // mm
  double alpha = 0.0;     // rad
  double chi = 0.0;       // rad
  double contrast = 0.0;  // [0, 1]
  double weight = 1.0;

  void validate() const;
};

// |arg e^{i(a - b)}|
double circ_dist(double a, double b);

struct LossOptions {
  double lambda = 1.0;
  // Replaces the phase term when the simulated contrast is below
  // kContrastThreshold but the measured one is not.
  double invalid_penalty = 10.0;
};

// Simulated (chi, contrast) for each record under the genome.
std::vector<ExperimentRecord> simulate_records(const ImperfectionGenome& genome,
                                               std::span<const ExperimentRecord> at,
                                               const SetupTemplate& tmpl);

// Sum of weight * [circ_dist(chi)^2 + lambda * (contrast difference)^2].
// Returns +inf when the simulation throws. DomainError on empty data.
double loss(const ImperfectionGenome& genome, std::span<const ExperimentRecord> data,
            const SetupTemplate& tmpl, const LossOptions& opts = {});

// polar: independent kicks of nu (sigma_nu) and beta (sigma_beta).
// tilt_plane: isotropic kick of width sigma_beta on the stage's tilt vector
// beta (cos nu, sin nu).
enum class MutationSpace { polar, tilt_plane };

struct GAConfig {
  std::size_t population = 64;
  std::size_t generations = 200;
  std::size_t tournament = 3;
  double crossover_rate = 0.7;
  double sigma_nu = 0.2;
  double sigma_beta = 5.0 * kArcsec;
  // Mutation widths decay geometrically to this fraction at the last
  // generation; 1 keeps them fixed.
  double sigma_final_ratio = 0.01;
  MutationSpace mutation_space = MutationSpace::tilt_plane;
  // Per-gene (per-stage in the tilt plane) probability of a Gaussian kick.
  double mutation_rate = 1.0;
  std::size_t elitism = 2;
  double beta_max = kDefaultBetaMax;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  LossOptions loss;

  void validate() const;
};

struct GAResult {
  ImperfectionGenome best;
  double best_loss = 0.0;
  double initial_best_loss = 0.0;
  // Elite loss after each generation; entry 0 is the initial population.
  std::vector<double> history;
  std::size_t evaluations = 0;
};

// Tournament selection, uniform crossover over stages, Gaussian mutation
// (beta reflected into [0, beta_max], nu wrapped into [0, 2 pi)), elitism.
// Each child draws from its own stream seeded by (seed, generation, index).
GAResult evolve(const GAConfig& cfg, std::span<const ExperimentRecord> data,
                const SetupTemplate& tmpl);

}  // namespace geophase
