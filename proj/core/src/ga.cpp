#include "geophase/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "geophase/errors.hpp"
#include "geophase/parallel.hpp"
#include "geophase/phase.hpp"

namespace geophase {

namespace {

constexpr std::uint32_t kInitStream = 0;
constexpr std::uint32_t kBreedStream = 1;

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t tag, std::size_t gen, std::size_t idx) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag,
                    static_cast<std::uint32_t>(gen), static_cast<std::uint32_t>(idx)};
  return std::mt19937_64(seq);
}

double reflect(double v, double hi) {
  if (hi == 0.0) return 0.0;
  const double period = 2.0 * hi;
  v = std::fmod(v, period);
  if (v < 0.0) v += period;
  return v > hi ? period - v : v;
}

double wrap_angle(double v) {
  v = std::fmod(v, kTwoPi);
  if (v < 0.0) v += kTwoPi;
  return v >= kTwoPi ? 0.0 : v;
}

struct Individual {
  ImperfectionGenome genome;
  double loss = 0.0;
};

}  // namespace

void ImperfectionGenome::set(std::size_t stage, double nu, double beta) {
  genes[2 * stage] = nu;
  genes[2 * stage + 1] = beta;
}

bool ImperfectionGenome::in_bounds(double beta_max) const {
  for (std::size_t j = 0; j < kGenomeStages; ++j) {
    if (!(nu(j) >= 0.0 && nu(j) < kTwoPi)) return false;
    if (!(beta(j) >= 0.0 && beta(j) <= beta_max)) return false;
  }
  return true;
}

std::vector<Imperfection> ImperfectionGenome::imperfections() const {
  std::vector<Imperfection> out;
  for (std::size_t j = 0; j < kGenomeStages; ++j) out.push_back({nu(j), beta(j)});
  return out;
}

void ExperimentRecord::validate() const {
  if (!(std::isfinite(w0) && w0 > 0.0)) throw DomainError("record w0 must be positive");
  if (!std::isfinite(alpha) || !std::isfinite(chi)) throw DomainError("record angles must be finite");
  if (!(contrast >= 0.0 && contrast <= 1.0)) throw DomainError("record contrast must lie in [0, 1]");
  if (!(std::isfinite(weight) && weight >= 0.0)) throw DomainError("record weight must be >= 0");
}

double circ_dist(double a, double b) { return std::abs(std::arg(std::polar(1.0, a - b))); }

std::vector<ExperimentRecord> simulate_records(const ImperfectionGenome& genome,
                                               std::span<const ExperimentRecord> at,
                                               const SetupTemplate& tmpl) {
  SetupTemplate t = tmpl;
  t.imperfections = genome.imperfections();
  t.validate();
  std::vector<ExperimentRecord> out;
  out.reserve(at.size());
  for (const ExperimentRecord& r : at) {
    const cplx a = t.with_w0(r.w0).amplitude(r.alpha);
    out.push_back({r.w0, r.alpha, std::arg(a), std::abs(a), r.weight});
  }
  return out;
}

double loss(const ImperfectionGenome& genome, std::span<const ExperimentRecord> data,
            const SetupTemplate& tmpl, const LossOptions& opts) {
  if (data.empty()) throw DomainError("loss needs at least one record");
  std::vector<ExperimentRecord> sim;
  try {
    sim = simulate_records(genome, data, tmpl);
  } catch (const std::exception&) {
    return std::numeric_limits<double>::infinity();
  }
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const ExperimentRecord& m = data[i];
    const ExperimentRecord& s = sim[i];
    double term = 0.0;
    if (m.contrast >= kContrastThreshold) {
      if (s.contrast < kContrastThreshold) {
        term = opts.invalid_penalty;
      } else {
        const double d = circ_dist(s.chi, m.chi);
        term = d * d;
      }
    }
    const double dc = s.contrast - m.contrast;
    total += m.weight * (term + opts.lambda * dc * dc);
  }
  return total;
}

void GAConfig::validate() const {
  if (population < 1) throw DomainError("population must be positive");
  if (tournament < 1) throw DomainError("tournament size must be positive");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw DomainError("crossover rate must lie in [0, 1]");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw DomainError("mutation rate must lie in [0, 1]");
  if (!(sigma_nu > 0.0 && sigma_beta > 0.0)) throw DomainError("mutation widths must be positive");
  if (!(sigma_final_ratio > 0.0 && sigma_final_ratio <= 1.0)) {
    throw DomainError("sigma_final_ratio must lie in (0, 1]");
  }
  if (elitism < 1 || elitism > population) throw DomainError("elitism must lie in [1, population]");
  if (!(beta_max >= 0.0 && std::isfinite(beta_max))) throw DomainError("beta_max must be finite and >= 0");
  if (!seed) throw DomainError("GA seed is required");
}

GAResult evolve(const GAConfig& cfg, std::span<const ExperimentRecord> data,
                const SetupTemplate& tmpl) {
  cfg.validate();
  if (data.empty()) throw DomainError("GA needs at least one record");
  for (const ExperimentRecord& r : data) r.validate();
  if (tmpl.n_stages != kGenomeStages) throw DomainError("GA fits exactly three stages");
  const std::uint64_t seed = *cfg.seed;

  GAResult result;
  auto evaluate = [&](std::vector<Individual>& pop, std::size_t from) {
    parallel_for(pop.size() - from, cfg.threads, [&](std::size_t i) {
      pop[from + i].loss = loss(pop[from + i].genome, data, tmpl, cfg.loss);
    });
    result.evaluations += pop.size() - from;
  };
  auto ranking = [](const std::vector<Individual>& pop) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pop[a].loss < pop[b].loss; });
    return order;
  };

  std::vector<Individual> pop(cfg.population);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    auto rng = stream(seed, kInitStream, 0, i);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (std::size_t j = 0; j < kGenomeStages; ++j) {
      pop[i].genome.set(j, wrap_angle(kTwoPi * u01(rng)), cfg.beta_max * u01(rng));
    }
  }
  evaluate(pop, 0);
  std::vector<std::size_t> order = ranking(pop);
  result.initial_best_loss = pop[order.front()].loss;
  result.history.push_back(result.initial_best_loss);

  for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
    const double scale =
        std::pow(cfg.sigma_final_ratio, static_cast<double>(gen - 1) /
                                            static_cast<double>(std::max<std::size_t>(cfg.generations - 1, 1)));
    const double sigma_nu = cfg.sigma_nu * scale;
    const double sigma_beta = cfg.sigma_beta * scale;
    std::vector<Individual> next(cfg.population);
    for (std::size_t e = 0; e < cfg.elitism; ++e) next[e] = pop[order[e]];
    for (std::size_t i = cfg.elitism; i < next.size(); ++i) {
      auto rng = stream(seed, kBreedStream, gen, i);
      std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      auto select = [&] {
        std::size_t best = pick(rng);
        for (std::size_t t = 1; t < cfg.tournament; ++t) {
          const std::size_t c = pick(rng);
          if (pop[c].loss < pop[best].loss || (pop[c].loss == pop[best].loss && c < best)) best = c;
        }
        return best;
      };
      const ImperfectionGenome& a = pop[select()].genome;
      const ImperfectionGenome& b = pop[select()].genome;
      ImperfectionGenome child = a;
      if (u01(rng) < cfg.crossover_rate) {
        for (std::size_t j = 0; j < kGenomeStages; ++j) {
          if (u01(rng) < 0.5) child.set(j, b.nu(j), b.beta(j));
        }
      }
      std::normal_distribution<double> kick(0.0, 1.0);
      for (std::size_t j = 0; j < kGenomeStages; ++j) {
        double nu = child.nu(j), beta = child.beta(j);
        if (cfg.mutation_space == MutationSpace::tilt_plane) {
          if (u01(rng) < cfg.mutation_rate) {
            const double qx = beta * std::cos(nu) + sigma_beta * kick(rng);
            const double qy = beta * std::sin(nu) + sigma_beta * kick(rng);
            nu = wrap_angle(std::atan2(qy, qx));
            beta = reflect(std::hypot(qx, qy), cfg.beta_max);
          }
        } else {
          if (u01(rng) < cfg.mutation_rate) nu = wrap_angle(nu + sigma_nu * kick(rng));
          if (u01(rng) < cfg.mutation_rate) beta = reflect(beta + sigma_beta * kick(rng), cfg.beta_max);
        }
        child.set(j, nu, beta);
      }
      next[i].genome = child;
    }
    evaluate(next, cfg.elitism);
    pop = std::move(next);
    order = ranking(pop);
    result.history.push_back(pop[order.front()].loss);
  }

  result.best = pop[order.front()].genome;
  result.best_loss = pop[order.front()].loss;
  return result;
}

}  // namespace geophase
