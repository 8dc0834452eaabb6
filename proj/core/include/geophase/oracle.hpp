#pragma once

// Cross-validation batteries run by the oracle-suite command.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "geophase/optics.hpp"

namespace geophase {

struct OracleCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const { return residual <= tolerance; }
};

struct OracleBattery {
  std::string name;
  std::vector<OracleCheck> checks;
  bool passed() const;
  double worst_residual() const;
};

// Adaptive nested Gauss-Kronrod integral of sum_pol conj(E_ref) E over a box
// covering every term to 10 waists.
cplx overlap_by_quadrature(const BeamField& reference, const BeamField& field, double rel_tol = 1e-10);

// Random null-outcome chains (N <= 6): arg of the chain amplitude against the
// Bargmann phase of the reversed trajectory (tol 1e-9), and twice that phase
// against the spherical excess of the Bloch polygon, mod 4 pi.
OracleBattery kraus_bargmann_battery(std::uint64_t seed, std::size_t sequences = 100);

// Random multi-term fields with the configured waist and wavenumber.
OracleBattery overlap_quadrature_battery(const OpticsConfig& cfg, std::uint64_t seed,
                                         std::size_t fields = 12);

// One ideal stage at several plate angles against the single null Kraus
// operator with sqrt(1 - zeta) = exp(-dx^2 / (2 w0^2)); tol 1e-9.
OracleBattery single_stage_battery(const OpticsConfig& cfg);

// chi(alpha) with (dx, w0) scaled by 0.5, 2 and 5 (ideal displacers); tol 1e-9.
OracleBattery scale_invariance_battery(const OpticsConfig& cfg, std::size_t n_stages);

}  // namespace geophase
