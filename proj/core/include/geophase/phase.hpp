#pragma once

// Measurement-induced geometric phase for the equally spaced azimuth
// protocol: phase curves, branch unwrapping, the winding index, geometric
// cross-checks and the qubit-level interferometer.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "geophase/qubit.hpp"

namespace geophase {

// Points whose |amplitude| falls below this carry no usable phase.
inline constexpr double kContrastThreshold = 1e-4;

// N measurements at (theta, phi_j = 2 pi j / (N + 1)), j = 1..N, all
// postselected on the null readout, starting from psi0 = |theta, 0>.
struct ProtocolFamily {
  int n_measurements = 3;
  double zeta = 0.0;
  std::vector<double> theta_grid;

  static ProtocolFamily uniform(int n_measurements, double zeta, std::size_t points = 721);

  void validate() const;
  double azimuth(int j) const { return kTwoPi * j / (n_measurements + 1); }
  std::vector<MeasurementSpec> measurements(double theta) const;
};

struct PhasePoint {
  double theta = 0.0;  // or alpha, for optical curves
  double chi_raw = 0.0;
  double chi_unwrapped = 0.0;
  double contrast = 0.0;
  bool valid = false;
};

struct TopologicalResult {
  double delta_chi = 0.0;
  long m = 0;
  double quantization_residual = 0.0;
  // residual <= 0.2 * 2 pi
  bool quantized = true;
};

// <theta,0| M_-(theta, phi_N) ... M_-(theta, phi_1) |theta,0>
cplx protocol_amplitude(int n_measurements, double zeta, double theta);

struct RefineOptions {
  bool enabled = true;
  // Split an interval when neighbouring raw phases differ by more than this.
  double max_phase_step = kPi / 4.0;
  // Also split intervals touching a point whose contrast is below this.
  double low_contrast = 0.0;
  double min_spacing = 1e-9;
  std::size_t max_points = 20000;
};

// Samples `amplitude` on `grid` (then adaptively refined) and returns the
// unwrapped curve.
std::vector<PhasePoint> sample_phase_curve(const std::function<cplx(double)>& amplitude,
                                           std::span<const double> grid,
                                           const RefineOptions& refine = {});

std::vector<PhasePoint> chi_of_theta(const ProtocolFamily& family,
                                     const RefineOptions& refine = {});

// Fixes the 2 pi branch of every valid point by the minimal-jump rule,
// starting from the first valid point (kept at its raw value, 0 for the
// protocol). Invalid points are linearly interpolated. Throws
// UnwrapAmbiguityError when two consecutive valid points differ by pi.
std::vector<PhasePoint> unwrap_curve(std::vector<PhasePoint> points);

// Throws DomainError if either endpoint is invalid or the curve is empty.
TopologicalResult topological_index(std::span<const PhasePoint> points);

// arg prod_i <psi_i|psi_{i+1}>, indices cyclic. Throws DomainError when two
// consecutive states are orthogonal.
double bargmann_oracle(std::span<const PureQubitState> states);

// Signed solid angle of the closed geodesic polygon through the given unit
// vectors, as a sum of signed triangle areas fanned from a base vertex.
// Orientation: (+z, +x, +y) encloses +pi/2. Consecutive repeated vertices
// are dropped; fewer than three distinct vertices gives 0.
double spherical_excess_oracle(std::span<const Vec3> vertices);

struct InterferometerProbabilities {
  double p0 = 0.5;
  double p1 = 0.5;
};

// P_{0/1} = (1 +- Re e^{-i delta} <psi0|M_-...M_-|psi0>) / 2.
InterferometerProbabilities interferometer_probability(std::span<const MeasurementSpec> specs,
                                                       const PureQubitState& psi0,
                                                       double delta);

struct CriticalStrength {
  double zeta_lo = 0.0;  // index equals m_weak here
  double zeta_hi = 1.0;  // index equals m_strong here
  double zeta_c = 0.0;
  long m_weak = 0;
  long m_strong = 0;
  double min_contrast = 0.0;  // min over theta at zeta_c
  double theta_at_min = 0.0;
};

struct CriticalStrengthOptions {
  double resolution = 1e-6;
  std::size_t coarse_points = 65;
  std::size_t theta_points = 721;
};

// Bisection on zeta over the first jump of the winding index.
CriticalStrength critical_strength(int n_measurements, const CriticalStrengthOptions& opts = {});

// Minimises |amplitude| over [lo, hi] starting from a bracketing grid.
struct ContrastMinimum {
  double at = 0.0;
  double contrast = 0.0;
};
ContrastMinimum polish_contrast_minimum(const std::function<cplx(double)>& amplitude,
                                        std::span<const PhasePoint> curve);

// CSV with columns theta_rad,chi_raw,chi_unwrapped,contrast,valid.
void write_phase_curve_csv(std::ostream& out, std::span<const PhasePoint> points);

}  // namespace geophase
