#pragma once

// Parameter sweeps over the optical setup: phase curves against the plate
// angle, the waist at which the winding index jumps, and (w0, gamma) phase
// diagrams.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "geophase/optics.hpp"
#include "geophase/phase.hpp"

namespace geophase {

struct Imperfection {
  double nu = 0.0;    // deflection azimuth, rad
  double beta = 0.0;  // deflection angle, rad
};

// Everything needed to build the setup at a given plate angle.
struct SetupTemplate {
  OpticsConfig optics;
  std::size_t n_stages = 3;
  std::vector<Imperfection> imperfections;  // empty, or one per stage
  std::optional<double> plate_retardance;   // default_plate_retardance(n_stages)

  void validate() const;
  SetupTemplate with_w0(double w0_mm) const;
  SetupTemplate with_gamma(double gamma_rad) const;
  Setup at(double alpha) const;
  cplx amplitude(double alpha) const;
};

std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

struct CurveOptions {
  std::size_t alpha_points = 181;
  std::vector<double> alpha_grid;  // used instead of alpha_points when non-empty
  RefineOptions refine{.enabled = true,
                       .max_phase_step = kPi / 4.0,
                       .low_contrast = 0.05,
                       .min_spacing = 1e-9,
                       .max_points = 20000};
  // Polish the minimum contrast with a local minimiser.
  bool polish_minimum = true;
};

struct PhaseCurve {
  double w0 = 0.0;
  std::vector<PhasePoint> points;  // theta holds alpha
  TopologicalResult index;
  double min_contrast = 0.0;
  double alpha_at_min = 0.0;
};

PhaseCurve chi_curve_vs_alpha(const SetupTemplate& setup, double w0_mm,
                              const CurveOptions& opts = {});

struct TransitionOptions {
  double tol = 1e-3;  // mm
  std::size_t scan_points = 33;
  CurveOptions curve;
};

struct TransitionResult {
  double w0_star = 0.0;
  double w0_lo = 0.0;  // index m_low here
  double w0_hi = 0.0;  // index m_high here
  long m_low = 0;
  long m_high = 0;
  double min_contrast = 0.0;  // min over alpha at w0_star
  double alpha_at_min = 0.0;
  // Index changes seen on the coarse scan; 1 means a single transition.
  std::size_t changes_on_scan = 0;
  std::vector<double> scan_w0;
  std::vector<long> scan_m;
};

// Scans [w0_lo, w0_hi] on a uniform grid, then bisects the first index jump
// counted from the small-waist (strong) end down to `tol`. Throws
// NoTransitionError when the index is constant on the scan.
TransitionResult locate_transition(const SetupTemplate& setup, double w0_lo, double w0_hi,
                                   const TransitionOptions& opts = {});

struct ScanSpec {
  std::vector<double> w0_values;
  std::vector<double> alpha_grid;
  std::vector<double> gamma_values;
  // Overrides the template's imperfections when non-empty.
  std::vector<Imperfection> stage_imperfections;

  void validate() const;
};

struct DiagramCell {
  double w0 = 0.0;
  double gamma = 0.0;
  long m = 0;
  double min_contrast = 0.0;
  double residual = 0.0;
  bool resolved = false;
};

struct PhaseDiagram {
  std::vector<double> w0_values;
  std::vector<double> gamma_values;
  std::vector<DiagramCell> cells;  // w0-major

  const DiagramCell& at(std::size_t i_w0, std::size_t i_gamma) const {
    return cells[i_w0 * gamma_values.size() + i_gamma];
  }
  std::size_t count(long m) const;
};

PhaseDiagram phase_diagram(const ScanSpec& spec, const SetupTemplate& base,
                           unsigned threads = 0);

// Curves for several waists, computed concurrently, returned in input order.
std::vector<PhaseCurve> scan_w0(const SetupTemplate& setup, std::span<const double> w0_values,
                                const CurveOptions& opts = {}, unsigned threads = 0);

struct TrendPoint {
  double beta = 0.0;
  double w0_star = 0.0;
};

// Identical stages deflected by each beta at azimuth nu.
std::vector<TrendPoint> imperfection_trend(const SetupTemplate& setup,
                                           std::span<const double> betas, double nu,
                                           double w0_lo, double w0_hi,
                                           const TransitionOptions& opts = {});

// alpha_rad,chi,contrast,w0_mm
void write_curve_csv(std::ostream& out, std::span<const PhaseCurve> curves);
// w0_mm,gamma_rad,m,min_contrast,resolved
void write_diagram_csv(std::ostream& out, const PhaseDiagram& diagram);

}  // namespace geophase
