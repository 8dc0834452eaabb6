#pragma once

// Waist-plane optics of the measurement stages: Jones operators acting on
// superpositions of displaced, tilted Gaussian modes.
//
// Polarization vectors are ordered (E_y, E_x): vertical is |up>, horizontal
// is |down>. A mode with centre c and transverse wavevector q is
//   sqrt(2 / (pi w0^2)) exp(-|r - c|^2 / w0^2) exp(i q.r),
// so the tilt phase is referenced to the optical axis. Lengths are in mm,
// wavevectors in rad/mm.

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "geophase/qubit.hpp"

namespace geophase {

inline constexpr double kArcsec = kPi / (180.0 * 3600.0);
inline constexpr std::size_t kDefaultMaxTerms = 4096;

struct OpticsConfig {
  double wavelength_nm = 632.9;
  double w0_mm = 1.0;
  double dx_mm = 1.0;
  // Net residual retardance per stage after the compensation plate;
  // 0 is exact compensation.
  double gamma_rad = 0.0;
  // Multiplier on the deflection wavevector k sin(beta).
  double tilt_scale = 1.0;

  void validate() const;
  double wavenumber() const;  // rad/mm
};

enum class Polarization { y, x };

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct GaussianTerm {
  cplx amp{0.0, 0.0};
  Polarization pol = Polarization::y;
  Vec2 center;
  Vec2 tilt;
};

class BeamField {
 public:
  BeamField(double w0_mm, double wavenumber);

  // One centred mode carrying the Jones vector (e_y, e_x).
  static BeamField gaussian(const OpticsConfig& cfg, cplx e_y, cplx e_x);

  double w0() const { return w0_; }
  double wavenumber() const { return k_; }
  std::span<const GaussianTerm> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  // Appends and merges with any coincident term.
  void add(const GaussianTerm& term);
  BeamField projected(Polarization pol) const;
  double power() const;

 private:
  double w0_;
  double k_;
  std::vector<GaussianTerm> terms_;
};

// Rotation by `angle` in the (y, x) plane.
Operator2 jones_rotation(double angle);
// R(a) diag(e^{i phi/2}, e^{-i phi/2}) R(-a): retardance phi, with the
// polarization along `axis_angle` (from vertical) advanced by phi/2.
Operator2 jones_phase_plate(double phi, double axis_angle = 0.0);

BeamField apply_jones(const Operator2& op, const BeamField& field);

struct BeamDisplacer {
  double dx_mm = 0.0;
  double beta_rad = 0.0;
  double nu_rad = 0.0;
  double gamma_internal = 0.0;
  double tilt_scale = 1.0;
};

// k sin(beta) (cos nu, sin nu), scaled by tilt_scale.
Vec2 deflection_wavevector(const BeamDisplacer& bd, double wavenumber);

// x-polarized terms: shifted by (dx, 0), given the deflection wavevector,
// multiplied by e^{i gamma_internal}. y-polarized terms pass unchanged.
BeamField apply_beam_displacer(const BeamField& field, const BeamDisplacer& bd);

struct StageConfig {
  double alpha = 0.0;  // plate axis angle
  double gamma = 0.0;  // residual compensation retardance
  double dx = 1.0;     // walk-off, mm
  double beta = 0.0;   // extraordinary-ray deflection, rad
  double nu = 0.0;     // deflection azimuth, rad
  double tilt_scale = 1.0;
};

using Element = std::variant<Operator2, BeamDisplacer>;

// [plate(plate_retardance, alpha), BD, P(gamma)] in propagation order.
std::vector<Element> build_stage(const StageConfig& cfg, double plate_retardance);

// The four-element measurement of the (theta, phi) axis:
// P(phi), R(-theta/2), BD, P(gamma), R(theta/2), P(-phi) in propagation order.
std::vector<Element> build_naive_stage(double theta, double phi, const StageConfig& cfg);

// Plate retardance of a quarter-wave plate with its fast axis along alpha
// for N = 3, generalised to -2 pi / (N + 1).
double default_plate_retardance(std::size_t n_stages);

struct Setup {
  std::vector<StageConfig> stages;
  double plate_retardance = 0.0;
  // Plate returning the measurement frame to the input frame before the
  // polarizer: retardance -N * plate_retardance at the last stage's alpha.
  bool closing_plate = true;

  static Setup uniform(const OpticsConfig& cfg, std::size_t n_stages, double alpha);
  std::vector<Element> elements() const;
};

BeamField propagate(std::span<const Element> elements, BeamField field,
                    std::size_t max_terms = kDefaultMaxTerms);
BeamField propagate(const Setup& setup, const BeamField& input,
                    std::size_t max_terms = kDefaultMaxTerms);

// Sum over same-polarization term pairs of conj(a_ref) a ∫ g_ref^* g.
// Throws DomainError when the waists or wavenumbers differ.
cplx overlap(const BeamField& reference, const BeamField& field);

// Vertically polarized input, vertical polarizer, unshifted reference arm.
cplx readout_amplitude(const Setup& setup, const OpticsConfig& cfg);

struct InterferenceReadout {
  std::vector<double> delta;
  std::vector<double> power;  // (1 + Re e^{-i delta} A) / 2, times input power
  cplx amplitude{0.0, 0.0};
  double chi = 0.0;
  double contrast = 0.0;
};

InterferenceReadout interference_readout(const Setup& setup, const OpticsConfig& cfg,
                                         std::span<const double> delta_grid);

// n uniform samples over [0, 2 pi).
std::vector<double> default_delta_grid(std::size_t n = 64);

// Polarization-only transfer matrix of a stage with the displacer replaced
// by diag(1, keep).
Operator2 ideal_stage_operator(const StageConfig& cfg, double plate_retardance, double keep);

struct KrausEquivalenceReport {
  cplx optics{0.0, 0.0};
  cplx kraus{0.0, 0.0};
  double deviation = 0.0;
  double zeta = 0.0;
  std::size_t n_stages = 0;
};

// Compares the optical amplitude with the qubit chain
// <2a,0| M_-(2a, phi_N) ... M_-(2a, phi_1) |2a,0>, phi_j = j * plate
// retardance, sqrt(1 - zeta) = exp(-dx^2 / (2 w0^2)). Uses alpha and dx of
// the first stage; alpha must lie in [0, pi/2].
KrausEquivalenceReport single_stage_kraus_equivalence_check(const Setup& setup,
                                                            const OpticsConfig& cfg);

}  // namespace geophase
