#include "geophase/optics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <type_traits>
#include <variant>
#include <string>

#include "geophase/errors.hpp"

namespace geophase {

namespace {

constexpr double kMergeTol = 1e-9;
// Terms below this magnitude are dropped during merging.
constexpr double kNegligibleAmp = 1e-18;

bool same_spatial_mode(const GaussianTerm& a, const GaussianTerm& b) {
  return std::abs(a.center.x - b.center.x) <= kMergeTol &&
         std::abs(a.center.y - b.center.y) <= kMergeTol &&
         std::abs(a.tilt.x - b.tilt.x) <= kMergeTol && std::abs(a.tilt.y - b.tilt.y) <= kMergeTol;
}

// ∫ g1^* g2 for unit-normalized modes of common waist w.
cplx mode_overlap(const GaussianTerm& a, const GaussianTerm& b, double w) {
  const double dcx = b.center.x - a.center.x, dcy = b.center.y - a.center.y;
  const double dqx = b.tilt.x - a.tilt.x, dqy = b.tilt.y - a.tilt.y;
  const double mx = 0.5 * (a.center.x + b.center.x), my = 0.5 * (a.center.y + b.center.y);
  const double mag = std::exp(-(dcx * dcx + dcy * dcy) / (2.0 * w * w) -
                              w * w * (dqx * dqx + dqy * dqy) / 8.0);
  return std::polar(mag, dqx * mx + dqy * my);
}

}  // namespace

void OpticsConfig::validate() const {
  if (!(wavelength_nm > 0.0)) throw DomainError("wavelength must be positive");
  if (!(w0_mm > 0.0)) throw DomainError("beam waist w0 must be positive");
  if (!(dx_mm >= 0.0)) throw DomainError("walk-off dx must be non-negative");
  if (!std::isfinite(gamma_rad)) throw DomainError("gamma must be finite");
  if (!std::isfinite(tilt_scale)) throw DomainError("tilt_scale must be finite");
}

double OpticsConfig::wavenumber() const { return kTwoPi / (wavelength_nm * 1e-6); }

BeamField::BeamField(double w0_mm, double wavenumber) : w0_(w0_mm), k_(wavenumber) {
  if (!(w0_mm > 0.0)) throw DomainError("beam waist w0 must be positive");
  if (!(wavenumber > 0.0)) throw DomainError("wavenumber must be positive");
}

BeamField BeamField::gaussian(const OpticsConfig& cfg, cplx e_y, cplx e_x) {
  cfg.validate();
  BeamField f(cfg.w0_mm, cfg.wavenumber());
  f.add({e_y, Polarization::y, {}, {}});
  f.add({e_x, Polarization::x, {}, {}});
  return f;
}

void BeamField::add(const GaussianTerm& term) {
  for (auto it = terms_.begin(); it != terms_.end(); ++it) {
    if (it->pol == term.pol && same_spatial_mode(*it, term)) {
      it->amp += term.amp;
      if (std::abs(it->amp) < kNegligibleAmp) terms_.erase(it);
      return;
    }
  }
  if (std::abs(term.amp) >= kNegligibleAmp) terms_.push_back(term);
}

BeamField BeamField::projected(Polarization pol) const {
  BeamField out(w0_, k_);
  for (const GaussianTerm& t : terms_) {
    if (t.pol == pol) out.terms_.push_back(t);
  }
  return out;
}

double BeamField::power() const { return overlap(*this, *this).real(); }

Operator2 jones_rotation(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c, -s, s, c};
}

Operator2 jones_phase_plate(double phi, double axis_angle) {
  const Operator2 d = Operator2::diagonal(std::polar(1.0, phi / 2.0), std::polar(1.0, -phi / 2.0));
  if (axis_angle == 0.0) return d;
  return jones_rotation(axis_angle) * d * jones_rotation(-axis_angle);
}

BeamField apply_jones(const Operator2& op, const BeamField& field) {
  struct Mode {
    GaussianTerm shape;
    cplx ey{0.0, 0.0};
    cplx ex{0.0, 0.0};
  };
  std::vector<Mode> modes;
  for (const GaussianTerm& t : field.terms()) {
    auto it = std::find_if(modes.begin(), modes.end(),
                           [&](const Mode& m) { return same_spatial_mode(m.shape, t); });
    if (it == modes.end()) {
      modes.push_back({t, {}, {}});
      it = std::prev(modes.end());
    }
    (t.pol == Polarization::y ? it->ey : it->ex) += t.amp;
  }
  BeamField out(field.w0(), field.wavenumber());
  for (const Mode& m : modes) {
    const PureQubitState v = op * PureQubitState{m.ey, m.ex};
    out.add({v.up(), Polarization::y, m.shape.center, m.shape.tilt});
    out.add({v.down(), Polarization::x, m.shape.center, m.shape.tilt});
  }
  return out;
}

Vec2 deflection_wavevector(const BeamDisplacer& bd, double wavenumber) {
  const double q = bd.tilt_scale * wavenumber * std::sin(bd.beta_rad);
  return {q * std::cos(bd.nu_rad), q * std::sin(bd.nu_rad)};
}

BeamField apply_beam_displacer(const BeamField& field, const BeamDisplacer& bd) {
  const Vec2 q = deflection_wavevector(bd, field.wavenumber());
  BeamField out(field.w0(), field.wavenumber());
  for (GaussianTerm t : field.terms()) {
    if (t.pol == Polarization::x) {
      // Shifting e^{i q.r} by d leaves a constant e^{-i q.d}.
      t.amp *= std::polar(1.0, bd.gamma_internal - t.tilt.x * bd.dx_mm);
      t.center.x += bd.dx_mm;
      t.tilt.x += q.x;
      t.tilt.y += q.y;
    }
    out.add(t);
  }
  return out;
}

std::vector<Element> build_stage(const StageConfig& cfg, double plate_retardance) {
  return {jones_phase_plate(plate_retardance, cfg.alpha),
          BeamDisplacer{cfg.dx, cfg.beta, cfg.nu, 0.0, cfg.tilt_scale},
          jones_phase_plate(cfg.gamma, 0.0)};
}

std::vector<Element> build_naive_stage(double theta, double phi, const StageConfig& cfg) {
  return {jones_phase_plate(phi),
          jones_rotation(-theta / 2.0),
          BeamDisplacer{cfg.dx, cfg.beta, cfg.nu, 0.0, cfg.tilt_scale},
          jones_phase_plate(cfg.gamma),
          jones_rotation(theta / 2.0),
          jones_phase_plate(-phi)};
}

double default_plate_retardance(std::size_t n_stages) {
  return -kTwoPi / static_cast<double>(n_stages + 1);
}

Setup Setup::uniform(const OpticsConfig& cfg, std::size_t n_stages, double alpha) {
  Setup s;
  s.plate_retardance = default_plate_retardance(n_stages);
  s.stages.assign(n_stages, StageConfig{alpha, cfg.gamma_rad, cfg.dx_mm, 0.0, 0.0, cfg.tilt_scale});
  return s;
}

std::vector<Element> Setup::elements() const {
  std::vector<Element> out;
  out.reserve(3 * stages.size() + 1);
  for (const StageConfig& st : stages) {
    for (Element& e : build_stage(st, plate_retardance)) out.push_back(std::move(e));
  }
  if (closing_plate && !stages.empty()) {
    const double n = static_cast<double>(stages.size());
    out.emplace_back(jones_phase_plate(-n * plate_retardance, stages.back().alpha));
  }
  return out;
}

BeamField propagate(std::span<const Element> elements, BeamField field, std::size_t max_terms) {
  for (const Element& e : elements) {
    field = std::visit(
        [&](const auto& el) -> BeamField {
          using T = std::decay_t<decltype(el)>;
          if constexpr (std::is_same_v<T, Operator2>) {
            return apply_jones(el, field);
          } else {
            return apply_beam_displacer(field, el);
          }
        },
        e);
    if (field.size() > max_terms) {
      throw ResourceError("beam term count " + std::to_string(field.size()) +
                          " exceeds cap " + std::to_string(max_terms));
    }
  }
  return field;
}

BeamField propagate(const Setup& setup, const BeamField& input, std::size_t max_terms) {
  const std::vector<Element> els = setup.elements();
  return propagate(els, input, max_terms);
}

cplx overlap(const BeamField& reference, const BeamField& field) {
  if (reference.w0() != field.w0() || reference.wavenumber() != field.wavenumber()) {
    throw DomainError("overlap of fields with different waist or wavenumber");
  }
  cplx sum{0.0, 0.0};
  for (const GaussianTerm& a : reference.terms()) {
    for (const GaussianTerm& b : field.terms()) {
      if (a.pol != b.pol) continue;
      sum += std::conj(a.amp) * b.amp * mode_overlap(a, b, field.w0());
    }
  }
  return sum;
}

cplx readout_amplitude(const Setup& setup, const OpticsConfig& cfg) {
  const BeamField input = BeamField::gaussian(cfg, 1.0, 0.0);
  const BeamField out = propagate(setup, input);
  return overlap(input.projected(Polarization::y), out.projected(Polarization::y));
}

InterferenceReadout interference_readout(const Setup& setup, const OpticsConfig& cfg,
                                         std::span<const double> delta_grid) {
  if (delta_grid.empty()) throw DomainError("delta grid must be non-empty");
  const BeamField input = BeamField::gaussian(cfg, 1.0, 0.0);
  const BeamField out = propagate(setup, input);
  InterferenceReadout r;
  r.amplitude = overlap(input.projected(Polarization::y), out.projected(Polarization::y));
  r.chi = std::arg(r.amplitude);
  r.contrast = std::abs(r.amplitude);
  const double p_in = input.power();
  r.delta.assign(delta_grid.begin(), delta_grid.end());
  r.power.reserve(delta_grid.size());
  for (double d : delta_grid) {
    r.power.push_back(0.5 * p_in * (1.0 + (std::polar(1.0, -d) * r.amplitude).real()));
  }
  return r;
}

std::vector<double> default_delta_grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
  return g;
}

Operator2 ideal_stage_operator(const StageConfig& cfg, double plate_retardance, double keep) {
  return jones_phase_plate(cfg.gamma) * Operator2::diagonal(1.0, keep) *
         jones_phase_plate(plate_retardance, cfg.alpha);
}

KrausEquivalenceReport single_stage_kraus_equivalence_check(const Setup& setup,
                                                            const OpticsConfig& cfg) {
  KrausEquivalenceReport r;
  r.n_stages = setup.stages.size();
  r.optics = readout_amplitude(setup, cfg);
  if (setup.stages.empty()) {
    r.kraus = 1.0;
    r.deviation = std::abs(r.optics - r.kraus);
    return r;
  }
  const StageConfig& first = setup.stages.front();
  if (!(first.alpha >= 0.0 && first.alpha <= kPi / 2.0)) {
    throw DomainError("equivalence check needs alpha in [0, pi/2]");
  }
  const double theta = std::min(2.0 * first.alpha, kPi);
  const double eta = first.dx / cfg.w0_mm;
  r.zeta = zeta_from_eta(eta);
  std::vector<MeasurementSpec> specs;
  for (std::size_t j = 1; j <= setup.stages.size(); ++j) {
    double phi = std::fmod(static_cast<double>(j) * setup.plate_retardance, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    if (phi >= kTwoPi) phi = 0.0;
    specs.push_back({theta, phi, r.zeta});
  }
  const std::vector<Readout> nulls(specs.size(), Readout::minus);
  r.kraus = sequence_amplitude(specs, nulls, PureQubitState::from_angles(theta, 0.0));
  r.deviation = std::abs(r.optics - r.kraus);
  return r;
}

}  // namespace geophase
