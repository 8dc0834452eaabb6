#include "geophase/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "geophase/phase.hpp"
#include "geophase/scan.hpp"

namespace geophase {

namespace {

constexpr double kTol = 1e-9;

cplx field_at(const BeamField& f, Polarization pol, double x, double y) {
  const double w = f.w0();
  const double norm = std::sqrt(2.0 / (kPi * w * w));
  cplx sum{0.0, 0.0};
  for (const GaussianTerm& t : f.terms()) {
    if (t.pol != pol) continue;
    const double dx = x - t.center.x, dy = y - t.center.y;
    sum += t.amp * norm * std::exp(-(dx * dx + dy * dy) / (w * w)) *
           std::polar(1.0, t.tilt.x * x + t.tilt.y * y);
  }
  return sum;
}

double phase_gap(double a, double b, double period) {
  double d = std::fmod(a - b, period);
  if (d < 0.0) d += period;
  return std::min(d, period - d);
}

}  // namespace

bool OracleBattery::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed(); });
}

double OracleBattery::worst_residual() const {
  double w = 0.0;
  for (const OracleCheck& c : checks) w = std::max(w, c.residual);
  return w;
}

cplx overlap_by_quadrature(const BeamField& reference, const BeamField& field, double rel_tol) {
  using boost::math::quadrature::gauss_kronrod;
  double xlo = 0.0, xhi = 0.0, ylo = 0.0, yhi = 0.0;
  for (const BeamField* f : {&reference, &field}) {
    for (const GaussianTerm& t : f->terms()) {
      xlo = std::min(xlo, t.center.x);
      xhi = std::max(xhi, t.center.x);
      ylo = std::min(ylo, t.center.y);
      yhi = std::max(yhi, t.center.y);
    }
  }
  const double pad = 10.0 * field.w0();
  auto inner = [&](double x) {
    auto integrand = [&](double y) {
      cplx s{0.0, 0.0};
      for (Polarization p : {Polarization::y, Polarization::x}) {
        s += std::conj(field_at(reference, p, x, y)) * field_at(field, p, x, y);
      }
      return s;
    };
    return gauss_kronrod<double, 31>::integrate(integrand, ylo - pad, yhi + pad, 15, rel_tol);
  };
  return gauss_kronrod<double, 31>::integrate(inner, xlo - pad, xhi + pad, 15, rel_tol);
}

OracleBattery kraus_bargmann_battery(std::uint64_t seed, std::size_t sequences) {
  OracleBattery b{"kraus-bargmann", {}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> theta(0.0, kPi), phi(0.0, kTwoPi), zeta(0.0, 0.9);
  std::uniform_int_distribution<int> length(1, 6);
  double worst_chain = 0.0, worst_area = 0.0;
  std::size_t done = 0;
  while (done < sequences) {
    const int n = length(rng);
    std::vector<MeasurementSpec> specs;
    for (int j = 0; j < n; ++j) specs.push_back({theta(rng), phi(rng), zeta(rng)});
    const PureQubitState psi0 = PureQubitState::from_angles(theta(rng), phi(rng));
    const std::vector<Readout> nulls(specs.size(), Readout::minus);
    const cplx a = sequence_amplitude(specs, nulls, psi0);
    std::vector<PureQubitState> path = trajectory(specs, nulls, psi0);
    if (std::abs(a) < 1e-6) continue;
    std::reverse(path.begin() + 1, path.end());
    const double bargmann = bargmann_oracle(path);
    std::vector<Vec3> bloch;
    for (const PureQubitState& s : path) bloch.push_back(s.bloch());
    worst_chain = std::max(worst_chain, phase_gap(std::arg(a), bargmann, kTwoPi));
    worst_area = std::max(worst_area, phase_gap(2.0 * bargmann, spherical_excess_oracle(bloch), 2.0 * kTwoPi));
    ++done;
  }
  b.checks.push_back({"chain arg vs Bargmann phase", worst_chain, kTol});
  b.checks.push_back({"2 x Bargmann phase vs spherical excess", worst_area, kTol});
  return b;
}

OracleBattery overlap_quadrature_battery(const OpticsConfig& cfg, std::uint64_t seed, std::size_t fields) {
  OracleBattery b{"overlap-quadrature", {}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(-1.5 * cfg.w0_mm, 1.5 * cfg.w0_mm);
  std::uniform_real_distribution<double> tilt(-3.0 / cfg.w0_mm, 3.0 / cfg.w0_mm);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 3);
  auto random_field = [&] {
    BeamField f(cfg.w0_mm, cfg.wavenumber());
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      for (Polarization p : {Polarization::y, Polarization::x}) {
        f.add({cplx(gauss(rng), gauss(rng)), p, {centre(rng), centre(rng)}, {tilt(rng), tilt(rng)}});
      }
    }
    return f;
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < fields; ++i) {
    const BeamField ref = random_field(), f = random_field();
    const cplx closed = overlap(ref, f);
    const cplx quad = overlap_by_quadrature(ref, f);
    const double scale = std::max(std::abs(closed), 1e-6 * std::sqrt(ref.power() * f.power()));
    worst = std::max(worst, std::abs(closed - quad) / scale);
  }
  b.checks.push_back({"closed form vs quadrature (relative)", worst, 1e-6});
  return b;
}

OracleBattery single_stage_battery(const OpticsConfig& cfg) {
  OracleBattery b{"single-stage-kraus", {}};
  for (int i = 0; i <= 6; ++i) {
    const double alpha = kPi / 2.0 * i / 6.0;
    const KrausEquivalenceReport r = single_stage_kraus_equivalence_check(Setup::uniform(cfg, 1, alpha), cfg);
    b.checks.push_back({"alpha=" + std::to_string(alpha), r.deviation, kTol});
  }
  return b;
}

OracleBattery scale_invariance_battery(const OpticsConfig& cfg, std::size_t n_stages) {
  OracleBattery b{"scale-invariance", {}};
  SetupTemplate base;
  base.optics = cfg;
  base.n_stages = n_stages;
  const std::vector<double> alphas = uniform_grid(0.0, kPi / 2.0, 19);
  for (double factor : {0.5, 2.0, 5.0}) {
    SetupTemplate scaled = base;
    scaled.optics.w0_mm *= factor;
    scaled.optics.dx_mm *= factor;
    double worst = 0.0;
    for (double alpha : alphas) {
      const cplx a = base.amplitude(alpha), s = scaled.amplitude(alpha);
      worst = std::max(worst, std::abs(a - s));
      if (std::abs(a) >= kContrastThreshold) worst = std::max(worst, phase_gap(std::arg(a), std::arg(s), kTwoPi));
    }
    b.checks.push_back({"factor=" + std::to_string(factor), worst, kTol});
  }
  return b;
}

}  // namespace geophase
