#include "geophase/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "geophase/errors.hpp"

namespace geophase {

PureQubitState PureQubitState::from_angles(double theta, double phi) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw DomainError("theta must lie in [0, pi], got " + std::to_string(theta));
  }
  if (!(phi >= 0.0 && phi < kTwoPi)) {
    throw DomainError("phi must lie in [0, 2pi), got " + std::to_string(phi));
  }
  return {std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi)};
}

double PureQubitState::norm() const { return std::sqrt(std::norm(up_) + std::norm(down_)); }

PureQubitState PureQubitState::normalized() const {
  const double n = norm();
  if (n < kAnnihilationThreshold) {
    throw AnnihilationError("cannot normalize a zero state");
  }
  return {up_ / n, down_ / n};
}

Vec3 PureQubitState::bloch() const {
  const PureQubitState s = normalized();
  const cplx c = std::conj(s.up_) * s.down_;
  return {2.0 * c.real(), 2.0 * c.imag(), std::norm(s.up_) - std::norm(s.down_)};
}

cplx inner(const PureQubitState& a, const PureQubitState& b) {
  return std::conj(a.up()) * b.up() + std::conj(a.down()) * b.down();
}

Operator2 Operator2::outer(const PureQubitState& a, const PureQubitState& b) {
  return {a.up() * std::conj(b.up()), a.up() * std::conj(b.down()),
          a.down() * std::conj(b.up()), a.down() * std::conj(b.down())};
}

Operator2 Operator2::adjoint() const {
  return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
}

double Operator2::hermiticity_deviation() const { return max_abs_diff(*this, adjoint()); }

bool Operator2::is_unitary(double tol) const {
  return max_abs_diff(adjoint() * (*this), identity()) < tol;
}

Operator2 operator*(const Operator2& a, const Operator2& b) {
  return {a.m_[0] * b.m_[0] + a.m_[1] * b.m_[2], a.m_[0] * b.m_[1] + a.m_[1] * b.m_[3],
          a.m_[2] * b.m_[0] + a.m_[3] * b.m_[2], a.m_[2] * b.m_[1] + a.m_[3] * b.m_[3]};
}

Operator2 operator+(const Operator2& a, const Operator2& b) {
  return {a.m_[0] + b.m_[0], a.m_[1] + b.m_[1], a.m_[2] + b.m_[2], a.m_[3] + b.m_[3]};
}

Operator2 operator*(cplx s, const Operator2& a) {
  return {s * a.m_[0], s * a.m_[1], s * a.m_[2], s * a.m_[3]};
}

PureQubitState operator*(const Operator2& a, const PureQubitState& v) {
  return {a.m_[0] * v.up() + a.m_[1] * v.down(), a.m_[2] * v.up() + a.m_[3] * v.down()};
}

double max_abs_diff(const Operator2& a, const Operator2& b) {
  double worst = 0.0;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
  }
  return worst;
}

void MeasurementSpec::validate() const {
  if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("measurement theta outside [0, pi]");
  if (!(phi >= 0.0 && phi < kTwoPi)) throw DomainError("measurement phi outside [0, 2pi)");
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw DomainError("measurement zeta outside [0, 1]");
}

Vec3 MeasurementSpec::axis() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

double strength_eta(double zeta) {
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw DomainError("zeta outside [0, 1]");
  if (zeta == 1.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(-std::log1p(-zeta));
}

double zeta_from_eta(double eta) {
  if (!(eta >= 0.0)) throw DomainError("eta must be non-negative");
  if (std::isinf(eta)) return 1.0;
  return -std::expm1(-eta * eta);
}

KrausPair kraus_pair(const MeasurementSpec& spec) {
  spec.validate();
  const PureQubitState up = PureQubitState::from_angles(spec.theta, spec.phi);
  const PureQubitState down{-std::polar(std::sin(spec.theta / 2.0), -spec.phi),
                            std::cos(spec.theta / 2.0)};
  const Operator2 p_up = Operator2::outer(up, up);
  const Operator2 p_down = Operator2::outer(down, down);
  // zeta == 1 takes the projector branch exactly.
  const double keep = spec.zeta == 1.0 ? 0.0 : std::sqrt(1.0 - spec.zeta);
  return {std::sqrt(spec.zeta) * p_down, p_up + cplx(keep) * p_down};
}

const Operator2& select(const KrausPair& pair, Readout r) {
  return r == Readout::plus ? pair.plus : pair.minus;
}

KrausUpdate apply_kraus(const Operator2& op, const PureQubitState& state) {
  const PureQubitState out = op * state;
  const double n = out.norm();
  if (n < kAnnihilationThreshold) {
    throw AnnihilationError("Kraus operator annihilated the state");
  }
  return {{out.up() / n, out.down() / n}, n};
}

namespace {

void check_lengths(std::span<const MeasurementSpec> specs, std::span<const Readout> readouts) {
  if (specs.size() != readouts.size()) {
    throw DomainError("measurement and readout lists differ in length");
  }
}

}  // namespace

cplx sequence_amplitude(std::span<const MeasurementSpec> specs, std::span<const Readout> readouts,
                        const PureQubitState& psi0) {
  check_lengths(specs, readouts);
  PureQubitState v = psi0;
  for (std::size_t j = 0; j < specs.size(); ++j) {
    v = select(kraus_pair(specs[j]), readouts[j]) * v;
  }
  return inner(psi0, v);
}

std::vector<PureQubitState> trajectory(std::span<const MeasurementSpec> specs,
                                       std::span<const Readout> readouts,
                                       const PureQubitState& psi0) {
  check_lengths(specs, readouts);
  std::vector<PureQubitState> states{psi0.normalized()};
  states.reserve(specs.size() + 1);
  for (std::size_t j = 0; j < specs.size(); ++j) {
    states.push_back(apply_kraus(select(kraus_pair(specs[j]), readouts[j]), states.back()).state);
  }
  return states;
}

Operator2 bloch_rotation(const Vec3& axis, double angle) {
  const double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (len == 0.0) throw DomainError("rotation axis must be non-zero");
  const double nx = axis[0] / len, ny = axis[1] / len, nz = axis[2] / len;
  const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
  const cplx i{0.0, 1.0};
  // c*1 - i s (n.sigma)
  return {c - i * s * nz, -i * s * cplx(nx, -ny), -i * s * cplx(nx, ny), c + i * s * nz};
}

}  // namespace geophase
