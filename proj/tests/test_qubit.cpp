#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "geophase/errors.hpp"
#include "geophase/qubit.hpp"

using namespace geophase;

namespace {

using Mat2 = Eigen::Matrix2cd;

Mat2 to_eigen(const Operator2& op) {
  Mat2 m;
  m << op(0, 0), op(0, 1), op(1, 0), op(1, 1);
  return m;
}

double max_entry(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

// Kraus pair rebuilt from the spectral decomposition of n.sigma.
std::pair<Mat2, Mat2> kraus_by_eigensystem(double theta, double phi, double zeta) {
  const double nx = std::sin(theta) * std::cos(phi);
  const double ny = std::sin(theta) * std::sin(phi);
  const double nz = std::cos(theta);
  Mat2 ns;
  ns << nz, cplx(nx, -ny), cplx(nx, ny), -nz;
  Eigen::SelfAdjointEigenSolver<Mat2> es(ns);
  // eigenvalues ascending: -1 then +1
  const Eigen::Vector2cd dn = es.eigenvectors().col(0), up = es.eigenvectors().col(1);
  const Mat2 p_up = up * up.adjoint(), p_dn = dn * dn.adjoint();
  return {std::sqrt(zeta) * p_dn, p_up + std::sqrt(1.0 - zeta) * p_dn};
}

MeasurementSpec random_spec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> th(0.0, kPi), ph(0.0, kTwoPi), ze(0.0, 1.0);
  return {th(rng), ph(rng), ze(rng)};
}

Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  const double d = axis[0] * v[0] + axis[1] * v[1] + axis[2] * v[2];
  const Vec3 cr{axis[1] * v[2] - axis[2] * v[1], axis[2] * v[0] - axis[0] * v[2],
                axis[0] * v[1] - axis[1] * v[0]};
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = v[i] * c + cr[i] * s + axis[i] * d * (1.0 - c);
  return out;
}

}  // namespace

// ---------- states ----------
TEST(QubitState, NorthPoleIgnoresPhi) {
  const PureQubitState s = PureQubitState::from_angles(0.0, 1.3);
  EXPECT_NEAR(std::abs(s.up() - cplx(1.0, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.down()), 0.0, 1e-15);
}

TEST(QubitState, SouthPole) {
  const PureQubitState s = PureQubitState::from_angles(kPi, 0.0);
  EXPECT_NEAR(std::abs(s.up()), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.down() - cplx(1.0, 0.0)), 0.0, 1e-15);
}

TEST(QubitState, EquatorQuarterTurn) {
  const PureQubitState s = PureQubitState::from_angles(kPi / 2, kPi / 2);
  EXPECT_NEAR(std::abs(s.up() - cplx(M_SQRT1_2, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.down() - cplx(0.0, M_SQRT1_2)), 0.0, 1e-15);
}

TEST(QubitState, RejectsOutOfRangeAngles) {
  EXPECT_THROW(PureQubitState::from_angles(-0.1, 0.0), DomainError);
  EXPECT_THROW(PureQubitState::from_angles(kPi + 1e-9, 0.0), DomainError);
  EXPECT_THROW(PureQubitState::from_angles(1.0, kTwoPi), DomainError);
}

TEST(QubitState, BlochVectorMatchesAngles) {
  const double th = 0.7, ph = 2.1;
  const Vec3 b = PureQubitState::from_angles(th, ph).bloch();
  EXPECT_NEAR(b[0], std::sin(th) * std::cos(ph), 1e-14);
  EXPECT_NEAR(b[1], std::sin(th) * std::sin(ph), 1e-14);
  EXPECT_NEAR(b[2], std::cos(th), 1e-14);
}

// ---------- kraus operators ----------
TEST(Kraus, ProjectiveAlongZ) {
  const KrausPair k = kraus_pair({0.0, 0.0, 1.0});
  EXPECT_LT(max_abs_diff(k.minus, Operator2::diagonal(1.0, 0.0)), 1e-15);
  EXPECT_LT(max_abs_diff(k.plus, Operator2::diagonal(0.0, 1.0)), 1e-15);
}

TEST(Kraus, ZeroStrengthIsIdentity) {
  const KrausPair k = kraus_pair({0.0, 0.0, 0.0});
  EXPECT_LT(max_abs_diff(k.minus, Operator2::identity()), 1e-15);
  EXPECT_LT(max_abs_diff(k.plus, Operator2(0.0, 0.0, 0.0, 0.0)), 1e-15);
}

TEST(Kraus, EquatorialHalfStrengthMatchesEigensystem) {
  const KrausPair k = kraus_pair({kPi / 2, 0.0, 0.5});
  // x basis by hand: |+x><+x| + (1/sqrt 2)|-x><-x|
  const double a = 0.5 * (1.0 + M_SQRT1_2), b = 0.5 * (1.0 - M_SQRT1_2);
  EXPECT_LT(max_abs_diff(k.minus, Operator2(a, b, b, a)), 1e-14);
  const auto [plus, minus] = kraus_by_eigensystem(kPi / 2, 0.0, 0.5);
  EXPECT_LT(max_entry(to_eigen(k.minus) - minus), 1e-14);
  EXPECT_LT(max_entry(to_eigen(k.plus) - plus), 1e-14);
}

TEST(Kraus, RandomSpecsMatchEigensystem) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const MeasurementSpec s = random_spec(rng);
    const KrausPair k = kraus_pair(s);
    const auto [plus, minus] = kraus_by_eigensystem(s.theta, s.phi, s.zeta);
    EXPECT_LT(max_entry(to_eigen(k.minus) - minus), 1e-12) << i;
    EXPECT_LT(max_entry(to_eigen(k.plus) - plus), 1e-12) << i;
  }
}

TEST(Kraus, Completeness) {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const KrausPair k = kraus_pair(random_spec(rng));
    const Operator2 sum = k.plus.adjoint() * k.plus + k.minus.adjoint() * k.minus;
    worst = std::max(worst, max_abs_diff(sum, Operator2::identity()));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Kraus, Hermitian) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const KrausPair k = kraus_pair(random_spec(rng));
    EXPECT_LT(k.plus.hermiticity_deviation(), 1e-14);
    EXPECT_LT(k.minus.hermiticity_deviation(), 1e-14);
  }
}

TEST(Kraus, RotationCovariance) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    const MeasurementSpec s = random_spec(rng);
    Vec3 axis{g(rng), g(rng), g(rng)};
    const double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    for (double& c : axis) c /= len;
    const double angle = ang(rng);
    const Vec3 n = rotate(s.axis(), axis, angle);
    double phi = std::atan2(n[1], n[0]);
    if (phi < 0.0) phi += kTwoPi;
    if (phi >= kTwoPi) phi = 0.0;
    const MeasurementSpec r{std::acos(std::clamp(n[2], -1.0, 1.0)), phi, s.zeta};
    const Operator2 u = bloch_rotation(axis, angle);
    const KrausPair k = kraus_pair(s), kr = kraus_pair(r);
    EXPECT_LT(max_abs_diff(kr.minus, u * k.minus * u.adjoint()), 1e-12) << i;
    EXPECT_LT(max_abs_diff(kr.plus, u * k.plus * u.adjoint()), 1e-12) << i;
  }
}

TEST(Kraus, RejectsInvalidSpec) {
  EXPECT_THROW(kraus_pair({0.0, 0.0, 1.5}), DomainError);
  EXPECT_THROW(kraus_pair({-0.1, 0.0, 0.5}), DomainError);
  EXPECT_THROW(kraus_pair({0.1, -0.1, 0.5}), DomainError);
}

// ---------- strength ----------
TEST(Strength, Examples) {
  EXPECT_EQ(strength_eta(0.0), 0.0);
  EXPECT_NEAR(strength_eta(1.0 - std::exp(-1.0)), 1.0, 1e-14);
  EXPECT_NEAR(strength_eta(0.5), std::sqrt(std::log(2.0)), 1e-14);
  EXPECT_NEAR(strength_eta(0.5), 0.8326, 5e-5);
  EXPECT_TRUE(std::isinf(strength_eta(1.0)));
  EXPECT_EQ(zeta_from_eta(std::numeric_limits<double>::infinity()), 1.0);
  EXPECT_THROW(strength_eta(1.1), DomainError);
  EXPECT_THROW(zeta_from_eta(-1.0), DomainError);
}

TEST(Strength, RoundTripOnLogGrid) {
  for (int k = 0; k <= 48; ++k) {
    const double zeta = std::pow(10.0, -12.0 + 0.25 * k);
    EXPECT_NEAR(zeta_from_eta(strength_eta(zeta)), zeta, 1e-12) << zeta;
    const double near_one = 1.0 - zeta;
    EXPECT_NEAR(zeta_from_eta(strength_eta(near_one)), near_one, 1e-12) << near_one;
  }
}

// ---------- apply_kraus ----------
TEST(ApplyKraus, IdentityKeepsState) {
  const PureQubitState psi = PureQubitState::from_angles(1.1, 0.4);
  const KrausUpdate u = apply_kraus(Operator2::identity(), psi);
  EXPECT_NEAR(u.norm, 1.0, 1e-15);
  EXPECT_NEAR(std::abs(u.state.up() - psi.up()), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u.state.down() - psi.down()), 0.0, 1e-15);
}

TEST(ApplyKraus, OrthogonalProjectionAnnihilates) {
  const PureQubitState up(1.0, 0.0), down(0.0, 1.0);
  EXPECT_THROW(apply_kraus(Operator2::outer(up, up), down), AnnihilationError);
}

TEST(ApplyKraus, PartialNullOnPlusState) {
  const PureQubitState plus(M_SQRT1_2, M_SQRT1_2);
  const KrausUpdate u = apply_kraus(kraus_pair({0.0, 0.0, 0.75}).minus, plus);
  EXPECT_NEAR(u.norm, std::sqrt(0.625), 1e-15);
  EXPECT_NEAR(std::abs(u.state.down() / u.state.up() - cplx(0.5, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(u.state.norm(), 1.0, 1e-15);
}

// ---------- sequences ----------
TEST(Sequence, EmptyGivesOne) {
  const cplx a = sequence_amplitude({}, {}, PureQubitState::from_angles(0.3, 0.2));
  EXPECT_LT(std::abs(a - cplx(1.0, 0.0)), 1e-15);
}

TEST(Sequence, EigenstateFixedPoint) {
  const MeasurementSpec s{1.2, 0.8, 1.0};
  const std::vector<MeasurementSpec> specs{s};
  const std::vector<Readout> r{Readout::minus};
  const cplx a = sequence_amplitude(specs, r, PureQubitState::from_angles(s.theta, s.phi));
  EXPECT_NEAR(std::abs(a - cplx(1.0, 0.0)), 0.0, 1e-14);
}

TEST(Sequence, EquatorialProjectiveSquare) {
  const std::vector<MeasurementSpec> specs{
      {kPi / 2, kPi / 2, 1.0}, {kPi / 2, kPi, 1.0}, {kPi / 2, 3 * kPi / 2, 1.0}};
  const std::vector<Readout> r(3, Readout::minus);
  const cplx a = sequence_amplitude(specs, r, PureQubitState::from_angles(kPi / 2, 0.0));
  // each of the four steps is a quarter turn: |<.|.>| = 1/sqrt 2
  EXPECT_NEAR(std::abs(a), 0.25, 1e-14);
  EXPECT_NEAR(std::abs(std::arg(a)), kPi, 1e-12);
}

TEST(Sequence, PlusReadoutAndLengthMismatch) {
  const std::vector<MeasurementSpec> specs{{0.0, 0.0, 0.5}};
  const std::vector<Readout> plus{Readout::plus};
  const cplx a = sequence_amplitude(specs, plus, PureQubitState(0.0, 1.0));
  EXPECT_NEAR(std::abs(a - cplx(std::sqrt(0.5), 0.0)), 0.0, 1e-15);
  const std::vector<Readout> two(2, Readout::minus);
  EXPECT_THROW(sequence_amplitude(specs, two, PureQubitState()), DomainError);
}

TEST(Sequence, TrajectoryIsNormalizedAndMatchesProducts) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    std::vector<MeasurementSpec> specs;
    for (int j = 0; j < 4; ++j) {
      MeasurementSpec s = random_spec(rng);
      s.zeta *= 0.9;
      specs.push_back(s);
    }
    const std::vector<Readout> r(specs.size(), Readout::minus);
    const PureQubitState psi0 = PureQubitState::from_angles(0.9, 0.1);
    const auto path = trajectory(specs, r, psi0);
    ASSERT_EQ(path.size(), specs.size() + 1);
    PureQubitState v = psi0;
    for (std::size_t j = 0; j < specs.size(); ++j) {
      v = kraus_pair(specs[j]).minus * v;
      EXPECT_NEAR(path[j + 1].norm(), 1.0, 1e-14);
      EXPECT_NEAR(std::abs(inner(path[j + 1], v)), v.norm(), 1e-12);
    }
    EXPECT_NEAR(std::abs(sequence_amplitude(specs, r, psi0) - inner(psi0, v)), 0.0, 1e-14);
  }
}
