#pragma once

// Two-level state and operator algebra for null-weak polarization
// measurements. Basis ordering is {|up>, |down>} = {vertical, horizontal}.

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace geophase {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Norms below this are treated as an annihilated state.
inline constexpr double kAnnihilationThreshold = 1e-14;

class PureQubitState {
 public:
  PureQubitState() = default;
  // Stores the amplitudes as given; call normalized() to project onto the
  // unit sphere.
  PureQubitState(cplx up, cplx down) : up_(up), down_(down) {}

  // cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>. Throws DomainError
  // unless theta in [0, pi] and phi in [0, 2 pi).
  static PureQubitState from_angles(double theta, double phi);

  cplx up() const { return up_; }
  cplx down() const { return down_; }

  double norm() const;
  PureQubitState normalized() const;
  Vec3 bloch() const;

 private:
  cplx up_{1.0, 0.0};
  cplx down_{0.0, 0.0};
};

// <a|b>
cplx inner(const PureQubitState& a, const PureQubitState& b);

// 2x2 complex matrix in the {|up>, |down>} basis.
class Operator2 {
 public:
  Operator2() = default;
  Operator2(cplx a00, cplx a01, cplx a10, cplx a11) : m_{a00, a01, a10, a11} {}

  static Operator2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Operator2 diagonal(cplx d0, cplx d1) { return {d0, 0.0, 0.0, d1}; }
  // |a><b|
  static Operator2 outer(const PureQubitState& a, const PureQubitState& b);

  cplx operator()(int row, int col) const { return m_[2 * row + col]; }

  Operator2 adjoint() const;
  // Largest entrywise |A - A^dagger|.
  double hermiticity_deviation() const;
  bool is_unitary(double tol = 1e-12) const;

  friend Operator2 operator*(const Operator2& a, const Operator2& b);
  friend Operator2 operator+(const Operator2& a, const Operator2& b);
  friend Operator2 operator*(cplx s, const Operator2& a);
  friend PureQubitState operator*(const Operator2& a, const PureQubitState& v);

 private:
  std::array<cplx, 4> m_{1.0, 0.0, 0.0, 1.0};
};

double max_abs_diff(const Operator2& a, const Operator2& b);

struct MeasurementSpec {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2 pi)
  double zeta = 0.0;   // [0, 1]

  void validate() const;
  Vec3 axis() const;
};

// eta = sqrt(-ln(1 - zeta)); +infinity at zeta = 1.
double strength_eta(double zeta);
// zeta = 1 - exp(-eta^2); eta = +infinity maps to 1.
double zeta_from_eta(double eta);

struct KrausPair {
  Operator2 plus;   // sqrt(zeta) |dn_n><dn_n|
  Operator2 minus;  // |up_n><up_n| + sqrt(1 - zeta) |dn_n><dn_n|
};

KrausPair kraus_pair(const MeasurementSpec& spec);

enum class Readout { plus, minus };

const Operator2& select(const KrausPair& pair, Readout r);

struct KrausUpdate {
  PureQubitState state;  // normalized
  double norm = 0.0;     // sqrt(P(r)) when the input is normalized
};

// Throws AnnihilationError when ||M psi|| < kAnnihilationThreshold.
KrausUpdate apply_kraus(const Operator2& op, const PureQubitState& state);

// <psi0| M_{r_N} ... M_{r_1} |psi0>. Empty sequence gives 1.
cplx sequence_amplitude(std::span<const MeasurementSpec> specs,
                        std::span<const Readout> readouts,
                        const PureQubitState& psi0);

// Normalized post-measurement states psi0, psi1, ..., psiN.
std::vector<PureQubitState> trajectory(std::span<const MeasurementSpec> specs,
                                       std::span<const Readout> readouts,
                                       const PureQubitState& psi0);

// exp(-i angle/2 axis.sigma): rotates Bloch vectors by `angle` about `axis`.
Operator2 bloch_rotation(const Vec3& axis, double angle);

}  // namespace geophase
