#include "geophase/fringe.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "geophase/errors.hpp"
#include "geophase/phase.hpp"

namespace geophase {

FringeFit fringe_fit(std::span<const FringeSample> samples, std::optional<double> noise_sigma) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < 3) throw DomainError("fringe fit needs at least three samples");
  const auto [lo, hi] = std::minmax_element(
      samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.delta < b.delta; });
  if (!(hi->delta - lo->delta > kPi)) throw DomainError("fringe samples must span more than pi");

  // power = c0 + a cos(delta) + b sin(delta), a = c1 cos(chi), b = c1 sin(chi)
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = samples[static_cast<std::size_t>(i)].delta;
    design(i, 0) = 1.0;
    design(i, 1) = std::cos(d);
    design(i, 2) = std::sin(d);
    y(i) = samples[static_cast<std::size_t>(i)].power;
  }
  const Eigen::Vector3d c = design.colPivHouseholderQr().solve(y);

  FringeFit fit;
  fit.offset = c(0);
  fit.contrast = std::hypot(c(1), c(2));
  fit.chi = std::atan2(c(2), c(1));
  if (fit.chi == -kPi) fit.chi = kPi;
  fit.residual = std::sqrt((design * c - y).squaredNorm() / static_cast<double>(n));
  fit.phase_defined = fit.contrast >= kContrastThreshold;
  if (!fit.phase_defined) fit.chi = 0.0;
  if (noise_sigma && fit.phase_defined) {
    fit.chi_stderr = *noise_sigma / (fit.contrast * std::sqrt(0.5 * static_cast<double>(n)));
  }
  return fit;
}

}  // namespace geophase
