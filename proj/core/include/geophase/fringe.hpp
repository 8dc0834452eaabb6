#pragma once

#include <optional>
#include <span>

namespace geophase {

struct FringeSample {
  double delta = 0.0;
  double power = 0.0;
};

struct FringeFit {
  double chi = 0.0;        // (-pi, pi]
  double contrast = 0.0;   // c1 >= 0
  double offset = 0.0;     // c0
  double residual = 0.0;   // rms of the fit residuals
  bool phase_defined = true;
  // Standard error of chi from the supplied noise level, when given.
  std::optional<double> chi_stderr;
};

// Linear least squares of power = c0 + c1 cos(delta - chi). Needs at least
// three samples spanning more than pi in delta (DomainError otherwise).
// When c1 < kContrastThreshold the phase is flagged as undefined.
FringeFit fringe_fit(std::span<const FringeSample> samples,
                     std::optional<double> noise_sigma = std::nullopt);

}  // namespace geophase
