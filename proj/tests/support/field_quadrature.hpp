#pragma once

// Brute-force overlap of term-superposition fields by nested adaptive
// Gauss-Kronrod quadrature of the sampled field values.

#include <algorithm>
#include <cmath>
#include <complex>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "geophase/optics.hpp"

namespace oracle {

inline std::complex<double> sample(const geophase::BeamField& f, geophase::Polarization pol, double x,
                                   double y) {
  const double w = f.w0();
  const double norm = std::sqrt(2.0 / (3.14159265358979323846 * w * w));
  std::complex<double> s{0.0, 0.0};
  for (const geophase::GaussianTerm& t : f.terms()) {
    if (t.pol != pol) continue;
    const double rx = x - t.center.x, ry = y - t.center.y;
    s += t.amp * norm * std::exp(-(rx * rx + ry * ry) / (w * w)) *
         std::polar(1.0, t.tilt.x * x + t.tilt.y * y);
  }
  return s;
}

inline std::complex<double> quadrature_overlap(const geophase::BeamField& ref, const geophase::BeamField& f,
                                               double rel_tol = 1e-11) {
  using boost::math::quadrature::gauss_kronrod;
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  for (const geophase::BeamField* g : {&ref, &f}) {
    for (const auto& t : g->terms()) {
      x0 = std::min(x0, t.center.x);
      x1 = std::max(x1, t.center.x);
      y0 = std::min(y0, t.center.y);
      y1 = std::max(y1, t.center.y);
    }
  }
  const double pad = 9.0 * f.w0();
  auto row = [&](double x) {
    auto col = [&](double y) {
      std::complex<double> s{0.0, 0.0};
      for (auto pol : {geophase::Polarization::y, geophase::Polarization::x}) {
        s += std::conj(sample(ref, pol, x, y)) * sample(f, pol, x, y);
      }
      return s;
    };
    return gauss_kronrod<double, 61>::integrate(col, y0 - pad, y1 + pad, 12, rel_tol);
  };
  return gauss_kronrod<double, 61>::integrate(row, x0 - pad, x1 + pad, 12, rel_tol);
}

}  // namespace oracle
