#include "geophase/phase.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "geophase/csv.hpp"
#include "geophase/errors.hpp"

namespace geophase {

namespace {

double wrap_to_pi(double x) { return x - kTwoPi * std::round(x / kTwoPi); }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double distance(const Vec3& a, const Vec3& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                   (a[2] - b[2]) * (a[2] - b[2]));
}

Vec3 negated(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }

Vec3 unit(const Vec3& a) {
  const double n = std::sqrt(dot(a, a));
  if (n == 0.0) throw DomainError("zero vector on the Bloch sphere");
  return {a[0] / n, a[1] / n, a[2] / n};
}

// Signed area of the geodesic triangle (a, b, c).
double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double num = dot(a, cross(b, c));
  const double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
  return 2.0 * std::atan2(num, den);
}

struct Sample {
  double x;
  cplx amp;
};

bool sample_valid(const Sample& s) { return std::abs(s.amp) >= kContrastThreshold; }

}  // namespace

ProtocolFamily ProtocolFamily::uniform(int n_measurements, double zeta, std::size_t points) {
  if (points < 2) throw DomainError("theta grid needs at least two points");
  ProtocolFamily f;
  f.n_measurements = n_measurements;
  f.zeta = zeta;
  f.theta_grid.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    f.theta_grid[i] = kPi * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  f.theta_grid.back() = kPi;
  return f;
}

void ProtocolFamily::validate() const {
  if (n_measurements < 1) throw DomainError("protocol needs at least one measurement");
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw DomainError("zeta outside [0, 1]");
  if (theta_grid.size() < 2) throw DomainError("theta grid needs at least two points");
  if (theta_grid.front() != 0.0 || theta_grid.back() != kPi) {
    throw DomainError("theta grid must start at 0 and end at pi");
  }
  if (!std::is_sorted(theta_grid.begin(), theta_grid.end(), std::less_equal<>{})) {
    throw DomainError("theta grid must be strictly increasing");
  }
}

std::vector<MeasurementSpec> ProtocolFamily::measurements(double theta) const {
  std::vector<MeasurementSpec> specs;
  specs.reserve(static_cast<std::size_t>(n_measurements));
  for (int j = 1; j <= n_measurements; ++j) specs.push_back({theta, azimuth(j), zeta});
  return specs;
}

cplx protocol_amplitude(int n_measurements, double zeta, double theta) {
  const PureQubitState psi0 = PureQubitState::from_angles(theta, 0.0);
  PureQubitState v = psi0;
  for (int j = 1; j <= n_measurements; ++j) {
    const MeasurementSpec spec{theta, kTwoPi * j / (n_measurements + 1), zeta};
    v = kraus_pair(spec).minus * v;
  }
  return inner(psi0, v);
}

std::vector<PhasePoint> sample_phase_curve(const std::function<cplx(double)>& amplitude,
                                           std::span<const double> grid,
                                           const RefineOptions& refine) {
  if (grid.empty()) throw DomainError("empty sampling grid");
  std::vector<Sample> samples;
  samples.reserve(grid.size());
  for (double x : grid) samples.push_back({x, amplitude(x)});

  if (refine.enabled) {
    bool changed = true;
    while (changed && samples.size() < refine.max_points) {
      changed = false;
      std::vector<Sample> next;
      next.reserve(samples.size() * 2);
      for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const Sample& a = samples[i];
        const Sample& b = samples[i + 1];
        next.push_back(a);
        if (b.x - a.x < 2.0 * refine.min_spacing) continue;
        if (samples.size() + (next.size() - i) >= refine.max_points) continue;
        const bool va = sample_valid(a);
        const bool vb = sample_valid(b);
        bool split = false;
        if (va && vb) {
          split = std::abs(wrap_to_pi(std::arg(b.amp) - std::arg(a.amp))) > refine.max_phase_step;
        } else {
          // Edge of an invalid stretch.
          split = va != vb;
        }
        if (!split && refine.low_contrast > 0.0) {
          split = std::min(std::abs(a.amp), std::abs(b.amp)) < refine.low_contrast &&
                  b.x - a.x > 1e-4 * (grid.back() - grid.front());
        }
        if (split) {
          const double mid = 0.5 * (a.x + b.x);
          next.push_back({mid, amplitude(mid)});
          changed = true;
        }
      }
      next.push_back(samples.back());
      samples.swap(next);
    }
  }

  std::vector<PhasePoint> points;
  points.reserve(samples.size());
  for (const Sample& s : samples) {
    PhasePoint p;
    p.theta = s.x;
    p.contrast = std::abs(s.amp);
    p.valid = p.contrast >= kContrastThreshold;
    p.chi_raw = std::arg(s.amp);
    p.chi_unwrapped = p.chi_raw;
    points.push_back(p);
  }
  return unwrap_curve(std::move(points));
}

std::vector<PhasePoint> chi_of_theta(const ProtocolFamily& family, const RefineOptions& refine) {
  family.validate();
  const int n = family.n_measurements;
  const double zeta = family.zeta;
  return sample_phase_curve([n, zeta](double theta) { return protocol_amplitude(n, zeta, theta); },
                            family.theta_grid, refine);
}

std::vector<PhasePoint> unwrap_curve(std::vector<PhasePoint> points) {
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].valid) valid.push_back(i);
  }
  if (valid.empty()) {
    for (auto& p : points) p.chi_unwrapped = p.chi_raw;
    return points;
  }

  points[valid.front()].chi_unwrapped = points[valid.front()].chi_raw;
  for (std::size_t k = 1; k < valid.size(); ++k) {
    const PhasePoint& prev = points[valid[k - 1]];
    PhasePoint& cur = points[valid[k]];
    const double turns = (prev.chi_unwrapped - cur.chi_raw) / kTwoPi;
    const double frac = turns - std::floor(turns);
    if (std::abs(frac - 0.5) < 1e-12) {
      throw UnwrapAmbiguityError("phase jump of exactly pi between theta=" +
                                 std::to_string(prev.theta) + " and theta=" +
                                 std::to_string(cur.theta) + "; refine the grid");
    }
    cur.chi_unwrapped = cur.chi_raw + kTwoPi * std::round(turns);
  }

  // Invalid points: hold at the ends, interpolate in between.
  for (std::size_t i = 0; i < valid.front(); ++i) {
    points[i].chi_unwrapped = points[valid.front()].chi_unwrapped;
  }
  for (std::size_t i = valid.back() + 1; i < points.size(); ++i) {
    points[i].chi_unwrapped = points[valid.back()].chi_unwrapped;
  }
  for (std::size_t k = 1; k < valid.size(); ++k) {
    const PhasePoint& a = points[valid[k - 1]];
    const PhasePoint& b = points[valid[k]];
    for (std::size_t i = valid[k - 1] + 1; i < valid[k]; ++i) {
      const double t = (points[i].theta - a.theta) / (b.theta - a.theta);
      points[i].chi_unwrapped = a.chi_unwrapped + t * (b.chi_unwrapped - a.chi_unwrapped);
    }
  }
  return points;
}

TopologicalResult topological_index(std::span<const PhasePoint> points) {
  if (points.empty()) throw DomainError("empty phase curve");
  if (!points.front().valid || !points.back().valid) {
    throw DomainError("curve endpoints must carry a defined phase");
  }
  TopologicalResult r;
  r.delta_chi = points.back().chi_unwrapped - points.front().chi_unwrapped;
  r.m = std::lround(r.delta_chi / kTwoPi);
  r.quantization_residual = std::abs(r.delta_chi - kTwoPi * static_cast<double>(r.m));
  r.quantized = r.quantization_residual <= 0.2 * kTwoPi;
  return r;
}

double bargmann_oracle(std::span<const PureQubitState> states) {
  const std::size_t n = states.size();
  cplx phase{1.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const cplx ov = inner(states[i], states[(i + 1) % n]);
    const double mag = std::abs(ov);
    if (mag < 1e-12) {
      throw DomainError("consecutive orthogonal states: geodesic undefined at index " +
                        std::to_string(i));
    }
    phase *= ov / mag;
  }
  return std::arg(phase);
}

double spherical_excess_oracle(std::span<const Vec3> vertices) {
  constexpr double tol = 1e-12;
  std::vector<Vec3> v;
  v.reserve(vertices.size());
  for (const Vec3& raw : vertices) {
    const Vec3 u = unit(raw);
    if (v.empty() || distance(v.back(), u) > tol) v.push_back(u);
  }
  while (v.size() > 1 && distance(v.back(), v.front()) <= tol) v.pop_back();
  if (v.size() < 3) return 0.0;

  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (distance(v[i], negated(v[(i + 1) % n])) <= tol) {
      throw DomainError("consecutive antipodal vertices: geodesic undefined");
    }
  }

  // The fan base must not be antipodal to any vertex; fall back to the
  // midpoint of an edge when every vertex has its antipode in the list.
  auto usable = [&](const Vec3& base) {
    return std::none_of(v.begin(), v.end(),
                        [&](const Vec3& w) { return distance(base, negated(w)) <= 1e-9; });
  };
  std::vector<Vec3> candidates = v;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = v[i];
    const Vec3& b = v[(i + 1) % n];
    candidates.push_back(unit({a[0] + b[0], a[1] + b[1], a[2] + b[2]}));
  }
  const auto base = std::find_if(candidates.begin(), candidates.end(), usable);
  if (base == candidates.end()) throw DomainError("no admissible fan base vertex");

  double omega = 0.0;
  for (std::size_t i = 0; i < n; ++i) omega += triangle_area(*base, v[i], v[(i + 1) % n]);
  return omega;
}

InterferometerProbabilities interferometer_probability(std::span<const MeasurementSpec> specs,
                                                       const PureQubitState& psi0,
                                                       double delta) {
  const std::vector<Readout> nulls(specs.size(), Readout::minus);
  const cplx a = sequence_amplitude(specs, nulls, psi0);
  InterferometerProbabilities p;
  p.p0 = 0.5 * (1.0 + (std::polar(1.0, -delta) * a).real());
  p.p1 = 1.0 - p.p0;
  return p;
}

ContrastMinimum polish_contrast_minimum(const std::function<cplx(double)>& amplitude,
                                        std::span<const PhasePoint> curve) {
  if (curve.empty()) throw DomainError("empty curve");
  const auto it = std::min_element(curve.begin(), curve.end(), [](const auto& a, const auto& b) {
    return a.contrast < b.contrast;
  });
  const std::size_t i = static_cast<std::size_t>(it - curve.begin());
  ContrastMinimum best{it->theta, it->contrast};
  if (curve.size() < 2) return best;
  const double lo = curve[i == 0 ? 0 : i - 1].theta;
  const double hi = curve[i + 1 == curve.size() ? i : i + 1].theta;
  std::uintmax_t iters = 200;
  const auto [x, f] = boost::math::tools::brent_find_minima(
      [&](double t) { return std::abs(amplitude(t)); }, lo, hi,
      std::numeric_limits<double>::digits, iters);
  if (f < best.contrast) best = {x, f};
  return best;
}

CriticalStrength critical_strength(int n_measurements, const CriticalStrengthOptions& opts) {
  if (n_measurements < 1) throw DomainError("critical_strength needs N >= 1");
  if (!(opts.resolution > 0.0)) throw DomainError("resolution must be positive");
  if (opts.coarse_points < 2) throw DomainError("need at least two coarse points");

  auto index_at = [&](double zeta) {
    const auto curve =
        chi_of_theta(ProtocolFamily::uniform(n_measurements, zeta, opts.theta_points));
    return topological_index(curve).m;
  };

  double lo = 0.0, hi = 0.0;
  long m_lo = index_at(0.0), m_hi = m_lo;
  bool found = false;
  for (std::size_t i = 1; i < opts.coarse_points && !found; ++i) {
    const double z = static_cast<double>(i) / static_cast<double>(opts.coarse_points - 1);
    const long m = index_at(z);
    if (m != m_lo) {
      hi = z;
      m_hi = m;
      found = true;
    } else {
      lo = z;
    }
  }
  if (!found) throw NoTransitionError("winding index constant over zeta in [0, 1]");

  while (hi - lo > opts.resolution) {
    const double mid = 0.5 * (lo + hi);
    if (index_at(mid) == m_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  CriticalStrength r;
  r.zeta_lo = lo;
  r.zeta_hi = hi;
  r.zeta_c = 0.5 * (lo + hi);
  r.m_weak = m_lo;
  r.m_strong = m_hi;
  const double zc = r.zeta_c;
  auto amp = [n_measurements, zc](double theta) {
    return protocol_amplitude(n_measurements, zc, theta);
  };
  const auto curve = chi_of_theta(ProtocolFamily::uniform(n_measurements, zc, opts.theta_points));
  const ContrastMinimum cm = polish_contrast_minimum(amp, curve);
  r.min_contrast = cm.contrast;
  r.theta_at_min = cm.at;
  return r;
}

void write_phase_curve_csv(std::ostream& out, std::span<const PhasePoint> points) {
  out << "theta_rad,chi_raw,chi_unwrapped,contrast,valid\n";
  for (const PhasePoint& p : points) {
    out << csv_number(p.theta) << ',' << csv_number(p.chi_raw) << ','
        << csv_number(p.chi_unwrapped) << ',' << csv_number(p.contrast) << ','
        << (p.valid ? 1 : 0) << '\n';
  }
}

}  // namespace geophase
