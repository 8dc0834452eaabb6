#include "geophase/scan.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "geophase/csv.hpp"
#include "geophase/errors.hpp"
#include "geophase/parallel.hpp"

namespace geophase {

void SetupTemplate::validate() const {
  optics.validate();
  if (n_stages < 1) throw DomainError("setup needs at least one stage");
  if (!imperfections.empty() && imperfections.size() != n_stages) {
    throw DomainError("imperfection list must be empty or have one entry per stage");
  }
}

SetupTemplate SetupTemplate::with_w0(double w0_mm) const {
  SetupTemplate t = *this;
  t.optics.w0_mm = w0_mm;
  return t;
}

SetupTemplate SetupTemplate::with_gamma(double gamma_rad) const {
  SetupTemplate t = *this;
  t.optics.gamma_rad = gamma_rad;
  return t;
}

Setup SetupTemplate::at(double alpha) const {
  Setup s = Setup::uniform(optics, n_stages, alpha);
  if (plate_retardance) s.plate_retardance = *plate_retardance;
  for (std::size_t j = 0; j < imperfections.size(); ++j) {
    s.stages[j].nu = imperfections[j].nu;
    s.stages[j].beta = imperfections[j].beta;
  }
  return s;
}

cplx SetupTemplate::amplitude(double alpha) const { return readout_amplitude(at(alpha), optics); }

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (n < 2) throw DomainError("grid needs at least two points");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

PhaseCurve chi_curve_vs_alpha(const SetupTemplate& setup, double w0_mm, const CurveOptions& opts) {
  const SetupTemplate tmpl = setup.with_w0(w0_mm);
  tmpl.validate();
  const std::vector<double> grid = opts.alpha_grid.empty()
                                       ? uniform_grid(0.0, kPi / 2.0, opts.alpha_points)
                                       : opts.alpha_grid;
  auto amp = [&tmpl](double alpha) { return tmpl.amplitude(alpha); };

  PhaseCurve c;
  c.w0 = w0_mm;
  c.points = sample_phase_curve(amp, grid, opts.refine);
  c.index = topological_index(c.points);
  if (opts.polish_minimum) {
    const ContrastMinimum cm = polish_contrast_minimum(amp, c.points);
    c.min_contrast = cm.contrast;
    c.alpha_at_min = cm.at;
  } else {
    const auto it = std::min_element(c.points.begin(), c.points.end(),
                                     [](const auto& a, const auto& b) { return a.contrast < b.contrast; });
    c.min_contrast = it->contrast;
    c.alpha_at_min = it->theta;
  }
  return c;
}

TransitionResult locate_transition(const SetupTemplate& setup, double w0_lo, double w0_hi,
                                   const TransitionOptions& opts) {
  if (!(w0_lo > 0.0 && w0_hi > w0_lo)) throw DomainError("invalid waist bracket");
  if (!(opts.tol > 0.0)) throw DomainError("tolerance must be positive");
  CurveOptions fast = opts.curve;
  fast.polish_minimum = false;
  auto index_at = [&](double w0) { return chi_curve_vs_alpha(setup, w0, fast).index.m; };

  TransitionResult r;
  r.scan_w0 = uniform_grid(w0_lo, w0_hi, std::max<std::size_t>(opts.scan_points, 2));
  for (double w : r.scan_w0) r.scan_m.push_back(index_at(w));

  std::size_t first = 0;
  for (std::size_t i = 1; i < r.scan_m.size(); ++i) {
    if (r.scan_m[i] != r.scan_m[i - 1]) {
      if (r.changes_on_scan == 0) first = i;
      ++r.changes_on_scan;
    }
  }
  if (r.changes_on_scan == 0) {
    throw NoTransitionError("winding index constant over the waist bracket");
  }

  double lo = r.scan_w0[first - 1], hi = r.scan_w0[first];
  r.m_low = r.scan_m[first - 1];
  r.m_high = r.scan_m[first];
  while (hi - lo > opts.tol) {
    const double mid = 0.5 * (lo + hi);
    if (index_at(mid) == r.m_low) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  r.w0_lo = lo;
  r.w0_hi = hi;
  r.w0_star = 0.5 * (lo + hi);
  CurveOptions polished = opts.curve;
  polished.polish_minimum = true;
  const PhaseCurve at_star = chi_curve_vs_alpha(setup, r.w0_star, polished);
  r.min_contrast = at_star.min_contrast;
  r.alpha_at_min = at_star.alpha_at_min;
  return r;
}

void ScanSpec::validate() const {
  auto check = [](const std::vector<double>& v, const char* name) {
    if (v.empty()) throw DomainError(std::string(name) + " must be non-empty");
    if (!std::is_sorted(v.begin(), v.end())) throw DomainError(std::string(name) + " must be sorted");
  };
  check(w0_values, "w0 values");
  check(alpha_grid, "alpha grid");
  check(gamma_values, "gamma values");
  if (alpha_grid.size() < 2 || alpha_grid.front() != 0.0 ||
      std::abs(alpha_grid.back() - kPi / 2.0) > 1e-12) {
    throw DomainError("alpha grid must run from 0 to pi/2");
  }
}

std::size_t PhaseDiagram::count(long m) const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [m](const DiagramCell& c) { return c.resolved && c.m == m; }));
}

PhaseDiagram phase_diagram(const ScanSpec& spec, const SetupTemplate& base, unsigned threads) {
  spec.validate();
  SetupTemplate tmpl = base;
  if (!spec.stage_imperfections.empty()) tmpl.imperfections = spec.stage_imperfections;
  tmpl.validate();

  PhaseDiagram d;
  d.w0_values = spec.w0_values;
  d.gamma_values = spec.gamma_values;
  d.cells.resize(spec.w0_values.size() * spec.gamma_values.size());
  CurveOptions opts;
  opts.alpha_grid = spec.alpha_grid;

  parallel_for(d.cells.size(), threads, [&](std::size_t idx) {
    const std::size_t i = idx / spec.gamma_values.size();
    const std::size_t j = idx % spec.gamma_values.size();
    DiagramCell& cell = d.cells[idx];
    cell.w0 = spec.w0_values[i];
    cell.gamma = spec.gamma_values[j];
    try {
      const PhaseCurve c = chi_curve_vs_alpha(tmpl.with_gamma(cell.gamma), cell.w0, opts);
      cell.m = c.index.m;
      cell.residual = c.index.quantization_residual;
      cell.min_contrast = c.min_contrast;
      cell.resolved = c.index.quantized;
    } catch (const std::runtime_error&) {
      cell.resolved = false;
    } catch (const std::logic_error&) {
      cell.resolved = false;
    }
  });
  return d;
}

std::vector<PhaseCurve> scan_w0(const SetupTemplate& setup, std::span<const double> w0_values,
                                const CurveOptions& opts, unsigned threads) {
  std::vector<PhaseCurve> out(w0_values.size());
  parallel_for(w0_values.size(), threads,
               [&](std::size_t i) { out[i] = chi_curve_vs_alpha(setup, w0_values[i], opts); });
  return out;
}

std::vector<TrendPoint> imperfection_trend(const SetupTemplate& setup, std::span<const double> betas,
                                           double nu, double w0_lo, double w0_hi,
                                           const TransitionOptions& opts) {
  std::vector<TrendPoint> out;
  for (double beta : betas) {
    SetupTemplate t = setup;
    t.imperfections.assign(t.n_stages, Imperfection{nu, beta});
    out.push_back({beta, locate_transition(t, w0_lo, w0_hi, opts).w0_star});
  }
  return out;
}

void write_curve_csv(std::ostream& out, std::span<const PhaseCurve> curves) {
  out << "alpha_rad,chi,contrast,w0_mm\n";
  for (const PhaseCurve& c : curves) {
    for (const PhasePoint& p : c.points) {
      out << csv_number(p.theta) << ',' << csv_number(p.chi_unwrapped) << ','
          << csv_number(p.contrast) << ',' << csv_number(c.w0) << '\n';
    }
  }
}

void write_diagram_csv(std::ostream& out, const PhaseDiagram& diagram) {
  out << "w0_mm,gamma_rad,m,min_contrast,resolved\n";
  for (const DiagramCell& c : diagram.cells) {
    out << csv_number(c.w0) << ',' << csv_number(c.gamma) << ',' << c.m << ','
        << csv_number(c.min_contrast) << ',' << (c.resolved ? 1 : 0) << '\n';
  }
}

}  // namespace geophase
