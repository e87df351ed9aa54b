#include "mcfqkd/bpm/crosstalk.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mcfqkd::bpm {
namespace {

constexpr double kSingleModeCutoff = 2.405;
constexpr double kDiskDilation = 1.5;

Point core_center(const FiberCrossSection& xs, std::size_t core_index) {
  const auto centers = xs.core_centers();
  if (core_index >= centers.size())
    throw std::out_of_range("core index " + std::to_string(core_index) + " out of range");
  return centers[core_index];
}

ComplexField gaussian(const BpmGrid& grid, Point c, double w) {
  ComplexField f(grid);
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    const double y = grid.y(iy) - c.y;
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const double x = grid.x(ix) - c.x;
      f.at(ix, iy) = std::exp(-(x * x + y * y) / (w * w));
    }
  }
  f.normalize();
  return f;
}

// Whole-cell offset between two points, when it exists.
bool cell_offset(const BpmGrid& grid, Point from, Point to, long& sx, long& sy) {
  const double fx = (to.x - from.x) / grid.dx;
  const double fy = (to.y - from.y) / grid.dy;
  sx = std::lround(fx);
  sy = std::lround(fy);
  return std::abs(fx - static_cast<double>(sx)) < 1e-9 && std::abs(fy - static_cast<double>(sy)) < 1e-9;
}

// Isolated modes for every core; grid-aligned cores reuse a shifted copy of
// the first solved mode.
std::vector<ComplexField> all_core_modes(const FiberCrossSection& xs, const BpmGrid& grid, std::size_t launch_core,
                                         const ModeSolverOptions& options) {
  const auto centers = xs.core_centers();
  std::vector<ComplexField> modes(centers.size());
  const Mode first = isolated_core_mode(launch_core, xs, grid, options);
  for (std::size_t k = 0; k < centers.size(); ++k) {
    long sx = 0, sy = 0;
    if (k == launch_core)
      modes[k] = first.field;
    else if (cell_offset(grid, centers[launch_core], centers[k], sx, sy))
      modes[k] = shifted(first.field, sx, sy);
    else
      modes[k] = isolated_core_mode(k, xs, grid, options).field;
  }
  return modes;
}

}  // namespace

double marcuse_spot_radius(double core_radius, double v) {
  if (!(v > 0.0)) throw std::invalid_argument("V-number must be positive");
  return core_radius * (0.65 + 1.619 / std::pow(v, 1.5) + 2.879 / std::pow(v, 6.0));
}

LaunchedField launch_mode(std::size_t core_index, const FiberCrossSection& xs, const BpmGrid& grid) {
  xs.validate();
  grid.validate();
  const Point c = core_center(xs, core_index);
  const double v = v_number(xs.core_radius_um, xs.core_index(), xs.cladding_index, grid.wavelength);
  const double w = marcuse_spot_radius(xs.core_radius_um, v);
  return {gaussian(grid, c, w), v, v > kSingleModeCutoff};
}

Mode isolated_core_mode(std::size_t core_index, const FiberCrossSection& xs, const BpmGrid& grid,
                        const ModeSolverOptions& options) {
  const Point c = core_center(xs, core_index);
  const IndexMap map = build_index_map(xs, grid, {c});
  BeamPropagator prop(grid, map);
  ModeSolverOptions opts = options;
  opts.parity = Parity::None;
  return prop.solve_mode(launch_mode(core_index, xs, grid).field, opts);
}

std::vector<double> core_powers(const ComplexField& field, const FiberCrossSection& xs, double reference_power) {
  if (!(reference_power > 0.0)) throw std::invalid_argument("reference power must be positive");
  const auto& g = field.grid;
  const double r_int = (1.0 + kDiskDilation) * xs.core_radius_um;
  std::vector<double> out;
  for (const auto& c : xs.core_centers()) {
    double sum = 0.0;
    for (std::size_t iy = 0; iy < g.ny; ++iy) {
      const double y = g.y(iy) - c.y;
      if (std::abs(y) > r_int) continue;
      for (std::size_t ix = 0; ix < g.nx; ++ix) {
        const double x = g.x(ix) - c.x;
        if (x * x + y * y <= r_int * r_int) sum += std::norm(field.at(ix, iy));
      }
    }
    out.push_back(sum * g.cell_area() / reference_power);
  }
  return out;
}

std::string variant_label(const FiberCrossSection& xs) {
  if (!xs.trench || xs.trench->width_um == 0.0) return "no-trench";
  char buf[64];
  std::snprintf(buf, sizeof buf, "trench-w%g-dn%g", xs.trench->width_um, xs.trench->dn_below_cladding);
  return buf;
}

CrosstalkReport measure_crosstalk(const FiberCrossSection& xs, const BpmGrid& grid, double distance_um,
                                  const CrosstalkStudyOptions& options) {
  grid.validate_for(xs);
  const std::size_t n_cores = xs.core_count();
  const std::size_t launch = options.launch_core;
  if (launch >= n_cores) throw std::out_of_range("launch core out of range");

  const auto modes = all_core_modes(xs, grid, launch, options.mode_solver);
  const ComplexField& launched = modes[launch];

  // Neighbour modes with the launch-mode component removed, so the initial
  // tail overlap does not register as coupled power.
  std::vector<ComplexField> probes(n_cores);
  for (std::size_t k = 0; k < n_cores; ++k) {
    probes[k] = modes[k];
    if (k == launch) continue;
    const Complex c = overlap(launched, modes[k]);
    for (std::size_t i = 0; i < probes[k].amplitudes.size(); ++i) probes[k].amplitudes[i] -= c * launched.amplitudes[i];
    probes[k].normalize();
  }

  const IndexMap map = build_index_map(xs, grid);
  BeamPropagator prop(grid, map, options.propagation);
  ComplexField field = launched;
  const PropagationStats stats = prop.propagate(field, distance_um);

  CrosstalkReport r;
  r.variant = variant_label(xs);
  r.trench_width_um = xs.trench_width();
  r.trench_dn = xs.trench ? xs.trench->dn_below_cladding : 0.0;
  r.distance_um = distance_um;
  r.launch_core = launch;
  r.core_fractions = core_powers(field, xs, 1.0);
  r.absorbed_fraction = stats.absorbed_power;
  r.v_number = v_number(xs.core_radius_um, xs.core_index(), xs.cladding_index, grid.wavelength);
  for (std::size_t k = 0; k < n_cores; ++k) {
    const double p = std::norm(overlap(probes[k], field));
    r.modal_fractions.push_back(p);
    if (k == launch) continue;
    r.neighbors.push_back(k);
    r.crosstalk_db.push_back(p > 0.0 ? 10.0 * std::log10(p) : -std::numeric_limits<double>::infinity());
  }
  if (options.keep_fields) {
    r.launched_field = launched;
    r.final_field = std::move(field);
  }
  return r;
}

std::vector<CrosstalkReport> crosstalk_study(const std::vector<FiberCrossSection>& variants, double distance_um,
                                             const BpmGrid& grid, const CrosstalkStudyOptions& options) {
  std::vector<CrosstalkReport> out;
  out.reserve(variants.size());
  for (const auto& xs : variants) out.push_back(measure_crosstalk(xs, grid, distance_um, options));
  return out;
}

std::vector<FiberCrossSection> trench_variants(const FiberCrossSection& base, const std::vector<double>& widths_um,
                                               const std::vector<double>& dns) {
  std::vector<FiberCrossSection> out;
  const double gap = base.trench ? base.trench->gap_um : Trench{}.gap_um;
  FiberCrossSection ref = base;
  ref.trench.reset();
  out.push_back(ref);
  for (double dn : dns) {
    for (double w : widths_um) {
      if (!(w > 0.0)) continue;
      FiberCrossSection v = base;
      v.trench = Trench{w, dn, gap};
      out.push_back(v);
    }
  }
  return out;
}

SupermodeCoupling supermode_coupling(const FiberCrossSection& pair, const BpmGrid& grid,
                                     const ModeSolverOptions& options) {
  if (pair.lattice != Lattice::Pair) throw std::invalid_argument("supermode_coupling needs a Pair cross-section");
  grid.validate_for(pair);
  const IndexMap map = build_index_map(pair, grid);
  BeamPropagator prop(grid, map);
  const ComplexField a = launch_mode(0, pair, grid).field;
  const ComplexField b = launch_mode(1, pair, grid).field;
  ComplexField even(grid), odd(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    even.amplitudes[k] = a.amplitudes[k] + b.amplitudes[k];
    odd.amplitudes[k] = a.amplitudes[k] - b.amplitudes[k];
  }
  ModeSolverOptions opts = options;
  SupermodeCoupling out;
  opts.parity = Parity::EvenX;
  out.even = prop.solve_mode(even, opts);
  opts.parity = Parity::OddX;
  out.odd = prop.solve_mode(odd, opts);
  out.beta_even = out.even.beta;
  out.beta_odd = out.odd.beta;
  out.kappa = 0.5 * (out.beta_even - out.beta_odd);
  out.beat_length = std::numbers::pi / (2.0 * out.kappa);
  return out;
}

}  // namespace mcfqkd::bpm
