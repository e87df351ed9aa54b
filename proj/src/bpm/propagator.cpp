#include "mcfqkd/bpm/propagator.hpp"

#include <fftw3.h>

#include <cmath>
#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace mcfqkd::bpm {
namespace {

// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double wavenumber(std::size_t i, std::size_t n, double d) {
  const long k = i < n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
  return 2.0 * std::numbers::pi * static_cast<double>(k) / (static_cast<double>(n) * d);
}

// Raised-cosine ramp: 1 at the window edge, 0 at `width` inside it.
double ramp(std::size_t i, std::size_t n, double d, double width) {
  if (width <= 0.0) return 0.0;
  const double dist = static_cast<double>(std::min(i, n - 1 - i)) * d;
  if (dist >= width) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * dist / width));
}

}  // namespace

// 2-D transforms as row FFTs plus an explicit blocked transpose; k-space
// data lives transposed (ix * ny + iy) in `kbuf`. FFTW_ESTIMATE plans keep
// results bit-reproducible between runs.
struct BeamPropagator::Workspace {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t n = 0;
  fftw_complex* buf = nullptr;
  fftw_complex* kbuf = nullptr;
  fftw_plan fwd_rows = nullptr;
  fftw_plan inv_rows = nullptr;
  fftw_plan fwd_cols = nullptr;
  fftw_plan inv_cols = nullptr;
  std::map<std::pair<double, bool>, std::vector<Complex>> k_factors;
  std::map<std::pair<double, bool>, std::vector<Complex>> x_factors;
  std::map<double, std::vector<double>> absorber_masks;

  Workspace(std::size_t nx_, std::size_t ny_) : nx(nx_), ny(ny_), n(nx_ * ny_) {
    std::lock_guard lock(planner_mutex());
    buf = fftw_alloc_complex(n);
    kbuf = fftw_alloc_complex(n);
    const int lx = static_cast<int>(nx);
    const int ly = static_cast<int>(ny);
    fwd_rows = fftw_plan_many_dft(1, &lx, ly, buf, nullptr, 1, lx, buf, nullptr, 1, lx, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_rows = fftw_plan_many_dft(1, &lx, ly, buf, nullptr, 1, lx, buf, nullptr, 1, lx, FFTW_BACKWARD, FFTW_ESTIMATE);
    fwd_cols = fftw_plan_many_dft(1, &ly, lx, kbuf, nullptr, 1, ly, kbuf, nullptr, 1, ly, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_cols = fftw_plan_many_dft(1, &ly, lx, kbuf, nullptr, 1, ly, kbuf, nullptr, 1, ly, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Workspace() {
    std::lock_guard lock(planner_mutex());
    for (auto p : {fwd_rows, inv_rows, fwd_cols, inv_cols}) fftw_destroy_plan(p);
    fftw_free(buf);
    fftw_free(kbuf);
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  Complex* data() { return reinterpret_cast<Complex*>(buf); }
  Complex* kdata() { return reinterpret_cast<Complex*>(kbuf); }

  static void transpose(const Complex* src, Complex* dst, std::size_t rows, std::size_t cols) {
    constexpr std::size_t kBlock = 32;
    for (std::size_t r0 = 0; r0 < rows; r0 += kBlock)
      for (std::size_t c0 = 0; c0 < cols; c0 += kBlock)
        for (std::size_t r = r0; r < std::min(r0 + kBlock, rows); ++r)
          for (std::size_t c = c0; c < std::min(c0 + kBlock, cols); ++c) dst[c * rows + r] = src[r * cols + c];
  }
  void to_k() {
    fftw_execute(fwd_rows);
    transpose(data(), kdata(), ny, nx);
    fftw_execute(fwd_cols);
  }
  void to_x() {
    fftw_execute(inv_cols);
    transpose(kdata(), data(), nx, ny);
    fftw_execute(inv_rows);
  }

  void load(const std::vector<Complex>& src) { std::copy(src.begin(), src.end(), data()); }
  void store(std::vector<Complex>& dst) const {
    const Complex* p = reinterpret_cast<const Complex*>(buf);
    std::copy(p, p + n, dst.begin());
  }
  double norm_sum() const {
    const Complex* p = reinterpret_cast<const Complex*>(buf);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += std::norm(p[k]);
    return s;
  }
};

BeamPropagator::BeamPropagator(const BpmGrid& grid, const IndexMap& index, PropagationOptions options)
    : grid_(grid), options_(options) {
  grid_.validate();
  if (index.nx != grid_.nx || index.ny != grid_.ny || index.n.size() != grid_.size())
    throw std::invalid_argument("index map does not match the grid");
  const double k0 = grid_.k0();
  const double nr = grid_.reference_index;
  potential_.resize(grid_.size());
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const double n = index.n[k];
    potential_[k] = k0 * (n * n - nr * nr) / (2.0 * nr);
  }
  kinetic_.resize(grid_.size());
  absorber_profile_.resize(grid_.size());
  for (std::size_t iy = 0; iy < grid_.ny; ++iy) {
    const double ky = wavenumber(iy, grid_.ny, grid_.dy);
    const double sy = ramp(iy, grid_.ny, grid_.dy, grid_.absorber_width);
    for (std::size_t ix = 0; ix < grid_.nx; ++ix) {
      const double kx = wavenumber(ix, grid_.nx, grid_.dx);
      kinetic_[ix * grid_.ny + iy] = -(kx * kx + ky * ky) / (2.0 * k0 * nr);
      absorber_profile_[iy * grid_.nx + ix] = ramp(ix, grid_.nx, grid_.dx, grid_.absorber_width) + sy;
    }
  }
  ws_ = std::make_unique<Workspace>(grid_.nx, grid_.ny);
}

BeamPropagator::~BeamPropagator() = default;
BeamPropagator::BeamPropagator(BeamPropagator&&) noexcept = default;
BeamPropagator& BeamPropagator::operator=(BeamPropagator&&) noexcept = default;

void BeamPropagator::check_shape(const ComplexField& field) const {
  if (field.grid.nx != grid_.nx || field.grid.ny != grid_.ny || field.amplitudes.size() != grid_.size())
    throw std::invalid_argument("field does not match the propagator grid");
}

// Forward FFT, multiply by exp(i T h) (or exp(T h) in imaginary distance)
// with the 1/N of the inverse transform folded in, inverse FFT.
void BeamPropagator::apply_diffraction(double h, bool imaginary) {
  auto& factors = ws_->k_factors[{h, imaginary}];
  if (factors.empty()) {
    const double inv_n = 1.0 / static_cast<double>(ws_->n);
    factors.resize(ws_->n);
    for (std::size_t k = 0; k < ws_->n; ++k)
      factors[k] = imaginary ? Complex(std::exp(kinetic_[k] * h) * inv_n, 0.0)
                             : std::polar(inv_n, kinetic_[k] * h);
  }
  ws_->to_k();
  Complex* p = ws_->kdata();
  for (std::size_t k = 0; k < ws_->n; ++k) p[k] *= factors[k];
  ws_->to_x();
}

void BeamPropagator::apply_screen(double h, bool imaginary) {
  auto& factors = ws_->x_factors[{h, imaginary}];
  if (factors.empty()) {
    factors.resize(ws_->n);
    for (std::size_t k = 0; k < ws_->n; ++k)
      factors[k] = imaginary ? Complex(std::exp(potential_[k] * h), 0.0) : std::polar(1.0, potential_[k] * h);
  }
  Complex* p = ws_->data();
  for (std::size_t k = 0; k < ws_->n; ++k) p[k] *= factors[k];
}

// Returns the power removed, in units of sum |a|^2.
double BeamPropagator::apply_absorber(double h) {
  if (!options_.absorber || grid_.absorber_width <= 0.0) return 0.0;
  auto& mask = ws_->absorber_masks[h];
  if (mask.empty()) {
    mask.resize(ws_->n);
    for (std::size_t k = 0; k < ws_->n; ++k)
      mask[k] = std::exp(-options_.absorber_strength * h * absorber_profile_[k]);
  }
  Complex* p = ws_->data();
  double removed = 0.0;
  for (std::size_t k = 0; k < ws_->n; ++k) {
    if (mask[k] == 1.0) continue;
    const double before = std::norm(p[k]);
    p[k] *= mask[k];
    removed += before - std::norm(p[k]);
  }
  return removed;
}

PropagationStats BeamPropagator::propagate(ComplexField& field, double distance) {
  check_shape(field);
  if (!(distance >= 0.0)) throw std::invalid_argument("distance must be non-negative");
  PropagationStats stats;
  if (distance == 0.0) return stats;

  std::vector<double> steps(static_cast<std::size_t>(std::floor(distance / grid_.dz + 1e-9)), grid_.dz);
  const double rest = distance - static_cast<double>(steps.size()) * grid_.dz;
  if (rest > 1e-9 * grid_.dz) steps.push_back(rest);

  ws_->load(field.amplitudes);
  double previous = ws_->norm_sum();
  if (!std::isfinite(previous)) throw NumericalError("initial field is not finite");
  double removed = 0.0;
  // Strang splitting D(h/2) P(h) D(h/2) with adjacent half steps merged.
  apply_diffraction(0.5 * steps.front(), false);
  for (std::size_t j = 0; j < steps.size(); ++j) {
    const double h = steps[j];
    apply_screen(h, false);
    removed += apply_absorber(h);
    const double now = ws_->norm_sum();
    if (!std::isfinite(now))
      throw NumericalError("propagation produced a non-finite field at step " + std::to_string(j));
    if (now > previous * (1.0 + options_.max_growth_per_step))
      throw NumericalError("power grew by " + std::to_string(now / previous - 1.0) + " at step " +
                           std::to_string(j) + "; propagation is unstable");
    previous = now;
    const double next = j + 1 < steps.size() ? steps[j + 1] : 0.0;
    apply_diffraction(0.5 * (h + next), false);
  }
  ws_->store(field.amplitudes);
  stats.steps = steps.size();
  stats.absorbed_power = removed * grid_.cell_area();
  return stats;
}

double BeamPropagator::rayleigh_quotient(const ComplexField& field) {
  check_shape(field);
  ws_->load(field.amplitudes);
  const Complex* p = ws_->data();
  double norm = 0.0;
  double pot = 0.0;
  for (std::size_t k = 0; k < ws_->n; ++k) {
    const double a2 = std::norm(p[k]);
    norm += a2;
    pot += potential_[k] * a2;
  }
  ws_->to_k();
  const Complex* q = ws_->kdata();
  double kin = 0.0;
  for (std::size_t k = 0; k < ws_->n; ++k) kin += kinetic_[k] * std::norm(q[k]);
  kin /= static_cast<double>(ws_->n);
  if (!(norm > 0.0)) throw std::domain_error("rayleigh_quotient of a zero field");
  return (kin + pot) / norm;
}

Mode BeamPropagator::solve_mode(const ComplexField& guess, const ModeSolverOptions& options) {
  check_shape(guess);
  ComplexField psi = guess;
  const auto project = [&](ComplexField& f) {
    if (options.parity == Parity::None) return;
    const ComplexField m = mirror_x(f);
    const double sign = options.parity == Parity::EvenX ? 1.0 : -1.0;
    for (std::size_t k = 0; k < f.amplitudes.size(); ++k)
      f.amplitudes[k] = 0.5 * (f.amplitudes[k] + sign * m.amplitudes[k]);
  };
  project(psi);
  psi.normalize();

  double travelled = 0.0;
  double beta = rayleigh_quotient(psi);
  for (const double h : {options.coarse_step_um, options.fine_step_um}) {
    if (!(h > 0.0)) continue;
    int settled = 0;
    ws_->load(psi.amplitudes);
    while (travelled < options.max_distance_um) {
      // one block of check_every merged Strang steps
      apply_diffraction(0.5 * h, true);
      for (std::size_t j = 0; j < options.check_every; ++j) {
        apply_screen(h, true);
        apply_diffraction(j + 1 < options.check_every ? h : 0.5 * h, true);
      }
      travelled += h * static_cast<double>(options.check_every);
      ws_->store(psi.amplitudes);
      project(psi);
      psi.normalize();
      const double next = rayleigh_quotient(psi);
      if (!std::isfinite(next)) throw NumericalError("mode solver diverged");
      const bool small = std::abs(next - beta) <= options.tolerance * std::abs(next);
      beta = next;
      settled = small ? settled + 1 : 0;
      if (settled >= 2) break;
      ws_->load(psi.amplitudes);
    }
  }
  psi.normalize();
  beta = rayleigh_quotient(psi);
  const double k0 = grid_.k0();
  return {psi, beta, grid_.reference_index + beta / k0, travelled};
}

ComplexField propagate(const ComplexField& field, const IndexMap& index, double distance,
                       const PropagationOptions& options) {
  BeamPropagator prop(field.grid, index, options);
  ComplexField out = field;
  prop.propagate(out, distance);
  return out;
}

}  // namespace mcfqkd::bpm
