// Split-step spectral beam propagation of the scalar paraxial equation
//
//   d psi/dz = i/(2 k0 n_ref) lap(psi) + i k0 (n^2 - n_ref^2)/(2 n_ref) psi
//
// A field e^{i beta z} psi(x, y) is a mode with propagation constant
// k0 n_ref + beta. The same operator run in imaginary distance relaxes a
// guess onto the fundamental mode of a given mirror parity.

#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcfqkd/bpm/field.hpp"
#include "mcfqkd/bpm/fiber.hpp"

namespace mcfqkd::bpm {

/// Thrown when a propagation becomes unstable or non-finite.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PropagationOptions {
  bool absorber = true;
  double absorber_strength = 0.1;     // peak field attenuation rate, 1/um
  double max_growth_per_step = 1e-3;  // relative power growth that aborts a run
};

struct PropagationStats {
  std::size_t steps = 0;
  double absorbed_power = 0.0;
};

enum class Parity { None, EvenX, OddX };

struct ModeSolverOptions {
  Parity parity = Parity::None;
  double coarse_step_um = 4.0;
  double fine_step_um = 1.0;
  double max_distance_um = 40000.0;
  double tolerance = 1e-13;  // relative change of beta between checks
  std::size_t check_every = 25;
};

struct Mode {
  ComplexField field;  // unit power
  double beta = 0.0;   // propagation constant relative to k0 n_ref, 1/um
  double n_eff = 0.0;
  double distance_um = 0.0;
};

class BeamPropagator {
 public:
  BeamPropagator(const BpmGrid& grid, const IndexMap& index, PropagationOptions options = {});
  ~BeamPropagator();
  BeamPropagator(BeamPropagator&&) noexcept;
  BeamPropagator& operator=(BeamPropagator&&) noexcept;
  BeamPropagator(const BeamPropagator&) = delete;
  BeamPropagator& operator=(const BeamPropagator&) = delete;

  /// Advances `field` in place by `distance` um using steps of grid.dz and a
  /// final partial step. Throws NumericalError on power growth or NaN.
  PropagationStats propagate(ComplexField& field, double distance);

  /// Fundamental mode reachable from `guess` under the requested parity.
  Mode solve_mode(const ComplexField& guess, const ModeSolverOptions& options = {});

  /// <psi|H|psi>/<psi|psi> of the continuous-in-z paraxial operator.
  double rayleigh_quotient(const ComplexField& field);

  const BpmGrid& grid() const { return grid_; }

 private:
  struct Workspace;

  void check_shape(const ComplexField& field) const;
  void apply_diffraction(double h, bool imaginary);
  void apply_screen(double h, bool imaginary);
  double apply_absorber(double h);

  BpmGrid grid_;
  PropagationOptions options_;
  std::vector<double> potential_;  // k0 (n^2 - n_ref^2) / (2 n_ref)
  std::vector<double> kinetic_;    // -(kx^2 + ky^2) / (2 k0 n_ref), transposed layout
  std::vector<double> absorber_profile_;
  std::unique_ptr<Workspace> ws_;
};

/// Convenience wrapper around BeamPropagator::propagate.
ComplexField propagate(const ComplexField& field, const IndexMap& index, double distance,
                       const PropagationOptions& options = {});

}  // namespace mcfqkd::bpm
