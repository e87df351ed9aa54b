// Launch fields, per-core power bookkeeping and the trench crosstalk study.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mcfqkd/bpm/field.hpp"
#include "mcfqkd/bpm/fiber.hpp"
#include "mcfqkd/bpm/propagator.hpp"

namespace mcfqkd::bpm {

/// Marcuse fit of the LP01 spot radius: w/a = 0.65 + 1.619 V^-1.5 + 2.879 V^-6.
double marcuse_spot_radius(double core_radius, double v);

struct LaunchedField {
  ComplexField field;
  double v_number = 0.0;
  bool multimode = false;  // V above the LP11 cutoff 2.405
};

/// Unit-power Gaussian approximation of the fundamental mode of one core.
LaunchedField launch_mode(std::size_t core_index, const FiberCrossSection& xs, const BpmGrid& grid);

/// Fundamental mode of one core in isolation (the other cores removed),
/// relaxed with the imaginary-distance solver. Unit power.
Mode isolated_core_mode(std::size_t core_index, const FiberCrossSection& xs, const BpmGrid& grid,
                        const ModeSolverOptions& options = {});

/// Power fraction inside each core disk dilated by 1.5 core radii (integration
/// radius 2.5 a), relative to `reference_power`.
std::vector<double> core_powers(const ComplexField& field, const FiberCrossSection& xs,
                                double reference_power = 1.0);

struct CrosstalkReport {
  std::string variant;
  double trench_width_um = 0.0;
  double trench_dn = 0.0;
  double distance_um = 0.0;
  std::size_t launch_core = 0;
  std::vector<double> core_fractions;   // disk-integrated |E|^2
  std::vector<double> modal_fractions;  // power carried by each core's mode
  std::vector<std::size_t> neighbors;   // cores other than the launch core
  std::vector<double> crosstalk_db;     // 10 log10 of the neighbour's modal fraction
  double absorbed_fraction = 0.0;
  double v_number = 0.0;
  std::optional<ComplexField> launched_field;  // only with keep_fields
  std::optional<ComplexField> final_field;
};

struct CrosstalkStudyOptions {
  std::size_t launch_core = 0;
  PropagationOptions propagation;
  ModeSolverOptions mode_solver;
  bool keep_fields = false;
};

/// Launches the isolated mode of `launch_core`, propagates through the full
/// cross-section and reports modal and disk powers per core.
CrosstalkReport measure_crosstalk(const FiberCrossSection& xs, const BpmGrid& grid, double distance_um,
                                  const CrosstalkStudyOptions& options = {});

/// One report per variant, in input order.
std::vector<CrosstalkReport> crosstalk_study(const std::vector<FiberCrossSection>& variants, double distance_um,
                                             const BpmGrid& grid, const CrosstalkStudyOptions& options = {});

/// Variant list for the trench study: a no-trench reference followed by every
/// (dn, width) combination with width > 0.
std::vector<FiberCrossSection> trench_variants(const FiberCrossSection& base, const std::vector<double>& widths_um,
                                               const std::vector<double>& dns);

std::string variant_label(const FiberCrossSection& xs);

struct SupermodeCoupling {
  double beta_even = 0.0;
  double beta_odd = 0.0;
  double kappa = 0.0;        // (beta_even - beta_odd) / 2, 1/um
  double beat_length = 0.0;  // full transfer length pi / (2 kappa), um
  Mode even;
  Mode odd;
};

/// Coupling of a two-core (Pair) cross-section from the splitting of its even
/// and odd supermodes.
SupermodeCoupling supermode_coupling(const FiberCrossSection& pair, const BpmGrid& grid,
                                     const ModeSolverOptions& options = {});

}  // namespace mcfqkd::bpm
