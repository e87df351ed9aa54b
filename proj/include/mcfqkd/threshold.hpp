// Key-loss threshold search and phase-stochastic-resonance sweeps.
//
// All crosstalk weights of a template scene are multiplied by a common scale.
// Writing f_i for the weight fractions and c_i for the expected cosines, the
// averaged visibility at total weight s is
//
//   V(s) = (dD + s * C) / (SD + s),   C = sum_i f_i c_i,
//
// which falls monotonically from the baseline dD/SD towards C. The threshold
// s* solves V(s*) = t.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mcfqkd/phase_noise.hpp"
#include "mcfqkd/visibility.hpp"

namespace mcfqkd {

enum class ThresholdKind { Crossing, AlwaysBelow, NoEffect };

const char* to_string(ThresholdKind kind);

struct ThresholdResult {
  ThresholdKind kind = ThresholdKind::AlwaysBelow;
  double s_star = 0.0;         // total weight alpha * sum P at the crossing
  double inv_threshold = 0.0;  // 1 / s_star, Crossing only

  bool crossing() const { return kind == ThresholdKind::Crossing; }
  /// s_star for Crossing, +inf for NoEffect, 0 for AlwaysBelow.
  double scale_or_limit() const;
};

/// Weighted mean expected cosine C of the template scene.
double mean_coherence(const CrosstalkScene& scene);

/// Closed-form classification and crossing.
ThresholdResult find_threshold(const CrosstalkScene& scene);

/// Bisection over visibility_avg of scene.scaled(). Agrees with the closed form.
ThresholdResult find_threshold_bisection(const CrosstalkScene& scene, double rel_tol = 1e-13);

/// Bisection over visibility_mc with common random numbers.
ThresholdResult find_threshold_mc(const CrosstalkScene& scene, const McConfig& mc,
                                  double rel_tol = 1e-10);

/// Threshold for C -> 0: (dD - t SD) / t. Throws std::domain_error when the
/// baseline visibility does not exceed the threshold.
double infinite_noise_threshold(const ChannelParams& params);

struct SweepGrid {
  std::vector<double> sigma_values;  // strictly increasing, Hz
  CrosstalkScene scene_template;

  void validate() const;
};

struct ThresholdPoint {
  double sigma_hz = 0.0;
  ThresholdResult result;
  double normalized = 0.0;  // s*(sigma) / s_inf; +inf for NoEffect
  double snr_db = 0.0;      // 10 log10 s*; +inf for NoEffect
};

std::vector<ThresholdPoint> threshold_vs_noise(const SweepGrid& grid);

/// Same sweep; the SNR column is the threshold in dB.
std::vector<ThresholdPoint> snr_curve(const SweepGrid& grid);

/// Position of the interior maximum of the normalized threshold on the grid,
/// refined by golden-section search on C(sigma). Empty when the curve has no
/// interior maximum.
std::optional<double> psr_position(const SweepGrid& grid);

struct PsrCell {
  double v_w1 = 0.0;
  double v_w2 = 0.0;
  std::optional<double> sigma_star_hz;
};

/// Grid of PSR positions over the V_omega values of a two-source template.
/// Rows follow vw1_values, columns vw2_values.
std::vector<PsrCell> psr_map(const std::vector<double>& vw1_values, const std::vector<double>& vw2_values,
                             const SweepGrid& grid);

}  // namespace mcfqkd
