// Shared domain types and unit conventions.
//
// Units: time in seconds, frequency in Hz, lengths in the BPM code in
// micrometres. Power ratios use the 10*log10 convention everywhere.

#pragma once

#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace mcfqkd {

inline constexpr double kSpeedOfLight = 299792458.0;   // m/s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// A dimensionless power ratio stored in dB.
struct DecibelRatio {
  double value_db = 0.0;
};

double db_to_linear(DecibelRatio x);
inline double db_to_linear(double value_db) { return db_to_linear(DecibelRatio{value_db}); }

/// Inverse of db_to_linear. Throws std::domain_error for non-positive input.
DecibelRatio linear_to_db(double ratio);

/// Constants of the receiver's monitoring interferometer.
struct ChannelParams {
  double d1 = 0.01;   // click probability, destructive port
  double d2 = 0.99;   // click probability, constructive port
  double delta_t = 50e-12;
  DecibelRatio alpha{15.0};
  double visibility_threshold = 0.80;

  double baseline_visibility() const { return (d2 - d1) / (d2 + d1); }
  double alpha_linear() const { return db_to_linear(alpha); }

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

/// One interfering core.
struct CrosstalkSource {
  double power_rel = 0.0;       // linear power relative to the quantum signal
  double freq_offset_hz = 0.0;  // carrier offset from the quantum channel
  double noise_scale = 1.0;     // source linewidth = noise_scale * global sigma

  /// Deterministic interference phase, 2*pi*freq_offset*delta_t.
  double theta(double delta_t) const { return kTwoPi * freq_offset_hz * delta_t; }

  void validate() const;
};

/// cos^2(w dT/2) - sin^2(w dT/2) with w = 2 pi f.
double v_omega(double freq_offset_hz, double delta_t);

/// Smallest non-negative frequency offset whose V_omega equals `v`.
double freq_offset_for_v_omega(double v, double delta_t);

/// Frequency offset for a wavelength shift, df = c * dlambda / lambda^2.
double wavelength_shift_to_freq(double delta_lambda_m, double lambda_m = 1550e-9);

}  // namespace mcfqkd
