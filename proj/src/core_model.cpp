#include "mcfqkd/core_model.hpp"

#include <cmath>
#include <stdexcept>

namespace mcfqkd {

double db_to_linear(DecibelRatio x) { return std::pow(10.0, x.value_db / 10.0); }

DecibelRatio linear_to_db(double ratio) {
  if (!(ratio > 0.0)) throw std::domain_error("linear_to_db: ratio must be positive");
  return DecibelRatio{10.0 * std::log10(ratio)};
}

void ChannelParams::validate() const {
  if (!(d1 >= 0.0 && d1 <= 1.0)) throw std::invalid_argument("d1 must lie in [0, 1]");
  if (!(d2 >= 0.0 && d2 <= 1.0)) throw std::invalid_argument("d2 must lie in [0, 1]");
  if (!(d1 < d2)) throw std::invalid_argument("d1 must be smaller than d2");
  if (!(delta_t > 0.0) || !std::isfinite(delta_t)) throw std::invalid_argument("delta_t must be positive");
  if (!(visibility_threshold > 0.0 && visibility_threshold < 1.0))
    throw std::invalid_argument("visibility_threshold must lie in (0, 1)");
  if (!std::isfinite(alpha.value_db)) throw std::invalid_argument("alpha_db must be finite");
}

void CrosstalkSource::validate() const {
  if (!(power_rel >= 0.0) || !std::isfinite(power_rel))
    throw std::invalid_argument("power_rel must be finite and non-negative");
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale))
    throw std::invalid_argument("noise_scale must be finite and non-negative");
  if (!std::isfinite(freq_offset_hz)) throw std::invalid_argument("freq_offset_hz must be finite");
}

double v_omega(double freq_offset_hz, double delta_t) {
  const double half = 0.5 * kTwoPi * freq_offset_hz * delta_t;
  const double c = std::cos(half);
  const double s = std::sin(half);
  return c * c - s * s;
}

double freq_offset_for_v_omega(double v, double delta_t) {
  if (!(v >= -1.0 && v <= 1.0)) throw std::invalid_argument("v_omega must lie in [-1, 1]");
  if (!(delta_t > 0.0)) throw std::invalid_argument("delta_t must be positive");
  return std::acos(v) / (kTwoPi * delta_t);
}

double wavelength_shift_to_freq(double delta_lambda_m, double lambda_m) {
  return kSpeedOfLight * delta_lambda_m / (lambda_m * lambda_m);
}

}  // namespace mcfqkd
