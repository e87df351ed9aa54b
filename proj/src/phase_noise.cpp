#include "mcfqkd/phase_noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mcfqkd/counter_rng.hpp"
#include "running_stats.hpp"

namespace mcfqkd {

void NoiseSpec::validate() const {
  if (!(sigma_hz >= 0.0) || !std::isfinite(sigma_hz))
    throw std::invalid_argument("sigma_hz must be finite and non-negative");
}

void McConfig::validate() const {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
}

double phase_per_hz(double delta_t) { return 4.0 * std::numbers::pi * delta_t; }

std::vector<double> sample_freq_noise(const NoiseSpec& spec, const McConfig& mc,
                                      std::uint64_t source_index) {
  spec.validate();
  mc.validate();
  std::vector<double> out(mc.n_samples, 0.0);
  if (spec.sigma_hz == 0.0) return out;
  for (std::size_t k = 0; k < mc.n_samples; ++k)
    out[k] = spec.sigma_hz * rng::standard_normal(mc.master_seed, source_index, k);
  return out;
}

MeanEstimate averaged_cos(double theta, const NoiseSpec& spec, double delta_t, const McConfig& mc,
                          std::uint64_t source_index) {
  spec.validate();
  mc.validate();
  if (!(delta_t > 0.0)) throw std::invalid_argument("delta_t must be positive");
  // Degenerate distribution: every sample equals cos(theta).
  if (spec.sigma_hz == 0.0) return {std::cos(theta), 0.0};

  const double scale = phase_per_hz(delta_t) * spec.sigma_hz;
  detail::RunningStats stats;
  // Trials 2b and 2b+1 come from the same block; consume both halves in order.
  const std::size_t n = mc.n_samples;
  for (std::size_t k = 0; k < n; k += 2) {
    const auto [a, b] = rng::normal_pair(rng::derive_key(mc.master_seed, source_index, k >> 1));
    stats.push(std::cos(theta + scale * a));
    if (k + 1 < n) stats.push(std::cos(theta + scale * b));
  }
  return {stats.mean(), stats.std_err()};
}

double damping_factor(const NoiseSpec& spec, double delta_t) {
  spec.validate();
  if (spec.distribution != NoiseDistribution::Gaussian)
    throw std::invalid_argument("damping_factor: closed form only exists for Gaussian noise");
  const double s = phase_per_hz(delta_t) * spec.sigma_hz;
  return std::exp(-0.5 * s * s);
}

}  // namespace mcfqkd
