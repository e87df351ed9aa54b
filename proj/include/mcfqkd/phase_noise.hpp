// Stochastic frequency jitter f_n of an interfering laser and the
// expectation of the interference cosine cos(theta + 4 pi f_n dT).

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mcfqkd {

enum class NoiseDistribution { Gaussian };

/// Zero-mean frequency noise with RMS sigma_hz.
struct NoiseSpec {
  double sigma_hz = 0.0;
  NoiseDistribution distribution = NoiseDistribution::Gaussian;

  void validate() const;
};

struct McConfig {
  std::size_t n_samples = 100000;
  std::uint64_t master_seed = 0;

  void validate() const;
};

struct MeanEstimate {
  double mean = 0.0;
  double std_err = 0.0;
};

/// n_samples i.i.d. draws (Hz) for the given source stream.
std::vector<double> sample_freq_noise(const NoiseSpec& spec, const McConfig& mc,
                                      std::uint64_t source_index = 0);

/// Sample mean of cos(theta + 4 pi f_k dT) with its standard error
/// (unbiased variance / sqrt(n)).
MeanEstimate averaged_cos(double theta, const NoiseSpec& spec, double delta_t, const McConfig& mc,
                          std::uint64_t source_index = 0);

/// Exact E[cos(theta + 4 pi f dT)] / cos(theta) for Gaussian f:
/// exp(-8 pi^2 sigma^2 dT^2).
double damping_factor(const NoiseSpec& spec, double delta_t);

/// Phase jitter scale 4 pi dT used by the sampler (radians per Hz).
double phase_per_hz(double delta_t);

}  // namespace mcfqkd
