// Visibility of the receiver interferometer under multi-core crosstalk.
//
//   V = (D2 - D1 + sum_i w_i cos(theta_i + 4 pi f_ni dT)) / (D2 + D1 + sum_i w_i)
//
// with w_i = alpha * P_i. The denominator carries no noise, so E[V] only needs
// the expectation of each cosine.

#pragma once

#include <cstddef>
#include <vector>

#include "mcfqkd/core_model.hpp"
#include "mcfqkd/phase_noise.hpp"

namespace mcfqkd {

struct VisibilityEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::size_t n_samples = 0;
};

struct CrosstalkScene {
  ChannelParams params;
  std::vector<CrosstalkSource> sources;
  double global_sigma_hz = 0.0;

  void validate() const;

  double weight(std::size_t i) const { return params.alpha_linear() * sources[i].power_rel; }
  double total_weight() const;
  NoiseSpec noise_for(std::size_t i) const { return {sources[i].noise_scale * global_sigma_hz}; }

  /// Copy with every power_rel multiplied by `factor`.
  CrosstalkScene scaled(double factor) const;
  CrosstalkScene with_sigma(double sigma_hz) const;
};

/// Monte-Carlo estimate of E[V]. Source i draws from stream i of mc.master_seed.
VisibilityEstimate visibility_mc(const CrosstalkScene& scene, const McConfig& mc);

/// Closed form with each cosine replaced by cos(theta_i) * damping(sigma_i).
double visibility_avg(const CrosstalkScene& scene);

/// Expected cosine of source i, cos(theta_i) * damping(sigma_i).
double expected_cos(const CrosstalkScene& scene, std::size_t i);

/// QBER when crosstalk clicks err with probability 1/2:
/// (e0 * SD + 0.5 * sum w) / (SD + sum w).
double qber_estimate(const CrosstalkScene& scene, double baseline_qber);

}  // namespace mcfqkd
