#include "mcfqkd/visibility.hpp"

#include <cmath>
#include <stdexcept>

#include "mcfqkd/counter_rng.hpp"
#include "running_stats.hpp"

namespace mcfqkd {

void CrosstalkScene::validate() const {
  params.validate();
  if (!(global_sigma_hz >= 0.0) || !std::isfinite(global_sigma_hz))
    throw std::invalid_argument("sigma_hz must be finite and non-negative");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    sources[i].validate();
    if (!std::isfinite(weight(i))) throw std::invalid_argument("crosstalk weight is not finite");
  }
}

double CrosstalkScene::total_weight() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < sources.size(); ++i) sum += weight(i);
  return sum;
}

CrosstalkScene CrosstalkScene::scaled(double factor) const {
  CrosstalkScene out = *this;
  for (auto& s : out.sources) s.power_rel *= factor;
  return out;
}

CrosstalkScene CrosstalkScene::with_sigma(double sigma_hz) const {
  CrosstalkScene out = *this;
  out.global_sigma_hz = sigma_hz;
  return out;
}

VisibilityEstimate visibility_mc(const CrosstalkScene& scene, const McConfig& mc) {
  scene.validate();
  mc.validate();
  const auto& p = scene.params;
  const double dd = p.d2 - p.d1;
  const double sd = p.d2 + p.d1;
  if (scene.sources.empty()) return {dd / sd, 0.0, mc.n_samples};

  const std::size_t m = scene.sources.size();
  std::vector<double> w(m), theta(m), jitter(m);
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = scene.weight(i);
    theta[i] = scene.sources[i].theta(p.delta_t);
    jitter[i] = phase_per_hz(p.delta_t) * scene.noise_for(i).sigma_hz;
  }
  const double denom = sd + scene.total_weight();

  detail::RunningStats stats;
  for (std::size_t k = 0; k < mc.n_samples; ++k) {
    double num = dd;
    for (std::size_t i = 0; i < m; ++i) {
      const double x = jitter[i] == 0.0 ? 0.0 : jitter[i] * rng::standard_normal(mc.master_seed, i, k);
      num += w[i] * std::cos(theta[i] + x);
    }
    stats.push(num / denom);
  }
  return {stats.mean(), stats.std_err(), mc.n_samples};
}

double expected_cos(const CrosstalkScene& scene, std::size_t i) {
  const double dt = scene.params.delta_t;
  return std::cos(scene.sources[i].theta(dt)) * damping_factor(scene.noise_for(i), dt);
}

double visibility_avg(const CrosstalkScene& scene) {
  scene.validate();
  const auto& p = scene.params;
  double num = p.d2 - p.d1;
  double den = p.d2 + p.d1;
  for (std::size_t i = 0; i < scene.sources.size(); ++i) {
    const double w = scene.weight(i);
    num += w * expected_cos(scene, i);
    den += w;
  }
  return num / den;
}

double qber_estimate(const CrosstalkScene& scene, double baseline_qber) {
  scene.validate();
  if (!(baseline_qber >= 0.0 && baseline_qber < 0.5))
    throw std::invalid_argument("baseline_qber must lie in [0, 0.5)");
  const double sd = scene.params.d2 + scene.params.d1;
  const double sw = scene.total_weight();
  return (baseline_qber * sd + 0.5 * sw) / (sd + sw);
}

}  // namespace mcfqkd
