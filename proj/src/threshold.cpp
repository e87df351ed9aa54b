#include "mcfqkd/threshold.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace mcfqkd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBracketCap = 0x1.0p1000;

void require_shape(const CrosstalkScene& scene) {
  scene.validate();
  if (scene.sources.empty())
    throw std::invalid_argument("threshold needs at least one crosstalk source");
  if (!(scene.total_weight() > 0.0))
    throw std::invalid_argument("threshold needs a positive total crosstalk weight");
}

ThresholdResult make_crossing(double s) { return {ThresholdKind::Crossing, s, 1.0 / s}; }

// Bisection on the total weight s for a visibility callback that is
// non-increasing in s.
ThresholdResult bisect(const std::function<double(double)>& visibility_at, double threshold,
                       double rel_tol) {
  if (!(visibility_at(0.0) > threshold)) return {ThresholdKind::AlwaysBelow, 0.0, 0.0};
  double lo = 0.0;
  double hi = 1.0;
  while (visibility_at(hi) > threshold) {
    lo = hi;
    hi *= 2.0;
    if (hi > kBracketCap) return {ThresholdKind::NoEffect, kInf, 0.0};
  }
  for (int iter = 0; iter < 2000 && (hi - lo) > rel_tol * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (visibility_at(mid) > threshold)
      lo = mid;
    else
      hi = mid;
  }
  return make_crossing(0.5 * (lo + hi));
}

}  // namespace

const char* to_string(ThresholdKind kind) {
  switch (kind) {
    case ThresholdKind::Crossing: return "Crossing";
    case ThresholdKind::AlwaysBelow: return "AlwaysBelow";
    case ThresholdKind::NoEffect: return "NoEffect";
  }
  return "?";
}

double ThresholdResult::scale_or_limit() const {
  switch (kind) {
    case ThresholdKind::Crossing: return s_star;
    case ThresholdKind::NoEffect: return kInf;
    case ThresholdKind::AlwaysBelow: return 0.0;
  }
  return 0.0;
}

double mean_coherence(const CrosstalkScene& scene) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < scene.sources.size(); ++i) {
    const double w = scene.weight(i);
    num += w * expected_cos(scene, i);
    den += w;
  }
  if (!(den > 0.0)) throw std::invalid_argument("mean_coherence needs a positive total weight");
  return num / den;
}

ThresholdResult find_threshold(const CrosstalkScene& scene) {
  require_shape(scene);
  const auto& p = scene.params;
  const double dd = p.d2 - p.d1;
  const double sd = p.d2 + p.d1;
  const double t = p.visibility_threshold;
  if (!(dd / sd > t)) return {ThresholdKind::AlwaysBelow, 0.0, 0.0};
  const double c = mean_coherence(scene);
  if (c >= t) return {ThresholdKind::NoEffect, kInf, 0.0};
  const double s = (t * sd - dd) / (c - t);
  if (!std::isfinite(s) || !(s > 0.0)) return {ThresholdKind::NoEffect, kInf, 0.0};
  return make_crossing(s);
}

ThresholdResult find_threshold_bisection(const CrosstalkScene& scene, double rel_tol) {
  require_shape(scene);
  const double w0 = scene.total_weight();
  return bisect([&](double s) { return visibility_avg(scene.scaled(s / w0)); },
                scene.params.visibility_threshold, rel_tol);
}

ThresholdResult find_threshold_mc(const CrosstalkScene& scene, const McConfig& mc, double rel_tol) {
  require_shape(scene);
  const double w0 = scene.total_weight();
  return bisect([&](double s) { return visibility_mc(scene.scaled(s / w0), mc).mean; },
                scene.params.visibility_threshold, rel_tol);
}

double infinite_noise_threshold(const ChannelParams& params) {
  params.validate();
  const double dd = params.d2 - params.d1;
  const double sd = params.d2 + params.d1;
  const double t = params.visibility_threshold;
  const double s = (dd - t * sd) / t;
  if (!(s > 0.0))
    throw std::domain_error("baseline visibility does not exceed the threshold; no infinite-noise limit");
  return s;
}

void SweepGrid::validate() const {
  if (sigma_values.empty()) throw std::invalid_argument("sigma_hz grid is empty");
  for (std::size_t i = 0; i < sigma_values.size(); ++i) {
    if (!(sigma_values[i] >= 0.0) || !std::isfinite(sigma_values[i]))
      throw std::invalid_argument("sigma_hz values must be finite and non-negative");
    if (i > 0 && !(sigma_values[i] > sigma_values[i - 1]))
      throw std::invalid_argument("sigma_hz values must be strictly increasing");
  }
  require_shape(scene_template);
}

std::vector<ThresholdPoint> threshold_vs_noise(const SweepGrid& grid) {
  grid.validate();
  const double s_inf = infinite_noise_threshold(grid.scene_template.params);
  std::vector<ThresholdPoint> curve;
  curve.reserve(grid.sigma_values.size());
  for (double sigma : grid.sigma_values) {
    ThresholdPoint pt;
    pt.sigma_hz = sigma;
    pt.result = find_threshold(grid.scene_template.with_sigma(sigma));
    if (pt.result.crossing()) {
      pt.normalized = pt.result.s_star / s_inf;
      pt.snr_db = linear_to_db(pt.result.s_star).value_db;
    } else {
      // baseline > threshold is guaranteed above, so this is NoEffect
      pt.normalized = kInf;
      pt.snr_db = kInf;
    }
    curve.push_back(pt);
  }
  return curve;
}

std::vector<ThresholdPoint> snr_curve(const SweepGrid& grid) { return threshold_vs_noise(grid); }

std::optional<double> psr_position(const SweepGrid& grid) {
  const auto curve = threshold_vs_noise(grid);
  const std::size_t n = curve.size();
  if (n < 3) return std::nullopt;

  const auto coherence_at = [&](double sigma) {
    return mean_coherence(grid.scene_template.with_sigma(sigma));
  };
  const double first = curve.front().normalized;
  const double last = curve.back().normalized;
  constexpr double kStrict = 1e-6;

  std::optional<std::size_t> best;
  double best_c = -kInf;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double v = curve[i].normalized;
    if (!(v >= curve[i - 1].normalized && v >= curve[i + 1].normalized)) continue;
    if (!(v > first * (1.0 + kStrict) && v > last * (1.0 + kStrict))) continue;
    const double c = coherence_at(curve[i].sigma_hz);
    if (c > best_c) {
      best_c = c;
      best = i;
    }
  }
  if (!best) return std::nullopt;

  // s* grows with C wherever it is finite, so the argmax of the normalized
  // threshold is the argmax of C(sigma). Golden-section on C.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = grid.sigma_values[*best - 1];
  double b = grid.sigma_values[*best + 1];
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = coherence_at(x1);
  double f2 = coherence_at(x2);
  for (int iter = 0; iter < 200 && (b - a) > 1e-3 * 0.5 * (a + b); ++iter) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = coherence_at(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = coherence_at(x1);
    }
  }
  return 0.5 * (a + b);
}

std::vector<PsrCell> psr_map(const std::vector<double>& vw1_values, const std::vector<double>& vw2_values,
                             const SweepGrid& grid) {
  if (grid.scene_template.sources.size() != 2)
    throw std::invalid_argument("psr_map needs a two-source template");
  const double dt = grid.scene_template.params.delta_t;
  std::vector<PsrCell> cells;
  cells.reserve(vw1_values.size() * vw2_values.size());
  SweepGrid local = grid;
  for (double a : vw1_values) {
    for (double b : vw2_values) {
      local.scene_template.sources[0].freq_offset_hz = freq_offset_for_v_omega(a, dt);
      local.scene_template.sources[1].freq_offset_hz = freq_offset_for_v_omega(b, dt);
      cells.push_back({a, b, psr_position(local)});
    }
  }
  return cells;
}

}  // namespace mcfqkd
