#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mcfqkd/threshold.hpp"

using namespace mcfqkd;

namespace {

constexpr double kDt = 50e-12;

// Ideal detectors, one fully anti-phased source, unit weight per unit power.
CrosstalkScene ninth_scene() {
  CrosstalkScene s;
  s.params.d1 = 0.0;
  s.params.d2 = 1.0;
  s.params.alpha.value_db = 0.0;
  s.sources = {{1.0, freq_offset_for_v_omega(-1.0, kDt), 1.0}};
  return s;
}

// Two sources with opposite V_omega and very different linewidths.
CrosstalkScene psr_scene(double f1 = 0.85, double f2 = 0.15, double scale1 = 0.1, double scale2 = 3.0) {
  CrosstalkScene s;
  s.sources = {{f1, freq_offset_for_v_omega(1.0, kDt), scale1}, {f2, freq_offset_for_v_omega(-1.0, kDt), scale2}};
  return s;
}

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(std::pow(10.0, std::log10(a) + (std::log10(b) - std::log10(a)) * i / (n - 1)));
  return v;
}

// 1-D scan of the weighted mean coherence, independent of the threshold code.
double coherence_oracle(const CrosstalkScene& s, double sigma) {
  double num = 0.0, den = 0.0;
  for (const auto& src : s.sources) {
    const double sig = src.noise_scale * sigma;
    const double c = std::cos(2.0 * std::numbers::pi * src.freq_offset_hz * kDt) *
                     std::exp(-8.0 * std::numbers::pi * std::numbers::pi * sig * sig * kDt * kDt);
    num += src.power_rel * c;
    den += src.power_rel;
  }
  return num / den;
}

}  // namespace

TEST_CASE("documented scene crosses at one ninth") {
  const auto r = find_threshold(ninth_scene());
  CHECK(r.kind == ThresholdKind::Crossing);
  CHECK(r.s_star == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  CHECK(r.inv_threshold == doctest::Approx(9.0).epsilon(1e-13));
  CHECK(find_threshold_bisection(ninth_scene()).s_star == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(std::string(to_string(r.kind)) == "Crossing");
}

TEST_CASE("classification") {
  SUBCASE("baseline already below the threshold") {
    auto s = ninth_scene();
    s.params.d1 = 0.2;
    s.params.d2 = 0.8;
    const auto r = find_threshold(s);
    CHECK(r.kind == ThresholdKind::AlwaysBelow);
    CHECK(r.scale_or_limit() == 0.0);
    CHECK(find_threshold_bisection(s).kind == ThresholdKind::AlwaysBelow);
    CHECK_THROWS_AS(infinite_noise_threshold(s.params), std::domain_error);
  }
  SUBCASE("coherent in-phase crosstalk never reaches the threshold") {
    auto s = ninth_scene();
    s.sources[0].freq_offset_hz = 0.0;
    const auto r = find_threshold(s);
    CHECK(r.kind == ThresholdKind::NoEffect);
    CHECK(std::isinf(r.scale_or_limit()));
    CHECK(find_threshold_bisection(s).kind == ThresholdKind::NoEffect);
  }
  SUBCASE("coherence exactly at the threshold is NoEffect") {
    auto s = ninth_scene();
    s.sources[0].freq_offset_hz = freq_offset_for_v_omega(0.8, kDt);
    s.params.visibility_threshold = mean_coherence(s);
    CHECK(find_threshold(s).kind == ThresholdKind::NoEffect);
  }
  SUBCASE("no sources") {
    CrosstalkScene s;
    CHECK_THROWS_AS(find_threshold(s), std::invalid_argument);
    s.sources = {{0.0, 0.0, 1.0}};
    CHECK_THROWS_AS(find_threshold(s), std::invalid_argument);
  }
}

TEST_CASE("property: visibility at the crossing equals the threshold") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int crossings = 0;
  for (int trial = 0; trial < 300; ++trial) {
    CrosstalkScene s;
    s.params.d1 = 0.05 * u(gen);
    s.params.d2 = 0.6 + 0.4 * u(gen);
    s.params.visibility_threshold = 0.5 + 0.4 * u(gen);
    s.params.alpha.value_db = 30.0 * u(gen) - 10.0;
    for (int i = 0; i < 1 + trial % 3; ++i) s.sources.push_back({u(gen) + 1e-3, 2e10 * u(gen), 2.0 * u(gen)});
    s.global_sigma_hz = 3e9 * u(gen);
    const auto r = find_threshold(s);
    if (!r.crossing()) continue;
    ++crossings;
    const double v = visibility_avg(s.scaled(r.s_star / s.total_weight()));
    CHECK(v == doctest::Approx(s.params.visibility_threshold).epsilon(1e-10));
    // below the crossing the key survives, above it does not
    CHECK(visibility_avg(s.scaled(0.99 * r.s_star / s.total_weight())) > s.params.visibility_threshold);
    CHECK(visibility_avg(s.scaled(1.01 * r.s_star / s.total_weight())) < s.params.visibility_threshold);
  }
  CHECK(crossings > 50);
}

TEST_CASE("infinite-noise limit") {
  ChannelParams p;
  CHECK(infinite_noise_threshold(p) == doctest::Approx((0.98 - 0.8) / 0.8));
  auto s = psr_scene();
  const double huge = 1e13;  // damping far below 1e-12 for every source
  const auto r = find_threshold(s.with_sigma(huge));
  REQUIRE(r.crossing());
  CHECK(r.s_star / infinite_noise_threshold(s.params) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Monte-Carlo threshold tracks the closed form") {
  auto s = psr_scene(0.5, 0.5, 1.0, 1.0).with_sigma(1.5e9);
  const auto exact = find_threshold(s);
  const auto mc = find_threshold_mc(s, {100000, 21});
  REQUIRE(exact.crossing());
  REQUIRE(mc.crossing());
  CHECK(mc.s_star == doctest::Approx(exact.s_star).epsilon(0.02));
  const auto again = find_threshold_mc(s, {100000, 21});
  CHECK(again.s_star == mc.s_star);
}

TEST_CASE("sweep grid validation") {
  SweepGrid g{{1e8, 1e9}, psr_scene()};
  CHECK_NOTHROW(g.validate());
  g.sigma_values = {1e9, 1e9};
  CHECK_THROWS(g.validate());
  g.sigma_values = {};
  CHECK_THROWS(g.validate());
  g.sigma_values = {-1.0, 1.0};
  CHECK_THROWS(g.validate());
  g.sigma_values = {1.0, 2.0};
  g.scene_template.sources.clear();
  CHECK_THROWS(g.validate());
}

TEST_CASE("threshold curve and SNR") {
  const SweepGrid g{log_grid(1e7, 1e11, 41), psr_scene(0.5, 0.5)};
  const auto curve = threshold_vs_noise(g);
  const auto snr = snr_curve(g);
  REQUIRE(curve.size() == 41);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].sigma_hz == g.sigma_values[i]);
    REQUIRE(curve[i].result.crossing());
    CHECK(curve[i].snr_db == doctest::Approx(10.0 * std::log10(curve[i].result.s_star)));
    CHECK(snr[i].snr_db == curve[i].snr_db);
  }
  CHECK(curve.back().normalized == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("phase stochastic resonance") {
  const double dd = 0.98, sd = 1.0, t = 0.8;
  SUBCASE("two linewidth scales give an interior maximum and a NoEffect window") {
    const SweepGrid g{log_grid(1e7, 1e11, 161), psr_scene()};
    const auto pos = psr_position(g);
    REQUIRE(pos.has_value());
    // oracle: fine scan of the mean coherence
    double best = 0.0, best_c = -2.0;
    for (double x = 7.0; x <= 11.0; x += 1e-4) {
      const double c = coherence_oracle(g.scene_template, std::pow(10.0, x));
      if (c > best_c) best_c = c, best = std::pow(10.0, x);
    }
    CHECK(*pos == doctest::Approx(best).epsilon(2e-3));
    const auto curve = threshold_vs_noise(g);
    std::size_t first = curve.size(), last = 0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const bool oracle_no_effect = coherence_oracle(g.scene_template, curve[i].sigma_hz) >= t;
      CHECK((curve[i].result.kind == ThresholdKind::NoEffect) == oracle_no_effect);
      if (oracle_no_effect) first = std::min(first, i), last = i;
    }
    REQUIRE(first < last);
    for (std::size_t i = first; i <= last; ++i) CHECK(curve[i].result.kind == ThresholdKind::NoEffect);
    CHECK(curve.front().result.crossing());
    CHECK(curve.back().result.crossing());
  }
  SUBCASE("equal linewidth scales are monotone") {
    const SweepGrid g{log_grid(1e7, 1e11, 161), psr_scene(0.6, 0.4, 1.0, 1.0)};
    CHECK_FALSE(psr_position(g).has_value());
    const auto curve = threshold_vs_noise(g);
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].normalized <= curve[i - 1].normalized * (1 + 1e-12));
  }
  SUBCASE("crossing formula") {
    auto s = psr_scene().with_sigma(2e7);
    const double c = mean_coherence(s);
    CHECK(find_threshold(s).s_star == doctest::Approx((t * sd - dd) / (c - t)).epsilon(1e-12));
  }
}

TEST_CASE("PSR map") {
  const SweepGrid g{log_grid(1e7, 1e11, 81), psr_scene()};
  const std::vector<double> v1{-1.0, 0.0, 1.0}, v2{-1.0, 1.0};
  const auto cells = psr_map(v1, v2, g);
  REQUIRE(cells.size() == 6);
  CHECK(cells[0].v_w1 == -1.0);
  CHECK(cells[1].v_w2 == 1.0);
  // (+1, -1) is the template itself
  REQUIRE(cells[4].sigma_star_hz.has_value());
  CHECK(*cells[4].sigma_star_hz == doctest::Approx(*psr_position(g)).epsilon(1e-6));
  // equal signs: both terms decay, no interior peak
  CHECK_FALSE(cells[5].sigma_star_hz.has_value());
  SweepGrid one = g;
  one.scene_template.sources.pop_back();
  CHECK_THROWS(psr_map(v1, v2, one));
}
