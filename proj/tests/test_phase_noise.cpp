#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "mcfqkd/counter_rng.hpp"
#include "mcfqkd/phase_noise.hpp"

using namespace mcfqkd;

namespace {

double gaussian_cos_oracle(double theta, double sigma, double dt) {
  // E[cos(theta + a X)] = cos(theta) exp(-a^2/2), X ~ N(0, 1), a = 4 pi sigma dt
  const double a = 4.0 * std::numbers::pi * sigma * dt;
  return std::cos(theta) * std::exp(-0.5 * a * a);
}

}  // namespace

TEST_CASE("counter rng is stateless and reproducible") {
  CHECK(rng::standard_normal(1, 0, 0) == rng::standard_normal(1, 0, 0));
  CHECK(rng::standard_normal(1, 0, 0) != rng::standard_normal(2, 0, 0));
  CHECK(rng::standard_normal(1, 0, 0) != rng::standard_normal(1, 1, 0));
  const auto [a, b] = rng::normal_pair(rng::derive_key(9, 3, 5));
  CHECK(rng::standard_normal(9, 3, 10) == a);
  CHECK(rng::standard_normal(9, 3, 11) == b);
  CHECK(rng::to_unit_open0(0) > 0.0);
  CHECK(rng::to_unit_open0(~0ULL) == 1.0);
  static_assert(rng::mix64(0) == 0);
}

TEST_CASE("standard normal moments") {
  const std::size_t n = 200000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double z = rng::standard_normal(2024, 0, k);
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  const double m = s1 / n;
  CHECK(std::abs(m) < 4.0 / std::sqrt(double(n)));
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(4.0 * std::sqrt(2.0 / n)));
  CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("damping factor") {
  const double dt = 50e-12;
  CHECK(damping_factor({0.0}, dt) == 1.0);
  const double sigma = 1e9;
  CHECK(damping_factor({sigma}, dt) ==
        doctest::Approx(std::exp(-8.0 * std::numbers::pi * std::numbers::pi * sigma * sigma * dt * dt)).epsilon(1e-14));
  CHECK(damping_factor({1e12}, dt) == 0.0);
  CHECK(phase_per_hz(dt) == doctest::Approx(4.0 * std::numbers::pi * dt));
}

TEST_CASE("noise samples") {
  const McConfig mc{50000, 77};
  const auto a = sample_freq_noise({2e9}, mc, 0);
  const auto b = sample_freq_noise({2e9}, mc, 0);
  const auto c = sample_freq_noise({2e9}, mc, 1);
  CHECK(a == b);
  CHECK(a != c);
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  double var = 0.0;
  for (double x : a) var += (x - mean) * (x - mean);
  var /= a.size() - 1;
  CHECK(std::abs(mean) < 4.0 * 2e9 / std::sqrt(double(a.size())));
  CHECK(std::sqrt(var) == doctest::Approx(2e9).epsilon(0.02));

  const auto z = sample_freq_noise({0.0}, mc, 0);
  CHECK(std::all_of(z.begin(), z.end(), [](double x) { return x == 0.0; }));
  CHECK_THROWS(sample_freq_noise({-1.0}, mc, 0));
  CHECK_THROWS(sample_freq_noise({1.0}, McConfig{0, 1}, 0));
}

TEST_CASE("averaged cosine") {
  const double dt = 50e-12;
  SUBCASE("zero noise is exact") {
    for (double theta : {0.0, 0.7, std::numbers::pi}) {
      const auto e = averaged_cos(theta, {0.0}, dt, {1000, 1});
      CHECK(e.mean == std::cos(theta));
      CHECK(e.std_err == 0.0);
    }
  }
  SUBCASE("matches the Gaussian oracle") {
    for (double theta : {0.0, 1.0, 2.5})
      for (double sigma : {3e8, 1.5e9, 5e9}) {
        const auto e = averaged_cos(theta, {sigma}, dt, {100000, 5});
        CHECK(e.std_err > 0.0);
        CHECK(std::abs(e.mean - gaussian_cos_oracle(theta, sigma, dt)) < 5.0 * e.std_err);
      }
  }
  SUBCASE("seeded runs repeat exactly") {
    const auto a = averaged_cos(0.3, {1e9}, dt, {10000, 42});
    const auto b = averaged_cos(0.3, {1e9}, dt, {10000, 42});
    CHECK(a.mean == b.mean);
    CHECK(a.std_err == b.std_err);
  }
  SUBCASE("a full turn of theta changes nothing") {
    for (double theta : {-2.0, 0.0, 0.4, 3.0}) {
      const auto a = averaged_cos(theta, {2e9}, dt, {20000, 8});
      const auto b = averaged_cos(theta + 2.0 * std::numbers::pi, {2e9}, dt, {20000, 8});
      CHECK(std::abs(a.mean - b.mean) < 1e-12);
    }
  }
  SUBCASE("huge noise averages to zero") {
    const auto e = averaged_cos(0.0, {1e12}, dt, {100000, 3});
    CHECK(std::abs(e.mean) < 5.0 * e.std_err);
    CHECK(e.std_err == doctest::Approx(std::sqrt(0.5 / 100000)).epsilon(0.05));
  }
}
