// Analytic coupled-mode oracle for two identical step-index cores.
//
// LP01 eigenvalue equation:  U J1(U)/J0(U) = W K1(W)/K0(W),  U^2 + W^2 = V^2.
// Coupling coefficient of the scalar paraxial model (propagation constant
// replaced by k0 n_ref, as in the BPM operator):
//
//   kappa = U^2 K0(W D / a) / (k0 n_ref a^2 V^2 K1(W)^2)
//
// which equals sqrt(2 Delta)/a * U^2/V^3 * K0(W D/a) / K1(W)^2 for n_ref = n_core.
// Only <cmath> special functions are used; nothing here touches the BPM code.

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

struct Lp01 {
  double v = 0.0;
  double u = 0.0;
  double w = 0.0;
};

inline Lp01 solve_lp01(double a, double n_core, double n_clad, double wavelength) {
  const double k0 = 2.0 * std::numbers::pi / wavelength;
  const double v = k0 * a * std::sqrt(n_core * n_core - n_clad * n_clad);
  const auto f = [v](double u) {
    const double w = std::sqrt(v * v - u * u);
    return u * std::cyl_bessel_j(1.0, u) / std::cyl_bessel_j(0.0, u) -
           w * std::cyl_bessel_k(1.0, w) / std::cyl_bessel_k(0.0, w);
  };
  // f < 0 near u = 0 and f -> +inf as u -> min(v, 2.4048)
  double lo = 1e-9;
  double hi = std::min(v, 2.404825557695773) * (1.0 - 1e-12);
  if (f(lo) > 0.0 || f(hi) < 0.0) throw std::runtime_error("LP01 root not bracketed");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  const double u = 0.5 * (lo + hi);
  return {v, u, std::sqrt(v * v - u * u)};
}

inline double coupling_coefficient(double a, double n_core, double n_clad, double wavelength, double separation,
                                   double n_ref) {
  const Lp01 m = solve_lp01(a, n_core, n_clad, wavelength);
  const double k0 = 2.0 * std::numbers::pi / wavelength;
  const double k1 = std::cyl_bessel_k(1.0, m.w);
  return m.u * m.u * std::cyl_bessel_k(0.0, m.w * separation / a) / (k0 * n_ref * a * a * m.v * m.v * k1 * k1);
}

}  // namespace oracle
