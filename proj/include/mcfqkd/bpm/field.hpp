#pragma once

#include <complex>
#include <vector>

#include "mcfqkd/bpm/fiber.hpp"

namespace mcfqkd::bpm {

using Complex = std::complex<double>;

/// Sampled transverse field on a BpmGrid, row-major (iy * nx + ix).
struct ComplexField {
  BpmGrid grid;
  std::vector<Complex> amplitudes;

  ComplexField() = default;
  explicit ComplexField(const BpmGrid& g) : grid(g), amplitudes(g.size()) {}

  Complex& at(std::size_t ix, std::size_t iy) { return amplitudes[iy * grid.nx + ix]; }
  const Complex& at(std::size_t ix, std::size_t iy) const { return amplitudes[iy * grid.nx + ix]; }

  /// sum |a|^2 dx dy
  double power() const;
  void normalize(double target_power = 1.0);
};

/// <a|b> = sum conj(a) b dx dy. Both fields must share the grid shape.
Complex overlap(const ComplexField& a, const ComplexField& b);

/// Mirror x -> -x about the grid centre (ix -> nx - ix, periodic).
ComplexField mirror_x(const ComplexField& f);

/// Circular shift by whole grid cells.
ComplexField shifted(const ComplexField& f, long shift_x, long shift_y);

}  // namespace mcfqkd::bpm
