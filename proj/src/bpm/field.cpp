#include "mcfqkd/bpm/field.hpp"

#include <cmath>
#include <stdexcept>

namespace mcfqkd::bpm {

double ComplexField::power() const {
  double sum = 0.0;
  for (const auto& a : amplitudes) sum += std::norm(a);
  return sum * grid.cell_area();
}

void ComplexField::normalize(double target_power) {
  const double p = power();
  if (!(p > 0.0) || !std::isfinite(p)) throw std::domain_error("cannot normalize a field with zero power");
  const double scale = std::sqrt(target_power / p);
  for (auto& a : amplitudes) a *= scale;
}

Complex overlap(const ComplexField& a, const ComplexField& b) {
  if (a.grid.nx != b.grid.nx || a.grid.ny != b.grid.ny)
    throw std::invalid_argument("overlap: grid shapes differ");
  Complex sum{0.0, 0.0};
  for (std::size_t k = 0; k < a.amplitudes.size(); ++k) sum += std::conj(a.amplitudes[k]) * b.amplitudes[k];
  return sum * a.grid.cell_area();
}

ComplexField mirror_x(const ComplexField& f) {
  ComplexField out(f.grid);
  const std::size_t nx = f.grid.nx;
  for (std::size_t iy = 0; iy < f.grid.ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix) out.at((nx - ix) % nx, iy) = f.at(ix, iy);
  return out;
}

ComplexField shifted(const ComplexField& f, long shift_x, long shift_y) {
  ComplexField out(f.grid);
  const long nx = static_cast<long>(f.grid.nx);
  const long ny = static_cast<long>(f.grid.ny);
  for (long iy = 0; iy < ny; ++iy) {
    const long ty = ((iy + shift_y) % ny + ny) % ny;
    for (long ix = 0; ix < nx; ++ix) {
      const long tx = ((ix + shift_x) % nx + nx) % nx;
      out.at(static_cast<std::size_t>(tx), static_cast<std::size_t>(ty)) =
          f.at(static_cast<std::size_t>(ix), static_cast<std::size_t>(iy));
    }
  }
  return out;
}

}  // namespace mcfqkd::bpm
