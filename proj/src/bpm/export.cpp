#include "mcfqkd/bpm/export.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mcfqkd/io/format.hpp"

namespace mcfqkd::bpm {

std::vector<double> intensity(const ComplexField& field, double launched_power) {
  if (!(launched_power > 0.0)) throw std::invalid_argument("launched power must be positive");
  std::vector<double> out(field.amplitudes.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(field.amplitudes[i]) / launched_power;
  return out;
}

void write_csv_grid(std::ostream& out, std::size_t nx, std::size_t ny, const std::vector<double>& values) {
  if (values.size() != nx * ny) throw std::invalid_argument("grid values do not match nx*ny");
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      if (ix) out << ',';
      out << io::format_number(values[iy * nx + ix]);
    }
    out << '\n';
  }
}

void write_pgm(std::ostream& out, std::size_t nx, std::size_t ny, const std::vector<double>& values, double lo,
               double hi) {
  if (values.size() != nx * ny) throw std::invalid_argument("grid values do not match nx*ny");
  if (!(hi > lo)) throw std::invalid_argument("PGM range must satisfy hi > lo");
  out << "P5\n" << nx << ' ' << ny << "\n255\n";
  std::string row(nx, '\0');
  for (std::size_t r = 0; r < ny; ++r) {
    const std::size_t iy = ny - 1 - r;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double t = std::clamp((values[iy * nx + ix] - lo) / (hi - lo), 0.0, 1.0);
      row[ix] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t)));
    }
    out.write(row.data(), static_cast<std::streamsize>(nx));
  }
}

void write_intensity_pgm(std::ostream& out, const ComplexField& field, double launched_power, double floor_db) {
  auto v = intensity(field, launched_power);
  const double cell = field.grid.cell_area();  // plot the power fraction per cell
  for (auto& x : v) x = x > 0.0 ? std::max(floor_db, 10.0 * std::log10(x * cell)) : floor_db;
  write_pgm(out, field.grid.nx, field.grid.ny, v, floor_db, 0.0);
}

void write_index_pgm(std::ostream& out, const IndexMap& map) {
  const auto [lo, hi] = std::minmax_element(map.n.begin(), map.n.end());
  const double pad = *hi > *lo ? 0.0 : 1e-3;
  write_pgm(out, map.nx, map.ny, map.n, *lo - pad, *hi + pad);
}

}  // namespace mcfqkd::bpm
