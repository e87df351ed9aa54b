// Index maps and intensity snapshots as CSV grids and 8-bit PGM images.

#pragma once

#include <ostream>
#include <vector>

#include "mcfqkd/bpm/field.hpp"
#include "mcfqkd/bpm/fiber.hpp"

namespace mcfqkd::bpm {

/// |E|^2 / launched_power per sample, row-major like the field.
std::vector<double> intensity(const ComplexField& field, double launched_power = 1.0);

/// One CSV row per grid row (iy ascending), nx comma-separated values, no header.
void write_csv_grid(std::ostream& out, std::size_t nx, std::size_t ny, const std::vector<double>& values);

/// Binary P5 image, row 0 at the top (largest y). Values are mapped linearly
/// from [lo, hi] to [0, 255] and clamped.
void write_pgm(std::ostream& out, std::size_t nx, std::size_t ny, const std::vector<double>& values, double lo,
               double hi);

/// Power per cell in dB relative to launched power, floored at floor_db, as a PGM
/// spanning [floor_db, 0].
void write_intensity_pgm(std::ostream& out, const ComplexField& field, double launched_power = 1.0,
                         double floor_db = -60.0);

void write_index_pgm(std::ostream& out, const IndexMap& map);

}  // namespace mcfqkd::bpm
