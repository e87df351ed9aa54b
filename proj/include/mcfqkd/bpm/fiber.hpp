// Multicore fiber cross-sections and the BPM sampling grid. Lengths in um.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace mcfqkd::bpm {

/// Square4: cores at the corners of a pitch x pitch square.
/// Hex7: one central core plus six on a hexagon of radius pitch.
/// Pair and Single are isolated test geometries (two cores along x, one core).
enum class Lattice { Square4, Hex7, Pair, Single };

const char* to_string(Lattice lattice);

/// Low-index annulus from core_radius + gap to core_radius + gap + width.
struct Trench {
  double width_um = 0.0;
  double dn_below_cladding = 0.0;
  double gap_um = 3.5;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct FiberCrossSection {
  double cladding_diameter_um = 125.0;
  Lattice lattice = Lattice::Square4;
  double pitch_um = 50.0;
  double core_radius_um = 3.5;
  double core_dn = 0.005;
  std::optional<Trench> trench;
  double cladding_index = 1.444;

  std::vector<Point> core_centers() const;
  std::size_t core_count() const { return core_centers().size(); }
  double trench_width() const { return trench ? trench->width_um : 0.0; }
  double trench_inner_radius() const { return core_radius_um + (trench_width() > 0.0 ? trench->gap_um : 0.0); }
  /// Radius of the perturbed region around one core (core plus trench).
  double outer_radius() const { return trench_inner_radius() + trench_width(); }
  double core_index() const { return cladding_index + core_dn; }
  double trench_index() const { return cladding_index - (trench ? trench->dn_below_cladding : 0.0); }

  void validate() const;
};

struct BpmGrid {
  std::size_t nx = 256;
  std::size_t ny = 256;
  double dx = 0.5;
  double dy = 0.5;
  double dz = 0.5;
  double wavelength = 1.55;
  double reference_index = 1.444;
  double absorber_width = 8.0;

  double x(std::size_t ix) const { return (static_cast<double>(ix) - static_cast<double>(nx / 2)) * dx; }
  double y(std::size_t iy) const { return (static_cast<double>(iy) - static_cast<double>(ny / 2)) * dy; }
  double k0() const;
  std::size_t size() const { return nx * ny; }
  double cell_area() const { return dx * dy; }

  void validate() const;
  /// Checks the grid against a cross-section: core resolution and that every
  /// core region stays clear of the absorber.
  void validate_for(const FiberCrossSection& xs) const;
};

/// Real refractive-index map, row-major (iy * nx + ix).
struct IndexMap {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> n;

  double at(std::size_t ix, std::size_t iy) const { return n[iy * nx + ix]; }
};

/// Normalized frequency (2 pi a / lambda) sqrt(n_core^2 - n_clad^2).
double v_number(double core_radius, double n_core, double n_clad, double wavelength);

/// Piecewise-constant index map. Pixels cut by a core or trench boundary hold
/// the area average of n^2. Throws std::invalid_argument when the regions of
/// two cores overlap or a core leaves the cladding.
IndexMap build_index_map(const FiberCrossSection& xs, const BpmGrid& grid);

/// Index map containing only the listed cores of `xs`.
IndexMap build_index_map(const FiberCrossSection& xs, const BpmGrid& grid, const std::vector<Point>& centers);

}  // namespace mcfqkd::bpm
