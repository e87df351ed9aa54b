#include "mcfqkd/bpm/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mcfqkd::bpm {

const char* to_string(Lattice lattice) {
  switch (lattice) {
    case Lattice::Square4: return "square4";
    case Lattice::Hex7: return "hex7";
    case Lattice::Pair: return "pair";
    case Lattice::Single: return "single";
  }
  return "?";
}

std::vector<Point> FiberCrossSection::core_centers() const {
  const double h = 0.5 * pitch_um;
  switch (lattice) {
    case Lattice::Square4:
      // counter-clockwise from the lower-left corner; cores k and k+2 are diagonal
      return {{-h, -h}, {h, -h}, {h, h}, {-h, h}};
    case Lattice::Hex7: {
      std::vector<Point> c{{0.0, 0.0}};
      for (int k = 0; k < 6; ++k) {
        const double phi = k * std::numbers::pi / 3.0;
        c.push_back({pitch_um * std::cos(phi), pitch_um * std::sin(phi)});
      }
      return c;
    }
    case Lattice::Pair: return {{-h, 0.0}, {h, 0.0}};
    case Lattice::Single: return {{0.0, 0.0}};
  }
  return {};
}

void FiberCrossSection::validate() const {
  if (!(core_radius_um > 0.0)) throw std::invalid_argument("core_radius_um must be positive");
  if (!(core_dn > 0.0)) throw std::invalid_argument("core_dn must be positive");
  if (!(cladding_index > 1.0)) throw std::invalid_argument("cladding_index must exceed 1");
  if (!(cladding_diameter_um > 0.0)) throw std::invalid_argument("cladding_diameter_um must be positive");
  if (lattice != Lattice::Single && !(pitch_um > 0.0)) throw std::invalid_argument("pitch_um must be positive");
  if (trench) {
    if (!(trench->width_um >= 0.0)) throw std::invalid_argument("trench width_um must be non-negative");
    if (!(trench->dn_below_cladding >= 0.0)) throw std::invalid_argument("trench dn must be non-negative");
    if (!(trench->gap_um >= 0.0)) throw std::invalid_argument("trench gap_um must be non-negative");
  }
  const auto centers = core_centers();
  const double r_out = outer_radius();
  const double r_clad = 0.5 * cladding_diameter_um;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (std::hypot(centers[i].x, centers[i].y) + r_out > r_clad)
      throw std::invalid_argument("core " + std::to_string(i) + " does not fit inside the cladding");
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      const double d = std::hypot(centers[i].x - centers[j].x, centers[i].y - centers[j].y);
      if (d < 2.0 * r_out)
        throw std::invalid_argument("core/trench regions of cores " + std::to_string(i) + " and " +
                                    std::to_string(j) + " overlap");
    }
  }
}

double BpmGrid::k0() const { return 2.0 * std::numbers::pi / wavelength; }

void BpmGrid::validate() const {
  if (nx < 8 || ny < 8) throw std::invalid_argument("grid needs at least 8 points per axis");
  if (nx % 2 != 0 || ny % 2 != 0) throw std::invalid_argument("nx and ny must be even");
  if (!(dx > 0.0 && dy > 0.0)) throw std::invalid_argument("dx and dy must be positive");
  if (!(dz > 0.0)) throw std::invalid_argument("dz must be positive");
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
  if (!(reference_index >= 1.0)) throw std::invalid_argument("reference_index must be at least 1");
  if (absorber_width < 0.0) throw std::invalid_argument("absorber_width must be non-negative");
}

void BpmGrid::validate_for(const FiberCrossSection& xs) const {
  validate();
  if (absorber_width < 4.0 * wavelength) throw std::invalid_argument("absorber_width must be at least 4 wavelengths");
  xs.validate();
  if (2.0 * xs.core_radius_um < 8.0 * std::max(dx, dy))
    throw std::invalid_argument("grid does not resolve the core: need at least 8 samples per diameter");
  const double half_x = 0.5 * static_cast<double>(nx) * dx - absorber_width;
  const double half_y = 0.5 * static_cast<double>(ny) * dy - absorber_width;
  for (const auto& c : xs.core_centers()) {
    if (std::abs(c.x) + xs.outer_radius() > half_x || std::abs(c.y) + xs.outer_radius() > half_y)
      throw std::invalid_argument("core region reaches the absorbing boundary; enlarge the grid");
  }
}

double v_number(double core_radius, double n_core, double n_clad, double wavelength) {
  return 2.0 * std::numbers::pi * core_radius / wavelength * std::sqrt(n_core * n_core - n_clad * n_clad);
}

namespace {

double eps_at(const FiberCrossSection& xs, const std::vector<Point>& centers, double x, double y) {
  const double a = xs.core_radius_um;
  const double r_in = xs.trench_inner_radius();
  const double r_out = xs.outer_radius();
  for (const auto& c : centers) {
    const double r = std::hypot(x - c.x, y - c.y);
    if (r < a) return xs.core_index() * xs.core_index();
    if (r >= r_in && r < r_out) return xs.trench_index() * xs.trench_index();
  }
  return xs.cladding_index * xs.cladding_index;
}

}  // namespace

IndexMap build_index_map(const FiberCrossSection& xs, const BpmGrid& grid) {
  return build_index_map(xs, grid, xs.core_centers());
}

IndexMap build_index_map(const FiberCrossSection& xs, const BpmGrid& grid, const std::vector<Point>& centers) {
  xs.validate();
  grid.validate();
  constexpr int kSub = 16;
  const double a = xs.core_radius_um;
  const double r_in = xs.trench_inner_radius();
  const double r_out = xs.outer_radius();
  const double reach = 0.75 * std::max(grid.dx, grid.dy);

  IndexMap map{grid.nx, grid.ny, std::vector<double>(grid.size(), xs.cladding_index)};
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    const double y = grid.y(iy);
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const double x = grid.x(ix);
      bool cut = false;
      bool near = false;
      for (const auto& c : centers) {
        const double r = std::hypot(x - c.x, y - c.y);
        if (r < r_out + reach) near = true;
        if (std::abs(r - a) < reach) cut = true;
        if (r_out > r_in && (std::abs(r - r_in) < reach || std::abs(r - r_out) < reach)) cut = true;
      }
      if (!near) continue;
      double eps = 0.0;
      if (cut) {
        for (int sy = 0; sy < kSub; ++sy) {
          const double yy = y + ((sy + 0.5) / kSub - 0.5) * grid.dy;
          for (int sx = 0; sx < kSub; ++sx) {
            const double xx = x + ((sx + 0.5) / kSub - 0.5) * grid.dx;
            eps += eps_at(xs, centers, xx, yy);
          }
        }
        eps /= kSub * kSub;
      } else {
        eps = eps_at(xs, centers, x, y);
      }
      map.n[iy * grid.nx + ix] = std::sqrt(eps);
    }
  }
  return map;
}

}  // namespace mcfqkd::bpm
