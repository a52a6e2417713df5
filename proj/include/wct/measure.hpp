#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace wct {

using Coord = std::array<double, 2>;

/// A finite measure space: points 0..N-1 with strictly positive masses and
/// optional 1-D or 2-D coordinates. A truncated infinite space records the
/// discarded mass in tail_bound().
class MeasureSpace {
 public:
  /// `dimension` is 0 (no coordinates), 1 or 2; coords must then have one
  /// entry per point. Throws DomainError on any invalid mass or shape.
  MeasureSpace(std::vector<double> masses, int dimension = 0,
               std::vector<Coord> coords = {}, double tail_bound = 0.0);

  std::size_t size() const noexcept { return masses_.size(); }
  double mass(std::size_t i) const { return masses_.at(i); }
  std::span<const double> masses() const noexcept { return masses_; }
  int dimension() const noexcept { return dimension_; }
  const Coord& coord(std::size_t i) const { return coords_.at(i); }
  double tail_bound() const noexcept { return tail_bound_; }
  double total_mass() const noexcept { return total_mass_; }

 private:
  std::vector<double> masses_;
  int dimension_;
  std::vector<Coord> coords_;
  double tail_bound_;
  double total_mass_;
};

using SpacePtr = std::shared_ptr<const MeasureSpace>;

/// Sum of the masses of `atom` (compensated). Throws DomainError on an
/// empty set or an index outside the space.
double atom_mass(const MeasureSpace& space, std::span<const std::size_t> atom);

/// An atomic sub-sigma-algebra: disjoint, nonempty atoms covering every point.
class Partition {
 public:
  Partition(SpacePtr space, std::vector<std::vector<std::size_t>> atoms);

  static Partition whole(SpacePtr space);
  static Partition singletons(SpacePtr space);

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t atom_count() const noexcept { return atoms_.size(); }
  std::span<const std::size_t> atom(std::size_t a) const;
  /// Throws DomainError for an unknown atom id.
  double atom_mass(std::size_t a) const;
  std::size_t atom_of(std::size_t point) const { return atom_of_.at(point); }
  const std::vector<std::vector<std::size_t>>& atoms() const noexcept { return atoms_; }

 private:
  SpacePtr space_;
  std::vector<std::vector<std::size_t>> atoms_;
  std::vector<double> atom_mass_;
  std::vector<std::size_t> atom_of_;
};

struct PoissonFamily {
  double theta;
};

struct GeometricFamily {
  double p;
};

using DiscreteFamily = std::variant<PoissonFamily, GeometricFamily>;

/// Smallest initial segment of the family whose discarded mass is at most
/// eps_tail. Poisson points carry x = 0,1,2,...; geometric points x = 1,2,...
SpacePtr truncate_discrete(const DiscreteFamily& family, double eps_tail);

enum class QuadratureRule { midpoint, trapezoid };

QuadratureRule parse_quadrature_rule(std::string_view name);
std::string_view to_string(QuadratureRule rule);

struct GridSpace {
  SpacePtr space;
  Partition columns;
};

/// Tensor quadrature grid on [0,a]^2 with n nodes per axis. Point index is
/// ix * n + iy; atom ix collects every point of column ix.
GridSpace square_grid(double a, std::size_t n, QuadratureRule rule = QuadratureRule::midpoint);

}  // namespace wct
