#include "wct/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wct/error.hpp"
#include "wct/summation.hpp"

namespace wct {

namespace {

constexpr std::size_t kMaxTruncatedPoints = 10'000'000;

double compensated_total(std::span<const double> values) {
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  return sum.value();
}

}  // namespace

MeasureSpace::MeasureSpace(std::vector<double> masses, int dimension, std::vector<Coord> coords,
                           double tail_bound)
    : masses_(std::move(masses)),
      dimension_(dimension),
      coords_(std::move(coords)),
      tail_bound_(tail_bound),
      total_mass_(0.0) {
  if (masses_.empty()) throw DomainError("measure space needs at least one point");
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    const double m = masses_[i];
    if (!std::isfinite(m) || !(m > 0.0)) {
      throw DomainError("mass of point " + std::to_string(i) + " must be positive and finite");
    }
  }
  if (dimension_ < 0 || dimension_ > 2) throw DomainError("coordinate dimension must be 0, 1 or 2");
  if (dimension_ == 0 && !coords_.empty()) throw DomainError("coordinates given for a 0-dimensional space");
  if (dimension_ > 0 && coords_.size() != masses_.size()) {
    throw DomainError("expected one coordinate per point");
  }
  if (!std::isfinite(tail_bound_) || tail_bound_ < 0.0) throw DomainError("tail_bound must be >= 0");
  total_mass_ = compensated_total(masses_);
}

double atom_mass(const MeasureSpace& space, std::span<const std::size_t> atom) {
  if (atom.empty()) throw DomainError("empty atom");
  CompensatedSum sum;
  for (std::size_t i : atom) {
    if (i >= space.size()) throw DomainError("atom index " + std::to_string(i) + " outside the space");
    sum.add(space.mass(i));
  }
  return sum.value();
}

Partition::Partition(SpacePtr space, std::vector<std::vector<std::size_t>> atoms)
    : space_(std::move(space)), atoms_(std::move(atoms)) {
  if (!space_) throw DomainError("partition without a space");
  constexpr auto unset = static_cast<std::size_t>(-1);
  atom_of_.assign(space_->size(), unset);
  atom_mass_.reserve(atoms_.size());
  for (std::size_t a = 0; a < atoms_.size(); ++a) {
    if (atoms_[a].empty()) throw DomainError("atom " + std::to_string(a) + " is empty");
    for (std::size_t i : atoms_[a]) {
      if (i >= space_->size()) {
        throw DomainError("atom " + std::to_string(a) + " references point " + std::to_string(i) +
                          " outside the space");
      }
      if (atom_of_[i] != unset) {
        throw DomainError("point " + std::to_string(i) + " belongs to more than one atom");
      }
      atom_of_[i] = a;
    }
    atom_mass_.push_back(wct::atom_mass(*space_, atoms_[a]));
  }
  const auto missing = std::find(atom_of_.begin(), atom_of_.end(), unset);
  if (missing != atom_of_.end()) {
    throw DomainError("point " + std::to_string(missing - atom_of_.begin()) + " is not covered by any atom");
  }
}

Partition Partition::whole(SpacePtr space) {
  std::vector<std::size_t> all(space->size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return Partition(std::move(space), {std::move(all)});
}

Partition Partition::singletons(SpacePtr space) {
  std::vector<std::vector<std::size_t>> atoms(space->size());
  for (std::size_t i = 0; i < atoms.size(); ++i) atoms[i] = {i};
  return Partition(std::move(space), std::move(atoms));
}

std::span<const std::size_t> Partition::atom(std::size_t a) const {
  if (a >= atoms_.size()) throw DomainError("unknown atom id " + std::to_string(a));
  return atoms_[a];
}

double Partition::atom_mass(std::size_t a) const {
  if (a >= atoms_.size()) throw DomainError("unknown atom id " + std::to_string(a));
  return atom_mass_[a];
}

namespace {

SpacePtr truncate(const PoissonFamily& fam, double eps_tail) {
  const double theta = fam.theta;
  if (!std::isfinite(theta) || theta < 0.0) throw DomainError("poisson theta must be >= 0");
  if (theta == 0.0) {
    return std::make_shared<const MeasureSpace>(std::vector<double>{1.0}, 1, std::vector<Coord>{{0.0, 0.0}}, 0.0);
  }
  // Tabulate far enough that the remaining terms are below double resolution,
  // then form suffix sums from the top so the tail never suffers cancellation.
  std::vector<double> terms;
  const double log_theta = std::log(theta);
  for (std::size_t x = 0;; ++x) {
    const double xd = static_cast<double>(x);
    const double term = std::exp(-theta + xd * log_theta - std::lgamma(xd + 1.0));
    terms.push_back(term);
    if (xd > theta && term < 1e-30 * eps_tail) break;
    if (terms.size() > kMaxTruncatedPoints) throw DomainError("poisson truncation exceeds the point limit");
  }
  std::vector<double> suffix(terms.size() + 1, 0.0);
  {
    CompensatedSum sum;
    for (std::size_t x = terms.size(); x-- > 0;) {
      sum.add(terms[x]);
      suffix[x] = sum.value();
    }
  }
  std::size_t n = 1;
  while (suffix[n] > eps_tail) ++n;
  std::vector<double> masses(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<Coord> coords(n);
  for (std::size_t x = 0; x < n; ++x) coords[x] = {static_cast<double>(x), 0.0};
  return std::make_shared<const MeasureSpace>(std::move(masses), 1, std::move(coords), suffix[n]);
}

SpacePtr truncate(const GeometricFamily& fam, double eps_tail) {
  const double p = fam.p;
  if (!(p > 0.0 && p < 1.0)) throw DomainError("geometric p must lie in (0, 1)");
  const double q = 1.0 - p;
  // The tail after N points is exactly q^N.
  std::size_t n = 1;
  while (std::pow(q, static_cast<double>(n)) > eps_tail) {
    if (++n > kMaxTruncatedPoints) throw DomainError("geometric truncation exceeds the point limit");
  }
  std::vector<double> masses(n);
  std::vector<Coord> coords(n);
  for (std::size_t i = 0; i < n; ++i) {
    masses[i] = p * std::pow(q, static_cast<double>(i));
    coords[i] = {static_cast<double>(i + 1), 0.0};
  }
  return std::make_shared<const MeasureSpace>(std::move(masses), 1, std::move(coords),
                                              std::pow(q, static_cast<double>(n)));
}

}  // namespace

SpacePtr truncate_discrete(const DiscreteFamily& family, double eps_tail) {
  if (!(eps_tail > 0.0 && eps_tail < 1.0)) throw DomainError("eps_tail must lie in (0, 1)");
  return std::visit([eps_tail](const auto& fam) { return truncate(fam, eps_tail); }, family);
}

QuadratureRule parse_quadrature_rule(std::string_view name) {
  if (name == "midpoint") return QuadratureRule::midpoint;
  if (name == "trapezoid") return QuadratureRule::trapezoid;
  throw DomainError("unknown quadrature rule '" + std::string(name) + "'");
}

std::string_view to_string(QuadratureRule rule) {
  return rule == QuadratureRule::midpoint ? "midpoint" : "trapezoid";
}

GridSpace square_grid(double a, std::size_t n, QuadratureRule rule) {
  if (!std::isfinite(a) || !(a > 0.0)) throw DomainError("grid side a must be positive");
  if (n < 2) throw DomainError("grid needs at least 2 nodes per axis");

  std::vector<double> nodes(n), weights(n);
  if (rule == QuadratureRule::midpoint) {
    const double h = a / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      nodes[i] = (static_cast<double>(i) + 0.5) * h;
      weights[i] = h;
    }
  } else {
    const double h = a / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      nodes[i] = static_cast<double>(i) * h;
      weights[i] = (i == 0 || i + 1 == n) ? 0.5 * h : h;
    }
    nodes[n - 1] = a;
  }

  std::vector<double> masses(n * n);
  std::vector<Coord> coords(n * n);
  std::vector<std::vector<std::size_t>> columns(n);
  for (std::size_t ix = 0; ix < n; ++ix) {
    columns[ix].reserve(n);
    for (std::size_t iy = 0; iy < n; ++iy) {
      const std::size_t k = ix * n + iy;
      masses[k] = weights[ix] * weights[iy];
      coords[k] = {nodes[ix], nodes[iy]};
      columns[ix].push_back(k);
    }
  }
  auto space = std::make_shared<const MeasureSpace>(std::move(masses), 2, std::move(coords), 0.0);
  Partition part(space, std::move(columns));
  return {std::move(space), std::move(part)};
}

}  // namespace wct
