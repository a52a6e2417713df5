#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "wct/expr.hpp"
#include "wct/measure.hpp"

namespace wct {

using Complex = std::complex<double>;

/// A complex function tabulated on the points of a measure space.
class MeasurableFunction {
 public:
  MeasurableFunction(SpacePtr space, std::vector<Complex> values);

  static MeasurableFunction constant(SpacePtr space, Complex c);
  static MeasurableFunction from_real(SpacePtr space, std::span<const double> values);
  /// Evaluates `e` at every point (x, y from the coordinates, k the index).
  static MeasurableFunction from_expr(SpacePtr space, const expr::Expr& e);

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return values_.size(); }
  Complex operator[](std::size_t i) const { return values_[i]; }
  std::span<const Complex> values() const noexcept { return values_; }

  /// (sum |f_i|^p mass_i)^(1/p) for finite p >= 1; sup |f_i| for p = inf.
  double p_norm(double p) const;
  double sup_norm() const;

  MeasurableFunction conj() const;
  MeasurableFunction scaled(Complex c) const;

  friend MeasurableFunction operator*(const MeasurableFunction& a, const MeasurableFunction& b);
  friend MeasurableFunction operator+(const MeasurableFunction& a, const MeasurableFunction& b);
  friend MeasurableFunction operator-(const MeasurableFunction& a, const MeasurableFunction& b);

 private:
  SpacePtr space_;
  std::vector<Complex> values_;
};

/// Per-atom average (sum_{i in A} f_i mass_i) / mass(A), compensated.
/// Throws DomainError when f and the partition live on different spaces.
std::vector<Complex> atom_averages(const MeasurableFunction& f, const Partition& part);

/// E(f): constant on every atom, equal to the atom average of f.
MeasurableFunction conditional_expectation(const MeasurableFunction& f, const Partition& part);

/// Spreads per-atom values back onto the points.
MeasurableFunction lift_atom_values(std::span<const Complex> atom_values, const Partition& part);

/// Indices with |f_i| > tol.
std::vector<std::size_t> support(const MeasurableFunction& f, double tol = 0.0);

}  // namespace wct
