#include "wct/condexp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wct/error.hpp"
#include "wct/summation.hpp"

namespace wct {

namespace {

void require_same_space(const MeasurableFunction& a, const MeasurableFunction& b) {
  if (a.space() != b.space()) throw DomainError("functions live on different measure spaces");
}

}  // namespace

MeasurableFunction::MeasurableFunction(SpacePtr space, std::vector<Complex> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw DomainError("function without a measure space");
  if (values_.size() != space_->size()) {
    throw DomainError("function has " + std::to_string(values_.size()) + " values but the space has " +
                      std::to_string(space_->size()) + " points");
  }
}

MeasurableFunction MeasurableFunction::constant(SpacePtr space, Complex c) {
  const std::size_t n = space->size();
  return {std::move(space), std::vector<Complex>(n, c)};
}

MeasurableFunction MeasurableFunction::from_real(SpacePtr space, std::span<const double> values) {
  return {std::move(space), std::vector<Complex>(values.begin(), values.end())};
}

MeasurableFunction MeasurableFunction::from_expr(SpacePtr space, const expr::Expr& e) {
  std::vector<Complex> values(space->size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    expr::Point at;
    at.k = static_cast<std::int64_t>(i);
    at.dimension = space->dimension();
    if (at.dimension >= 1) at.x = space->coord(i)[0];
    if (at.dimension >= 2) at.y = space->coord(i)[1];
    values[i] = expr::eval(e, at);
  }
  return {std::move(space), std::move(values)};
}

double MeasurableFunction::sup_norm() const {
  double s = 0.0;
  for (const Complex& z : values_) s = std::max(s, std::abs(z));
  return s;
}

double MeasurableFunction::p_norm(double p) const {
  if (std::isinf(p) && p > 0) return sup_norm();
  if (!(p >= 1.0)) throw DomainError("p-norm needs p >= 1");
  const double scale = sup_norm();
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  CompensatedSum sum;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    sum.add(std::pow(std::abs(values_[i]) / scale, p) * space_->mass(i));
  }
  return scale * std::pow(sum.value(), 1.0 / p);
}

MeasurableFunction MeasurableFunction::conj() const {
  std::vector<Complex> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](Complex z) { return std::conj(z); });
  return {space_, std::move(out)};
}

MeasurableFunction MeasurableFunction::scaled(Complex c) const {
  std::vector<Complex> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [c](Complex z) { return c * z; });
  return {space_, std::move(out)};
}

MeasurableFunction operator*(const MeasurableFunction& a, const MeasurableFunction& b) {
  require_same_space(a, b);
  std::vector<Complex> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return {a.space(), std::move(out)};
}

MeasurableFunction operator+(const MeasurableFunction& a, const MeasurableFunction& b) {
  require_same_space(a, b);
  std::vector<Complex> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return {a.space(), std::move(out)};
}

MeasurableFunction operator-(const MeasurableFunction& a, const MeasurableFunction& b) {
  require_same_space(a, b);
  std::vector<Complex> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return {a.space(), std::move(out)};
}

std::vector<Complex> atom_averages(const MeasurableFunction& f, const Partition& part) {
  if (f.space() != part.space()) throw DomainError("function and partition live on different measure spaces");
  const MeasureSpace& space = *part.space();
  std::vector<Complex> averages(part.atom_count());
  for (std::size_t a = 0; a < part.atom_count(); ++a) {
    CompensatedComplexSum sum;
    for (std::size_t i : part.atom(a)) sum.add(f[i] * space.mass(i));
    averages[a] = sum.value() / part.atom_mass(a);
  }
  return averages;
}

MeasurableFunction lift_atom_values(std::span<const Complex> atom_values, const Partition& part) {
  if (atom_values.size() != part.atom_count()) throw DomainError("one value per atom expected");
  std::vector<Complex> values(part.space()->size());
  for (std::size_t a = 0; a < part.atom_count(); ++a) {
    for (std::size_t i : part.atom(a)) values[i] = atom_values[a];
  }
  return {part.space(), std::move(values)};
}

MeasurableFunction conditional_expectation(const MeasurableFunction& f, const Partition& part) {
  return lift_atom_values(atom_averages(f, part), part);
}

std::vector<std::size_t> support(const MeasurableFunction& f, double tol) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) > tol) out.push_back(i);
  }
  return out;
}

}  // namespace wct
