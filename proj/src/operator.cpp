#include "wct/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wct/error.hpp"
#include "wct/summation.hpp"

namespace wct {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Complex symbol_power(Complex g, std::size_t e) {
  if (e == 0) return {1.0, 0.0};
  if (e > 64) {
    const double mag = std::abs(g);
    if (mag == 0.0) return {0.0, 0.0};
    const double ed = static_cast<double>(e);
    if (g.imag() == 0.0) {
      const double m = std::pow(mag, ed);
      return {(g.real() < 0.0 && (e % 2 == 1)) ? -m : m, 0.0};
    }
    return std::polar(std::pow(mag, ed), std::remainder(ed * std::arg(g), 2.0 * std::numbers::pi));
  }
  Complex acc{1.0, 0.0};
  Complex base = g;
  while (e) {
    if (e & 1U) acc *= base;
    base *= base;
    e >>= 1U;
  }
  return acc;
}

}  // namespace

double atom_power_mean(const MeasurableFunction& f, const Partition& part, std::size_t a, double q) {
  double peak = 0.0;
  for (std::size_t i : part.atom(a)) peak = std::max(peak, std::abs(f[i]));
  if (std::isinf(q)) return peak;
  if (peak == 0.0) return 0.0;
  const MeasureSpace& space = *part.space();
  CompensatedSum sum;
  for (std::size_t i : part.atom(a)) sum.add(std::pow(std::abs(f[i]) / peak, q) * space.mass(i));
  return peak * std::pow(sum.value() / part.atom_mass(a), 1.0 / q);
}

WctOperator::WctOperator(MeasurableFunction u, MeasurableFunction w, Partition partition, double p)
    : u_(std::move(u)),
      w_(std::move(w)),
      partition_(std::move(partition)),
      p_(p),
      p_conj_(0.0),
      symbol_{MeasurableFunction::constant(partition_.space(), 0.0), {}, {}, 0.0} {
  if (!(p_ >= 1.0) || std::isinf(p_)) throw DomainError("exponent p must lie in [1, inf)");
  if (u_.space() != partition_.space() || w_.space() != partition_.space()) {
    throw DomainError("u, w and the partition must share one measure space");
  }
  p_conj_ = (p_ == 1.0) ? kInf : p_ / (p_ - 1.0);

  std::vector<Complex> values = atom_averages(u_ * w_, partition_);
  double sup_abs = 0.0;
  for (const Complex& v : values) sup_abs = std::max(sup_abs, std::abs(v));
  std::vector<double> masses(partition_.atom_count());
  for (std::size_t a = 0; a < masses.size(); ++a) masses[a] = partition_.atom_mass(a);
  symbol_ = Symbol{lift_atom_values(values, partition_), std::move(values), std::move(masses), sup_abs};

  bounds_.resize(partition_.atom_count());
  for (std::size_t a = 0; a < bounds_.size(); ++a) {
    bounds_[a] = atom_power_mean(w_, partition_, a, p_) * atom_power_mean(u_, partition_, a, p_conj_);
  }
}

MeasurableFunction apply(const WctOperator& t, const MeasurableFunction& f) {
  if (f.space() != t.space()) throw DomainError("function is not aligned with the operator's space");
  return t.w() * conditional_expectation(t.u() * f, t.partition());
}

MeasurableFunction power_apply(const WctOperator& t, std::size_t n, const MeasurableFunction& f) {
  if (n == 0) throw DomainError("power_apply needs n >= 1");
  const MeasurableFunction tf = apply(t, f);
  if (n == 1) return tf;
  std::vector<Complex> factors(t.partition().atom_count());
  for (std::size_t a = 0; a < factors.size(); ++a) factors[a] = symbol_power(t.symbol().atom_values[a], n - 1);
  return lift_atom_values(factors, t.partition()) * tf;
}

WctOperator adjoint(const WctOperator& t) {
  if (t.p() != 2.0) throw UnsupportedExponentError("adjoint is only defined for p = 2");
  return WctOperator(t.w().conj(), t.u().conj(), t.partition(), 2.0);
}

double operator_norm(const WctOperator& t) {
  const auto b = t.atom_bounds();
  return b.empty() ? 0.0 : *std::max_element(b.begin(), b.end());
}

double log_power_norm(const WctOperator& t, std::size_t n) {
  if (n == 0) throw DomainError("power_norm needs n >= 1");
  double best = -kInf;
  const auto& g = t.symbol().atom_values;
  const auto b = t.atom_bounds();
  for (std::size_t a = 0; a < b.size(); ++a) {
    if (b[a] == 0.0) continue;
    const double mag = std::abs(g[a]);
    if (n > 1 && mag == 0.0) continue;
    const double lg = (n == 1) ? 0.0 : static_cast<double>(n - 1) * std::log(mag);
    best = std::max(best, lg + std::log(b[a]));
  }
  return best;
}

double power_norm(const WctOperator& t, std::size_t n) {
  if (n == 0) throw DomainError("power_norm needs n >= 1");
  double best = 0.0;
  const auto& g = t.symbol().atom_values;
  const auto b = t.atom_bounds();
  for (std::size_t a = 0; a < b.size(); ++a) {
    best = std::max(best, std::pow(std::abs(g[a]), static_cast<double>(n - 1)) * b[a]);
  }
  return best;
}

DenseMatrix to_matrix(const WctOperator& t, std::size_t cap) {
  const MeasureSpace& space = *t.space();
  const std::size_t n = space.size();
  if (n > cap) {
    throw SizeError("dense realization needs N <= " + std::to_string(cap) + ", got " + std::to_string(n));
  }
  const auto dim = static_cast<Eigen::Index>(n);
  DenseMatrix m{Eigen::MatrixXcd::Zero(dim, dim), Eigen::VectorXd(dim)};
  for (std::size_t i = 0; i < n; ++i) m.mass(static_cast<Eigen::Index>(i)) = space.mass(i);
  const Partition& part = t.partition();
  for (std::size_t a = 0; a < part.atom_count(); ++a) {
    const double am = part.atom_mass(a);
    for (std::size_t i : part.atom(a)) {
      for (std::size_t j : part.atom(a)) {
        m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            t.w()[i] * t.u()[j] * (space.mass(j) / am);
      }
    }
  }
  return m;
}

}  // namespace wct
