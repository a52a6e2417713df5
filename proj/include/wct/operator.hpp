#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wct/condexp.hpp"
#include "wct/dense.hpp"
#include "wct/measure.hpp"

namespace wct {

/// The atom-constant function E(uw) that governs every power of T.
struct Symbol {
  MeasurableFunction g;
  std::vector<Complex> atom_values;
  std::vector<double> atom_masses;
  double sup_abs;
};

/// T = M_w E M_u on L^p(mu), f -> w E(u f).
///
/// Construction precomputes the symbol E(uw) and, per atom, the bound
///   B = (E|w|^p)^(1/p) (E|u|^p')^(1/p'),
/// which is the exact norm of T restricted to that atom.
class WctOperator {
 public:
  WctOperator(MeasurableFunction u, MeasurableFunction w, Partition partition, double p = 2.0);

  const MeasurableFunction& u() const noexcept { return u_; }
  const MeasurableFunction& w() const noexcept { return w_; }
  const Partition& partition() const noexcept { return partition_; }
  const SpacePtr& space() const noexcept { return partition_.space(); }
  double p() const noexcept { return p_; }
  /// Conjugate exponent; +inf when p = 1.
  double p_conj() const noexcept { return p_conj_; }

  const Symbol& symbol() const& noexcept { return symbol_; }
  const Symbol& symbol() const&& = delete;
  std::span<const double> atom_bounds() const noexcept { return bounds_; }

 private:
  MeasurableFunction u_;
  MeasurableFunction w_;
  Partition partition_;
  double p_;
  double p_conj_;
  Symbol symbol_;
  std::vector<double> bounds_;
};

/// (E|f|^q)^(1/q) on atom `a`; for q = inf, the max of |f| over the atom.
double atom_power_mean(const MeasurableFunction& f, const Partition& part, std::size_t a, double q);

MeasurableFunction apply(const WctOperator& t, const MeasurableFunction& f);

/// T^n f computed as E(uw)^(n-1) T f. For n > 64 the symbol power is formed
/// in magnitude/phase form. Throws DomainError for n = 0.
MeasurableFunction power_apply(const WctOperator& t, std::size_t n, const MeasurableFunction& f);

/// T* = M_conj(u) E M_conj(w); only defined on L^2.
WctOperator adjoint(const WctOperator& t);

/// ||T|| = max over atoms of B.
double operator_norm(const WctOperator& t);

/// ||T^n|| = max over atoms of |E(uw)|^(n-1) B. May overflow to +inf for
/// growing symbols; log_power_norm stays finite.
double power_norm(const WctOperator& t, std::size_t n);
double log_power_norm(const WctOperator& t, std::size_t n);

inline constexpr std::size_t kDefaultMatrixCap = 256;

/// M[i][j] = w_i u_j mass_j / mass(atom(i)) when i, j share an atom, else 0.
/// Throws SizeError when the space has more than `cap` points.
DenseMatrix to_matrix(const WctOperator& t, std::size_t cap = kDefaultMatrixCap);

}  // namespace wct
