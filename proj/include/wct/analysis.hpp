#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "wct/operator.hpp"

namespace wct {

enum class TriState { yes, no, marginal };

std::string_view to_string(TriState t);

/// Default width of the band around |E(uw)| = 1 inside which no side is certified.
inline constexpr double kDefaultEta = 1e-9;

struct ExponentialConstants {
  double m;
  double epsilon;
};

/// Classification of a WCT operator. Convergence and the three stability
/// notions coincide for these operators, so one value backs all four names.
struct ClassificationReport {
  std::vector<Complex> spectrum;
  double spectral_radius = 0.0;
  double sup_symbol = 0.0;
  double operator_norm = 0.0;
  TriState power_bounded = TriState::no;
  std::vector<std::pair<std::size_t, TriState>> quasi_contraction;
  TriState stability = TriState::no;
  std::optional<ExponentialConstants> exponential;
  double tolerance_band = kDefaultEta;
  double tail_bound = 0.0;

  TriState convergent() const { return stability; }
  TriState uniformly_stable() const { return stability; }
  TriState strongly_stable() const { return stability; }
  TriState weakly_stable() const { return stability; }
  TriState uniformly_exponentially_stable() const { return stability; }
  TriState quasi_contraction_n(std::size_t n) const;
  bool any_marginal() const;
};

struct ClassifyOptions {
  double eta = kDefaultEta;
  std::vector<std::size_t> n_list{1};
  double cluster_tol = 0.0;
};

const Symbol& symbol(const WctOperator& t);
const Symbol& symbol(const WctOperator&& t) = delete;

/// Distinct per-atom symbol values; values within cluster_tol of each other
/// (transitively) merge to their atom-mass-weighted centroid. Sorted by
/// (real, imag).
std::vector<Complex> essential_range(const Symbol& g, double cluster_tol = 0.0);

/// essential_range(symbol(T)) together with 0.
std::vector<Complex> spectrum(const WctOperator& t, double cluster_tol = 0.0);

/// max |E(uw)| over the atoms.
double spectral_radius(const WctOperator& t);

ClassificationReport classify(const WctOperator& t, const ClassifyOptions& opts = {});

namespace detail {
/// classify() with the unit-circle threshold replaced by `threshold`; used by
/// the verification harness self-test.
ClassificationReport classify_at(const WctOperator& t, const ClassifyOptions& opts, double threshold);
}  // namespace detail

}  // namespace wct
