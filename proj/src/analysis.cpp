#include "wct/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wct/error.hpp"

namespace wct {

std::string_view to_string(TriState t) {
  switch (t) {
    case TriState::yes:
      return "yes";
    case TriState::no:
      return "no";
    case TriState::marginal:
      return "marginal";
  }
  return "?";
}

TriState ClassificationReport::quasi_contraction_n(std::size_t n) const {
  for (const auto& [k, v] : quasi_contraction) {
    if (k == n) return v;
  }
  throw DomainError("quasi-contraction flag for n = " + std::to_string(n) + " was not requested");
}

bool ClassificationReport::any_marginal() const {
  if (power_bounded == TriState::marginal || stability == TriState::marginal) return true;
  return std::any_of(quasi_contraction.begin(), quasi_contraction.end(),
                     [](const auto& q) { return q.second == TriState::marginal; });
}

const Symbol& symbol(const WctOperator& t) { return t.symbol(); }

std::vector<Complex> essential_range(const Symbol& g, double cluster_tol) {
  if (!(cluster_tol >= 0.0)) throw DomainError("cluster_tol must be >= 0");
  const std::size_t k = g.atom_values.size();
  std::vector<std::size_t> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      if (std::abs(g.atom_values[i] - g.atom_values[j]) <= cluster_tol) parent[find(i)] = find(j);
    }
  }
  std::vector<Complex> weighted(k, Complex{});
  std::vector<double> mass(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t r = find(i);
    weighted[r] += g.atom_values[i] * g.atom_masses[i];
    mass[r] += g.atom_masses[i];
  }
  std::vector<Complex> out;
  for (std::size_t i = 0; i < k; ++i) {
    if (find(i) != i) continue;
    // Clusters of one repeated value keep it bit-exactly.
    bool uniform = true;
    for (std::size_t j = 0; j < k && uniform; ++j) uniform = find(j) != i || g.atom_values[j] == g.atom_values[i];
    out.push_back(uniform ? g.atom_values[i] : weighted[i] / mass[i]);
  }
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

std::vector<Complex> spectrum(const WctOperator& t, double cluster_tol) {
  std::vector<Complex> out = essential_range(t.symbol(), cluster_tol);
  const bool has_zero = std::any_of(out.begin(), out.end(), [](Complex z) { return z == Complex{}; });
  if (!has_zero) {
    out.push_back(Complex{});
    std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
  }
  return out;
}

double spectral_radius(const WctOperator& t) { return t.symbol().sup_abs; }

namespace detail {

ClassificationReport classify_at(const WctOperator& t, const ClassifyOptions& opts, double threshold) {
  if (!(opts.eta >= 0.0)) throw DomainError("tolerance band eta must be >= 0");
  for (std::size_t n : opts.n_list) {
    if (n == 0) throw DomainError("quasi-contraction order n must be >= 1");
  }
  ClassificationReport r;
  r.spectrum = spectrum(t, opts.cluster_tol);
  r.sup_symbol = t.symbol().sup_abs;
  r.spectral_radius = r.sup_symbol;
  r.operator_norm = operator_norm(t);
  r.tolerance_band = opts.eta;
  r.tail_bound = t.space()->tail_bound();

  const double s = r.sup_symbol;
  const bool in_band = opts.eta > 0.0 && std::abs(s - threshold) <= opts.eta;
  if (in_band) {
    r.power_bounded = TriState::marginal;
    r.stability = TriState::marginal;
  } else {
    r.power_bounded = s <= threshold ? TriState::yes : TriState::no;
    r.stability = s < threshold ? TriState::yes : TriState::no;
  }
  for (std::size_t n : opts.n_list) r.quasi_contraction.emplace_back(n, r.power_bounded);

  if (r.stability == TriState::yes) {
    // ||T^n|| <= s^(n-1) ||T|| = (||T|| / s) e^(-n (-ln s)).
    if (s > 0.0) {
      r.exponential = ExponentialConstants{r.operator_norm / s, -std::log(s)};
    } else {
      r.exponential = ExponentialConstants{std::exp(1.0) * r.operator_norm, 1.0};
    }
  }
  return r;
}

}  // namespace detail

ClassificationReport classify(const WctOperator& t, const ClassifyOptions& opts) {
  return detail::classify_at(t, opts, 1.0);
}

}  // namespace wct
