#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "wct/analysis.hpp"
#include "wct/dense.hpp"
#include "wct/operator.hpp"

// Brute-force checks that share nothing with the closed forms except the
// operator's definition: dense eigen-solves, Hermitian PSD tests, direct
// norm-ratio searches and repeated application.
namespace wct::oracle {

inline constexpr std::size_t kOracleCap = 256;

/// All eigenvalues of a dense matrix (N <= 256). Throws OracleError when the
/// solver fails or the worst eigenpair residual exceeds tol * max(1, ||M||).
std::vector<Complex> eigenvalues(const DenseMatrix& m, double tol = 1e-8);
std::vector<Complex> eigenvalues(const Eigen::MatrixXcd& m, double tol = 1e-8);

double spectral_norm(const Eigen::MatrixXcd& m);
double spectral_radius(const Eigen::MatrixXcd& m);

/// Largest singular value of the operator on L^2(mu): || W^1/2 M W^-1/2 ||_2.
double weighted_spectral_norm(const DenseMatrix& m);

struct PsdResult {
  TriState verdict;
  double min_eigenvalue;
  double scale;
};

/// Decides ||T^(n+1) x|| <= ||T^n x|| for all x through the Hermitian form
///   G = M_n^H W M_n - M_(n+1)^H W M_(n+1),  M_k = to_matrix(T)^k.
/// yes if lambda_min(G) >= -tol ||G||, no if below -10 tol ||G||, marginal between.
PsdResult quasi_contraction_psd(const WctOperator& t, std::size_t n, double tol = 1e-9);

/// max ||T^power f||_p / ||f||_p over atom indicators, per-atom Holder-extremal
/// vectors and `iters` seeded random perturbations of the best candidate.
/// T^power is formed by repeated application.
double induced_norm_lower_bound(const WctOperator& t, double p, int iters, std::uint64_t seed = 0,
                                std::size_t power = 1);

struct TraceRow {
  std::size_t n;
  double power_norm;
  double oracle_lower_bound;
  std::optional<double> ratio;
};

/// Closed-form ||T^n|| next to the oracle lower bound for T^n, n = 1..n_max (<= 200).
std::vector<TraceRow> power_growth_trace(const WctOperator& t, std::size_t n_max, int iters = 4,
                                         std::uint64_t seed = 0);

struct SpectrumMatch {
  bool pass;
  double max_error;
  std::size_t nonzero_eigenvalues;
  std::size_t nonzero_atoms;
};

/// Matches the eigenvalues of to_matrix(T) of magnitude > zero_tol one-to-one
/// against the per-atom symbol values (atoms with |E(uw)| <= zero_tol are
/// expected among the near-zero eigenvalues).
SpectrumMatch compare_spectrum(const WctOperator& t, double tol = 1e-8, double zero_tol = 1e-8);

struct CorpusOptions {
  std::size_t min_points = 2;
  std::size_t max_points = 64;
  std::size_t max_atoms = 8;
  bool complex_values = true;
  double p = 2.0;
  /// The symbol is rescaled so sup |E(uw)| is uniform in [scale_lo, scale_hi].
  double scale_lo = 0.3;
  double scale_hi = 1.7;
};

/// One random instance: random masses, random partition, random u and w.
WctOperator random_instance(std::mt19937_64& rng, const CorpusOptions& opts);

MeasurableFunction random_function(std::mt19937_64& rng, const SpacePtr& space, bool complex_values);

}  // namespace wct::oracle
