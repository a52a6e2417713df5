#include "wct/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wct/error.hpp"

namespace wct::oracle {

namespace {

void require_cap(Eigen::Index n) {
  if (n > static_cast<Eigen::Index>(kOracleCap)) {
    throw SizeError("oracle needs N <= " + std::to_string(kOracleCap) + ", got " + std::to_string(n));
  }
}

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& g) { return 0.5 * (g + g.adjoint()); }

double norm_ratio(const MeasurableFunction& tf, const MeasurableFunction& f, double p) {
  const double denom = f.p_norm(p);
  if (denom == 0.0) return 0.0;
  return tf.p_norm(p) / denom;
}

MeasurableFunction repeated_apply(const WctOperator& t, MeasurableFunction f, std::size_t times) {
  for (std::size_t k = 0; k < times; ++k) f = apply(t, f);
  return f;
}

Complex unit_phase_conj(Complex z) {
  const double r = std::abs(z);
  return r == 0.0 ? Complex{} : std::conj(z) / r;
}

}  // namespace

std::vector<Complex> eigenvalues(const Eigen::MatrixXcd& m, double tol) {
  require_cap(m.rows());
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, true);
  if (solver.info() != Eigen::Success) throw OracleError("dense eigen-solver did not converge");
  const Eigen::VectorXcd& vals = solver.eigenvalues();
  const Eigen::MatrixXcd& vecs = solver.eigenvectors();
  const double scale = std::max(1.0, m.norm());
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    const double vn = vecs.col(k).norm();
    if (vn == 0.0) continue;
    const double residual = (m * vecs.col(k) - vals(k) * vecs.col(k)).norm() / vn;
    if (!(residual <= tol * scale)) {
      throw OracleError("eigenpair residual " + std::to_string(residual) + " exceeds tolerance");
    }
  }
  return {vals.data(), vals.data() + vals.size()};
}

std::vector<Complex> eigenvalues(const DenseMatrix& m, double tol) { return eigenvalues(m.entries, tol); }

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

double spectral_radius(const Eigen::MatrixXcd& m) {
  double r = 0.0;
  for (const Complex& z : eigenvalues(m)) r = std::max(r, std::abs(z));
  return r;
}

double weighted_spectral_norm(const DenseMatrix& m) {
  require_cap(m.dim());
  const Eigen::VectorXd root = m.mass.cwiseSqrt();
  const Eigen::MatrixXcd scaled = root.cast<Complex>().asDiagonal() * m.entries *
                                  root.cwiseInverse().cast<Complex>().asDiagonal();
  return spectral_norm(scaled);
}

PsdResult quasi_contraction_psd(const WctOperator& t, std::size_t n, double tol) {
  if (t.p() != 2.0) throw UnsupportedExponentError("quasi-contraction oracle needs p = 2");
  if (n == 0) throw DomainError("quasi-contraction order n must be >= 1");
  const DenseMatrix m = to_matrix(t, kOracleCap);
  Eigen::MatrixXcd mn = m.entries;
  for (std::size_t k = 1; k < n; ++k) mn = mn * m.entries;
  const Eigen::MatrixXcd mn1 = mn * m.entries;
  const Eigen::VectorXcd w = m.mass.cast<Complex>();
  const Eigen::MatrixXcd g =
      hermitian_part(mn.adjoint() * w.asDiagonal() * mn - mn1.adjoint() * w.asDiagonal() * mn1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(g, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw OracleError("Hermitian eigen-solver did not converge");
  const Eigen::VectorXd& vals = solver.eigenvalues();
  const double lo = vals.minCoeff();
  const double scale = std::max(std::abs(lo), std::abs(vals.maxCoeff()));

  TriState verdict = TriState::yes;
  if (lo < -10.0 * tol * scale) {
    verdict = TriState::no;
  } else if (lo < -tol * scale) {
    verdict = TriState::marginal;
  }
  return {verdict, lo, scale};
}

double induced_norm_lower_bound(const WctOperator& t, double p, int iters, std::uint64_t seed,
                                std::size_t power) {
  if (iters < 1) throw DomainError("iters must be >= 1");
  if (power == 0) throw DomainError("power must be >= 1");
  if (!(p >= 1.0) || std::isinf(p)) throw DomainError("exponent p must lie in [1, inf)");
  const SpacePtr& space = t.space();
  const Partition& part = t.partition();
  const std::size_t n = space->size();

  double best = 0.0;
  std::vector<Complex> best_f(n, Complex{});
  auto consider = [&](std::vector<Complex> values) {
    MeasurableFunction f(space, values);
    const double r = norm_ratio(repeated_apply(t, f, power), f, p);
    if (r > best) {
      best = r;
      best_f = std::move(values);
    }
  };

  for (std::size_t a = 0; a < part.atom_count(); ++a) {
    std::vector<Complex> indicator(n, Complex{});
    for (std::size_t i : part.atom(a)) indicator[i] = 1.0;
    consider(indicator);

    // Equality case of Holder's inequality on the atom.
    std::vector<Complex> extremal(n, Complex{});
    if (p == 1.0) {
      std::size_t arg = part.atom(a).front();
      for (std::size_t i : part.atom(a)) {
        if (std::abs(t.u()[i]) > std::abs(t.u()[arg])) arg = i;
      }
      extremal[arg] = unit_phase_conj(t.u()[arg]);
    } else {
      const double expo = 1.0 / (p - 1.0);
      for (std::size_t i : part.atom(a)) {
        extremal[i] = std::pow(std::abs(t.u()[i]), expo) * unit_phase_conj(t.u()[i]);
      }
    }
    consider(extremal);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double step = 0.5;
  for (int it = 0; it < iters; ++it) {
    double base_scale = 0.0;
    for (const Complex& z : best_f) base_scale = std::max(base_scale, std::abs(z));
    if (base_scale == 0.0) base_scale = 1.0;
    std::vector<Complex> trial(best_f);
    for (Complex& z : trial) z += step * base_scale * Complex{normal(rng), normal(rng)};
    consider(std::move(trial));
    step = std::max(step * 0.7, 1e-6);
  }
  return best;
}

std::vector<TraceRow> power_growth_trace(const WctOperator& t, std::size_t n_max, int iters, std::uint64_t seed) {
  if (n_max < 1 || n_max > 200) throw DomainError("n_max must lie in [1, 200]");
  const double p = t.p();
  const SpacePtr& space = t.space();
  const Partition& part = t.partition();
  const std::size_t n = space->size();

  // Candidate set: atom indicators, per-atom Holder-extremal vectors and a few
  // random vectors; each is pushed through T once per step.
  std::vector<MeasurableFunction> inputs;
  for (std::size_t a = 0; a < part.atom_count(); ++a) {
    std::vector<Complex> indicator(n, Complex{});
    std::vector<Complex> extremal(n, Complex{});
    for (std::size_t i : part.atom(a)) {
      indicator[i] = 1.0;
      extremal[i] = (p == 1.0 ? 1.0 : std::pow(std::abs(t.u()[i]), 1.0 / (p - 1.0))) * unit_phase_conj(t.u()[i]);
    }
    if (p == 1.0) {
      std::size_t arg = part.atom(a).front();
      for (std::size_t i : part.atom(a)) {
        if (std::abs(t.u()[i]) > std::abs(t.u()[arg])) arg = i;
      }
      for (std::size_t i : part.atom(a)) {
        if (i != arg) extremal[i] = Complex{};
      }
    }
    inputs.emplace_back(space, std::move(indicator));
    inputs.emplace_back(space, std::move(extremal));
  }
  std::mt19937_64 rng(seed);
  for (int it = 0; it < iters; ++it) inputs.push_back(random_function(rng, space, true));

  std::vector<double> input_norms;
  std::vector<MeasurableFunction> iterates;
  for (const MeasurableFunction& f : inputs) {
    input_norms.push_back(f.p_norm(p));
    iterates.push_back(f);
  }

  std::vector<TraceRow> rows;
  rows.reserve(n_max);
  for (std::size_t k = 1; k <= n_max; ++k) {
    double best = 0.0;
    for (std::size_t c = 0; c < iterates.size(); ++c) {
      iterates[c] = apply(t, iterates[c]);
      if (input_norms[c] > 0.0) best = std::max(best, iterates[c].p_norm(p) / input_norms[c]);
    }
    TraceRow row{k, power_norm(t, k), best, std::nullopt};
    if (k > 1 && rows.back().power_norm != 0.0) row.ratio = row.power_norm / rows.back().power_norm;
    rows.push_back(row);
  }
  return rows;
}

SpectrumMatch compare_spectrum(const WctOperator& t, double tol, double zero_tol) {
  const std::vector<Complex> eigs = eigenvalues(to_matrix(t, kOracleCap));
  std::vector<Complex> targets;
  for (const Complex& g : t.symbol().atom_values) {
    if (std::abs(g) > zero_tol) targets.push_back(g);
  }
  std::sort(targets.begin(), targets.end(), [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });

  std::vector<bool> used(eigs.size(), false);
  SpectrumMatch result{true, 0.0, 0, targets.size()};
  for (const Complex& g : targets) {
    std::size_t best = eigs.size();
    for (std::size_t k = 0; k < eigs.size(); ++k) {
      if (!used[k] && (best == eigs.size() || std::abs(eigs[k] - g) < std::abs(eigs[best] - g))) best = k;
    }
    if (best == eigs.size()) {
      result.pass = false;
      continue;
    }
    used[best] = true;
    result.max_error = std::max(result.max_error, std::abs(eigs[best] - g));
  }
  for (std::size_t k = 0; k < eigs.size(); ++k) {
    if (std::abs(eigs[k]) > zero_tol) ++result.nonzero_eigenvalues;
    if (!used[k] && std::abs(eigs[k]) > zero_tol + tol) result.pass = false;
  }
  if (result.max_error > tol) result.pass = false;
  return result;
}

MeasurableFunction random_function(std::mt19937_64& rng, const SpacePtr& space, bool complex_values) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> values(space->size());
  for (Complex& z : values) z = complex_values ? Complex{normal(rng), normal(rng)} : Complex{normal(rng), 0.0};
  return {space, std::move(values)};
}

WctOperator random_instance(std::mt19937_64& rng, const CorpusOptions& opts) {
  if (opts.min_points < 1 || opts.max_points < opts.min_points) throw DomainError("bad corpus point range");
  std::uniform_int_distribution<std::size_t> size_dist(opts.min_points, opts.max_points);
  const std::size_t n = size_dist(rng);
  std::uniform_int_distribution<std::size_t> atom_dist(1, std::max<std::size_t>(1, std::min(opts.max_atoms, n)));
  const std::size_t k = atom_dist(rng);

  std::uniform_real_distribution<double> mass_dist(0.05, 2.0);
  std::vector<double> masses(n);
  for (double& m : masses) m = mass_dist(rng);
  auto space = std::make_shared<const MeasureSpace>(std::move(masses));

  // Every atom gets one point from a shuffled prefix, the rest land anywhere.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> atoms(k);
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  for (std::size_t idx = 0; idx < n; ++idx) atoms[idx < k ? idx : pick(rng)].push_back(order[idx]);
  for (auto& atom : atoms) std::sort(atom.begin(), atom.end());
  Partition part(space, std::move(atoms));

  MeasurableFunction u = random_function(rng, space, opts.complex_values);
  MeasurableFunction w = random_function(rng, space, opts.complex_values);
  const WctOperator probe(u, w, part, opts.p);
  const double s = probe.symbol().sup_abs;
  std::uniform_real_distribution<double> target(opts.scale_lo, opts.scale_hi);
  const double goal = target(rng);
  if (s > 0.0) w = w.scaled(goal / s);
  return WctOperator(std::move(u), std::move(w), std::move(part), opts.p);
}

}  // namespace wct::oracle
