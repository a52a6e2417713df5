#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_support.hpp"
#include "wct/analysis.hpp"
#include "wct/error.hpp"
#include "wct/examples.hpp"
#include "wct/oracle.hpp"

using namespace wct;

namespace {

/// Operator on `atoms` equal-mass two-point atoms with u = 1 and w equal to
/// the given symbol value on each atom.
WctOperator atomwise(const std::vector<Complex>& values) {
  const std::size_t k = values.size();
  auto s = std::make_shared<const MeasureSpace>(std::vector<double>(2 * k, 0.5));
  std::vector<std::vector<std::size_t>> atoms;
  std::vector<Complex> w;
  for (std::size_t a = 0; a < k; ++a) {
    atoms.push_back({2 * a, 2 * a + 1});
    w.push_back(values[a]);
    w.push_back(values[a]);
  }
  return WctOperator(MeasurableFunction::constant(s, 1.0), MeasurableFunction(s, w), Partition(s, atoms));
}

std::vector<Complex> range_of(const std::vector<Complex>& values, double cluster_tol = 0.0) {
  const WctOperator t = atomwise(values);
  return essential_range(symbol(t), cluster_tol);
}

bool contains(const std::vector<Complex>& set, Complex z, double tol = 1e-12) {
  return std::any_of(set.begin(), set.end(), [&](Complex v) { return std::abs(v - z) <= tol; });
}

// e(e - 1) from mpmath: 4.6707742704716...
constexpr double kSquareRadius = 4.6707742704716;

}  // namespace

TEST_CASE("symbol") {
  std::mt19937_64 rng(1);
  const SpacePtr s = testing::random_space(rng, 11);
  const WctOperator t(MeasurableFunction::constant(s, 1.0), MeasurableFunction::constant(s, 1.0),
                      testing::random_partition(rng, s, 4));
  for (Complex v : symbol(t).atom_values) CHECK(v == Complex{1.0, 0.0});
  CHECK(symbol(t).sup_abs == 1.0);

  SUBCASE("real inputs give exactly real symbols") {
    const auto inst = examples::build_example_c(1.0, expr::parse("exp(x+y)"), expr::parse("1"), 16);
    const WctOperator t2 = inst.op();
    for (Complex v : symbol(t2).atom_values) CHECK(v.imag() == 0.0);
  }
}

TEST_CASE("essential_range and spectrum") {
  CHECK(range_of({0.7, 0.7, 0.7}) == std::vector<Complex>{0.7});
  CHECK(range_of({2.0, 0.5}) == std::vector<Complex>{0.5, 2.0});

  SUBCASE("clustering merges to the mass-weighted centroid") {
    const auto r = range_of({1.0, 1.0 + 1e-12, 3.0}, 1e-9);
    REQUIRE(r.size() == 2);
    CHECK(std::abs(r[0] - Complex{1.0 + 0.5e-12, 0.0}) <= 1e-15);
    CHECK_THROWS_AS(range_of({1.0}, -1.0), DomainError);
  }
  SUBCASE("zero operator") {
    const auto s = std::make_shared<const MeasureSpace>(std::vector<double>{1.0, 2.0});
    const WctOperator t(MeasurableFunction::constant(s, 1.0), MeasurableFunction::constant(s, 0.0),
                        Partition::singletons(s));
    CHECK(spectrum(t) == std::vector<Complex>{0.0});
    CHECK(spectral_radius(t) == 0.0);
  }
  SUBCASE("Poisson family with u = x") {
    const auto inst = examples::build_example_a(1.0, expr::parse("x"), expr::parse("1"), 1e-15);
    const auto sp = spectrum(inst.op());
    REQUIRE(sp.size() == 3);
    CHECK(contains(sp, 0.0));
    // coth(1) and sinh(1)/(cosh(1) - 1) from mpmath.
    CHECK(contains(sp, 1.31303528549933, 1e-12));
    CHECK(contains(sp, 2.16395341373865, 1e-12));
  }
  SUBCASE("0 is always included; radius is max |lambda|") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
      const WctOperator t = oracle::random_instance(rng, {});
      const auto sp = spectrum(t);
      CHECK(contains(sp, 0.0, 0.0));
      double mx = 0.0;
      for (Complex z : sp) mx = std::max(mx, std::abs(z));
      CHECK(spectral_radius(t) == mx);
      // Spectrum minus 0 is exactly the set of atom values.
      for (Complex v : symbol(t).atom_values) CHECK(contains(sp, v, 0.0));
      for (Complex z : sp)
        if (z != Complex{}) CHECK(contains(symbol(t).atom_values, z, 0.0));
    }
  }
}

TEST_CASE("spectral_radius on the unit square refines to e(e - 1)") {
  const auto inst = examples::build_example_c(1.0, expr::parse("exp(x+y)"), expr::parse("1"), 256,
                                              QuadratureRule::trapezoid);
  CHECK(std::abs(spectral_radius(inst.op()) - kSquareRadius) <= 1e-3);
  CHECK(spectral_radius(atomwise({0.9, -0.3})) == 0.9);
}

TEST_CASE("classify") {
  SUBCASE("symbol 0.9") {
    const WctOperator t = atomwise({0.9, Complex{0.0, 0.5}});
    ClassifyOptions opts;
    opts.n_list = {1, 2, 3};
    const auto r = classify(t, opts);
    CHECK(r.power_bounded == TriState::yes);
    CHECK(r.convergent() == TriState::yes);
    CHECK(r.uniformly_exponentially_stable() == TriState::yes);
    for (auto [n, flag] : r.quasi_contraction) CHECK(flag == TriState::yes);
    REQUIRE(r.exponential.has_value());
    CHECK(r.exponential->m == doctest::Approx(operator_norm(t) / 0.9));
    CHECK(r.exponential->epsilon == doctest::Approx(0.105360515657826));
    CHECK(r.spectral_radius == r.sup_symbol);
    CHECK_THROWS_AS(r.quasi_contraction_n(4), DomainError);
    CHECK_FALSE(r.any_marginal());
  }
  SUBCASE("symbol 1") {
    const WctOperator t = atomwise({1.0, 0.2});
    ClassifyOptions exact;
    exact.eta = 0.0;
    const auto r0 = classify(t, exact);
    CHECK(r0.power_bounded == TriState::yes);
    CHECK(r0.quasi_contraction_n(1) == TriState::yes);
    CHECK(r0.strongly_stable() == TriState::no);
    CHECK_FALSE(r0.exponential.has_value());

    const auto r = classify(t);
    CHECK(r.power_bounded == TriState::marginal);
    CHECK(r.weakly_stable() == TriState::marginal);
    CHECK(r.any_marginal());
    CHECK(r.tolerance_band == kDefaultEta);
  }
  SUBCASE("unit square") {
    const auto inst = examples::build_example_c(1.0, expr::parse("exp(x+y)"), expr::parse("1"), 64);
    ClassifyOptions opts;
    opts.n_list = {1, 2, 3};
    const auto r = classify(inst.op(), opts);
    CHECK(r.power_bounded == TriState::no);
    CHECK(r.quasi_contraction_n(1) == TriState::no);
    CHECK(r.quasi_contraction_n(3) == TriState::no);
    CHECK(r.uniformly_stable() == TriState::no);
  }
  SUBCASE("zero symbol") {
    const auto r = classify(atomwise({0.0, 0.0}));
    CHECK(r.convergent() == TriState::yes);
    REQUIRE(r.exponential.has_value());
  }
  SUBCASE("truncated spaces carry their tail") {
    const auto inst = examples::build_example_a(1.0, expr::parse("1"), expr::parse("1"), 1e-6);
    CHECK(classify(inst.op()).tail_bound == inst.space->tail_bound());
  }
  CHECK_THROWS_AS(classify(atomwise({1.0}), ClassifyOptions{-1.0, {1}, 0.0}), DomainError);
  CHECK_THROWS_AS(classify(atomwise({1.0}), ClassifyOptions{0.0, {0}, 0.0}), DomainError);
}

TEST_CASE("property: equivalence chain outside the band") {
  std::mt19937_64 rng(3);
  ClassifyOptions opts;
  opts.n_list = {1, 2, 3, 7};
  for (int trial = 0; trial < 200; ++trial) {
    const WctOperator t = oracle::random_instance(rng, {});
    const auto r = classify(t, opts);
    if (std::abs(r.sup_symbol - 1.0) <= opts.eta) continue;
    const TriState expect = r.spectral_radius <= 1.0 ? TriState::yes : TriState::no;
    CHECK(r.power_bounded == expect);
    for (auto [n, flag] : r.quasi_contraction) CHECK(flag == expect);
    CHECK(r.convergent() == r.uniformly_stable());
    CHECK(r.strongly_stable() == r.weakly_stable());
    CHECK(r.convergent() == r.uniformly_exponentially_stable());
    CHECK(r.convergent() == (r.sup_symbol < 1.0 ? TriState::yes : TriState::no));
  }
}

TEST_CASE("property: adjoint invariance") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const WctOperator t = oracle::random_instance(rng, {});
    const auto a = classify(t), b = classify(adjoint(t));
    CHECK(a.power_bounded == b.power_bounded);
    CHECK(a.stability == b.stability);
    CHECK(a.quasi_contraction == b.quasi_contraction);
    CHECK(std::abs(a.spectral_radius - b.spectral_radius) <= 1e-14 * (1.0 + a.spectral_radius));
  }
}

TEST_CASE("property: scaling covariance") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.1, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const WctOperator t = oracle::random_instance(rng, {});
    const double c = scale(rng);
    const WctOperator tc(t.u(), t.w().scaled(c), t.partition(), t.p());
    const auto r = classify(tc);
    CHECK(r.spectral_radius == doctest::Approx(c * spectral_radius(t)).epsilon(1e-13));
    const double s = r.sup_symbol;
    if (std::abs(s - 1.0) > kDefaultEta) {
      CHECK(r.power_bounded == (s <= 1.0 ? TriState::yes : TriState::no));
      CHECK(r.stability == (s < 1.0 ? TriState::yes : TriState::no));
    }
  }
}

TEST_CASE("property: stability implies geometric decay") {
  std::mt19937_64 rng(6);
  oracle::CorpusOptions o;
  o.scale_lo = 0.2;
  o.scale_hi = 0.999;
  for (int trial = 0; trial < 50; ++trial) {
    o.p = trial % 2 ? 2.0 : 1.5;
    const WctOperator t = oracle::random_instance(rng, o);
    const auto r = classify(t);
    REQUIRE(r.convergent() == TriState::yes);
    const double s = r.sup_symbol, norm = operator_norm(t);
    for (std::size_t n = 1; n <= 200; ++n)
      CHECK(power_norm(t, n) <= std::pow(s, static_cast<double>(n - 1)) * norm * (1.0 + 1e-12));
  }
}
