#include <doctest.h>

#include <Eigen/Dense>
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

WctOperator constant_symbol(double c, std::size_t atoms = 3) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(c * 1000) + atoms);
  const SpacePtr s = testing::random_space(rng, 3 * atoms);
  return WctOperator(MeasurableFunction::constant(s, 1.0), MeasurableFunction::constant(s, c),
                     testing::random_partition(rng, s, atoms));
}

std::vector<double> sorted_abs(const std::vector<Complex>& v) {
  std::vector<double> out;
  for (Complex z : v) out.push_back(std::abs(z));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("eigenvalues") {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = 0.5;
  d(1, 1) = 2.0;
  const auto ev = sorted_abs(oracle::eigenvalues(d));
  CHECK(ev[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-14));

  SUBCASE("one-atom averaging projection") {
    const auto ev1 = sorted_abs(oracle::eigenvalues(to_matrix(constant_symbol(1.0, 1))));
    CHECK(ev1.back() == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i + 1 < ev1.size(); ++i) CHECK(ev1[i] <= 1e-12);
  }
  SUBCASE("random instances match the symbol") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
      const auto m = oracle::compare_spectrum(oracle::random_instance(rng, {}));
      CHECK(m.pass);
      CHECK(m.max_error <= 1e-8);
      CHECK(m.nonzero_eigenvalues == m.nonzero_atoms);
    }
  }
  CHECK_THROWS_AS(oracle::eigenvalues(Eigen::MatrixXcd::Identity(300, 300)), SizeError);
}

TEST_CASE("quasi_contraction_psd") {
  for (std::size_t n : {1, 2, 3}) CHECK(oracle::quasi_contraction_psd(constant_symbol(0.5), n).verdict == TriState::yes);
  CHECK(oracle::quasi_contraction_psd(constant_symbol(2.0), 1).verdict == TriState::no);
  for (std::size_t n : {1, 2, 5}) CHECK(oracle::quasi_contraction_psd(constant_symbol(0.0), n).verdict == TriState::yes);

  SUBCASE("errors") {
    const WctOperator t = constant_symbol(0.5);
    CHECK_THROWS_AS(oracle::quasi_contraction_psd(WctOperator(t.u(), t.w(), t.partition(), 3.0), 1),
                    UnsupportedExponentError);
    CHECK_THROWS_AS(oracle::quasi_contraction_psd(t, 0), DomainError);
  }
  SUBCASE("property: agrees with classify away from the boundary") {
    std::mt19937_64 rng(2);
    ClassifyOptions opts;
    opts.n_list = {1, 2, 3};
    for (int trial = 0; trial < 60; ++trial) {
      const WctOperator t = oracle::random_instance(rng, {});
      const auto r = classify(t, opts);
      if (std::abs(r.sup_symbol - 1.0) <= 1e-6) continue;
      for (auto [n, flag] : r.quasi_contraction) CHECK(oracle::quasi_contraction_psd(t, n).verdict == flag);
    }
  }
}

TEST_CASE("induced_norm_lower_bound") {
  const WctOperator ones = constant_symbol(1.0);
  for (double p : {1.0, 2.0, 4.0}) CHECK(oracle::induced_norm_lower_bound(ones, p, 4) == doctest::Approx(1.0).epsilon(1e-12));

  SUBCASE("single atom with orthogonal u and w") {
    const auto s = std::make_shared<const MeasureSpace>(std::vector<double>{0.5, 0.5});
    const WctOperator t(MeasurableFunction::from_real(s, std::vector<double>{1, 0}),
                        MeasurableFunction::from_real(s, std::vector<double>{0, 1}), Partition::whole(s));
    CHECK(operator_norm(t) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(oracle::induced_norm_lower_bound(t, 2.0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("p = 2 against the dense singular value, never above the closed form") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
      const WctOperator t = oracle::random_instance(rng, {});
      const double sigma = oracle::weighted_spectral_norm(to_matrix(t));
      const double lb = oracle::induced_norm_lower_bound(t, 2.0, 4, 7);
      CHECK(std::abs(lb - sigma) <= 1e-6 * sigma);
      CHECK(lb <= operator_norm(t) * (1.0 + 1e-12));
    }
  }
  SUBCASE("argument checks") {
    CHECK_THROWS_AS(oracle::induced_norm_lower_bound(ones, 2.0, 0), DomainError);
    CHECK_THROWS_AS(oracle::induced_norm_lower_bound(ones, 0.5, 1), DomainError);
    CHECK_THROWS_AS(oracle::induced_norm_lower_bound(ones, 2.0, 1, 0, 0), DomainError);
  }
}

TEST_CASE("power_growth_trace") {
  SUBCASE("symbol 1 is flat") {
    const auto trace = oracle::power_growth_trace(constant_symbol(1.0), 30);
    REQUIRE(trace.size() == 30);
    CHECK_FALSE(trace[0].ratio.has_value());
    for (const auto& row : trace) {
      CHECK(row.power_norm == trace[0].power_norm);
      CHECK(row.oracle_lower_bound <= row.power_norm * (1.0 + 1e-12));
    }
  }
  SUBCASE("symbol 0.9 decays at rate 0.9") {
    const auto trace = oracle::power_growth_trace(constant_symbol(0.9), 60);
    for (std::size_t k = 1; k < trace.size(); ++k) {
      REQUIRE(trace[k].ratio.has_value());
      CHECK(std::abs(*trace[k].ratio - 0.9) <= 1e-9);
    }
  }
  SUBCASE("unit square grows at the sup of the symbol") {
    const auto inst = examples::build_example_c(1.0, expr::parse("exp(x+y)"), expr::parse("1"), 64);
    const WctOperator t = inst.op();
    const auto trace = oracle::power_growth_trace(t, 40);
    for (std::size_t k = 1; k < trace.size(); ++k) {
      CHECK(trace[k].power_norm > trace[k - 1].power_norm);
      CHECK(std::abs(*trace[k].ratio - spectral_radius(t)) <= 1e-9 * spectral_radius(t));
      CHECK(trace[k].oracle_lower_bound <= trace[k].power_norm * (1.0 + 1e-12));
    }
    // The midpoint grid at n = 64 undershoots e(e - 1) = 4.6708 by its O(1/n) sampling offset.
    CHECK(std::abs(*trace.back().ratio - 4.6708) <= 0.05);
  }
  CHECK_THROWS_AS(oracle::power_growth_trace(constant_symbol(0.5), 201), DomainError);
  CHECK_THROWS_AS(oracle::power_growth_trace(constant_symbol(0.5), 0), DomainError);
}

TEST_CASE("a Jordan block has spectral radius 1 yet ||M^n|| >= n") {
  Eigen::MatrixXcd m(2, 2);
  m << 1.0, 1.0, 0.0, 1.0;
  CHECK(oracle::spectral_radius(m) == doctest::Approx(1.0).epsilon(1e-7));
  Eigen::MatrixXcd power = m;
  for (int n = 1; n <= 50; ++n) {
    CHECK(oracle::spectral_norm(power) >= n);
    power *= m;
  }
}

TEST_CASE("random_instance is reproducible and respects its options") {
  oracle::CorpusOptions o;
  o.min_points = 5;
  o.max_points = 9;
  o.max_atoms = 3;
  o.complex_values = false;
  std::mt19937_64 a(9), b(9);
  for (int trial = 0; trial < 20; ++trial) {
    const WctOperator x = oracle::random_instance(a, o), y = oracle::random_instance(b, o);
    REQUIRE(x.space()->size() == y.space()->size());
    CHECK(x.space()->size() >= 5);
    CHECK(x.space()->size() <= 9);
    CHECK(x.partition().atom_count() <= 3);
    for (std::size_t i = 0; i < x.u().size(); ++i) {
      CHECK(x.u()[i] == y.u()[i]);
      CHECK(x.u()[i].imag() == 0.0);
    }
    CHECK(x.symbol().sup_abs >= o.scale_lo - 1e-12);
    CHECK(x.symbol().sup_abs <= o.scale_hi + 1e-12);
  }
}
