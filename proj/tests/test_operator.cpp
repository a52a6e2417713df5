#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "test_support.hpp"
#include "wct/error.hpp"
#include "wct/operator.hpp"
#include "wct/oracle.hpp"

using namespace wct;

namespace {

SpacePtr two_halves() { return std::make_shared<const MeasureSpace>(std::vector<double>{0.5, 0.5}); }

MeasurableFunction repeated(const WctOperator& t, std::size_t n, MeasurableFunction f) {
  for (std::size_t k = 0; k < n; ++k) f = apply(t, f);
  return f;
}

Eigen::VectorXcd as_vector(const MeasurableFunction& f) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) v(static_cast<Eigen::Index>(i)) = f[i];
  return v;
}

double max_diff(const MeasurableFunction& a, const Eigen::VectorXcd& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b(static_cast<Eigen::Index>(i))));
  return d;
}

oracle::CorpusOptions corpus(double p = 2.0) {
  oracle::CorpusOptions o;
  o.p = p;
  return o;
}

}  // namespace

TEST_CASE("apply") {
  SUBCASE("u = w = 1 reduces to E") {
    std::mt19937_64 rng(1);
    const SpacePtr s = testing::random_space(rng, 12);
    const Partition part = testing::random_partition(rng, s, 3);
    const WctOperator t(MeasurableFunction::constant(s, 1.0), MeasurableFunction::constant(s, 1.0), part);
    const MeasurableFunction f = testing::random_complex(rng, s);
    const MeasurableFunction tf = apply(t, f);
    const MeasurableFunction ef = conditional_expectation(f, part);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(tf[i] == ef[i]);
  }
  SUBCASE("w = 0 gives zero") {
    const SpacePtr s = two_halves();
    const WctOperator t(MeasurableFunction::constant(s, 3.0), MeasurableFunction::constant(s, 0.0),
                        Partition::whole(s));
    CHECK(support(apply(t, MeasurableFunction::constant(s, 1.0))).empty());
  }
  SUBCASE("hand-evaluated single atom") {
    const SpacePtr s = two_halves();
    const WctOperator t(MeasurableFunction::from_real(s, std::vector<double>{1, 1}),
                        MeasurableFunction::from_real(s, std::vector<double>{1, 2}), Partition::whole(s));
    const MeasurableFunction tf = apply(t, MeasurableFunction::from_real(s, std::vector<double>{1, 0}));
    CHECK(tf[0] == Complex{0.5, 0.0});
    CHECK(tf[1] == Complex{1.0, 0.0});
  }
  SUBCASE("misaligned f") {
    const SpacePtr s = two_halves();
    const WctOperator t(MeasurableFunction::constant(s, 1.0), MeasurableFunction::constant(s, 1.0),
                        Partition::whole(s));
    CHECK_THROWS_AS(apply(t, MeasurableFunction::constant(two_halves(), 1.0)), DomainError);
  }
}

TEST_CASE("construction validates") {
  const SpacePtr s = two_halves();
  const auto one = MeasurableFunction::constant(s, 1.0);
  CHECK_THROWS_AS(WctOperator(one, one, Partition::whole(s), 0.5), DomainError);
  CHECK_THROWS_AS(WctOperator(one, one, Partition::whole(s), INFINITY), DomainError);
  CHECK_THROWS_AS(WctOperator(one, MeasurableFunction::constant(two_halves(), 1.0), Partition::whole(s)),
                  DomainError);
  CHECK(std::isinf(WctOperator(one, one, Partition::whole(s), 1.0).p_conj()));
  CHECK(WctOperator(one, one, Partition::whole(s), 3.0).p_conj() == doctest::Approx(1.5));
}

TEST_CASE("power_apply") {
  std::mt19937_64 rng(2);
  SUBCASE("n = 1 is apply, n = 0 is rejected") {
    const WctOperator t = oracle::random_instance(rng, corpus());
    const MeasurableFunction f = testing::random_complex(rng, t.space());
    const MeasurableFunction a = apply(t, f), b = power_apply(t, 1, f);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(a[i] == b[i]);
    CHECK_THROWS_AS(power_apply(t, 0, f), DomainError);
  }
  SUBCASE("nilpotent when u is orthogonal to w on every atom") {
    const SpacePtr s = two_halves();
    const WctOperator t(MeasurableFunction::from_real(s, std::vector<double>{1, 0}),
                        MeasurableFunction::from_real(s, std::vector<double>{0, 1}), Partition::whole(s));
    const MeasurableFunction f = MeasurableFunction::constant(s, 1.0);
    CHECK_FALSE(support(apply(t, f)).empty());
    CHECK(support(power_apply(t, 2, f)).empty());
  }
  SUBCASE("8 points, 3 atoms, n = 5 against repeated application") {
    const SpacePtr s = testing::random_space(rng, 8);
    const Partition part = testing::random_partition(rng, s, 3);
    const WctOperator t(testing::random_complex(rng, s), testing::random_complex(rng, s), part);
    const MeasurableFunction f = testing::random_complex(rng, s);
    const MeasurableFunction a = power_apply(t, 5, f), b = repeated(t, 5, f);
    CHECK((a - b).p_norm(2.0) <= 1e-10 * b.p_norm(2.0));
  }
  SUBCASE("property: factorization for n <= 20") {
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      for (int trial = 0; trial < 25; ++trial) {
        const WctOperator t = oracle::random_instance(rng, corpus(p));
        const MeasurableFunction f = testing::random_complex(rng, t.space());
        for (std::size_t n = 1; n <= 20; ++n) {
          const double err = (power_apply(t, n, f) - repeated(t, n, f)).p_norm(p);
          CHECK(err <= 1e-10 * (1.0 + f.p_norm(p)) * std::max(1.0, power_norm(t, n)));
        }
      }
    }
  }
  SUBCASE("n > 64 uses magnitude/phase form and still matches") {
    oracle::CorpusOptions o = corpus();
    o.scale_lo = o.scale_hi = 1.01;
    for (int trial = 0; trial < 10; ++trial) {
      const WctOperator t = oracle::random_instance(rng, o);
      const MeasurableFunction f = testing::random_complex(rng, t.space());
      const MeasurableFunction a = power_apply(t, 100, f), b = repeated(t, 100, f);
      CHECK((a - b).p_norm(2.0) <= 1e-10 * b.p_norm(2.0) + 1e-12);
    }
  }
  SUBCASE("property: T^(n+1) f - T^n f = (g - 1) g^(n-1) T f") {
    for (int trial = 0; trial < 30; ++trial) {
      const WctOperator t = oracle::random_instance(rng, corpus());
      const MeasurableFunction f = testing::random_complex(rng, t.space());
      const MeasurableFunction& g = t.symbol().g;
      const MeasurableFunction one = MeasurableFunction::constant(t.space(), 1.0);
      for (std::size_t n = 1; n <= 6; ++n) {
        MeasurableFunction rhs = (g - one) * apply(t, f);
        for (std::size_t k = 1; k < n; ++k) rhs = g * rhs;
        const MeasurableFunction lhs = power_apply(t, n + 1, f) - power_apply(t, n, f);
        CHECK((lhs - rhs).p_norm(2.0) <= 1e-11 * (1.0 + power_apply(t, n + 1, f).p_norm(2.0)));
      }
    }
  }
}

TEST_CASE("adjoint") {
  std::mt19937_64 rng(3);
  SUBCASE("real u, w are swapped") {
    const SpacePtr s = testing::random_space(rng, 6);
    const Partition part = testing::random_partition(rng, s, 2);
    const auto u = MeasurableFunction::from_real(s, std::vector<double>{1, 2, 3, 4, 5, 6});
    const auto w = MeasurableFunction::from_real(s, std::vector<double>{-1, 0, 1, 0.5, 2, 7});
    const WctOperator ts = adjoint(WctOperator(u, w, part));
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(ts.u()[i] == w[i]);
      CHECK(ts.w()[i] == u[i]);
    }
  }
  SUBCASE("matrix of T* is the weighted conjugate transpose") {
    for (int trial = 0; trial < 30; ++trial) {
      const WctOperator t = oracle::random_instance(rng, corpus());
      const DenseMatrix m = to_matrix(t);
      const Eigen::VectorXd mass = m.mass;
      // <Tf, g> = <f, T* g> with weights: (T*)_{ij} = conj(M_{ji}) m_j / m_i.
      Eigen::MatrixXcd expect = m.entries.adjoint();
      for (Eigen::Index i = 0; i < expect.rows(); ++i)
        for (Eigen::Index j = 0; j < expect.cols(); ++j) expect(i, j) *= mass(j) / mass(i);
      const DenseMatrix ms = to_matrix(adjoint(t));
      CHECK((ms.entries - expect).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + expect.cwiseAbs().maxCoeff()));
    }
  }
  SUBCASE("involution") {
    const WctOperator t = oracle::random_instance(rng, corpus());
    const WctOperator tt = adjoint(adjoint(t));
    for (std::size_t i = 0; i < t.u().size(); ++i) {
      CHECK(tt.u()[i] == t.u()[i]);
      CHECK(tt.w()[i] == t.w()[i]);
    }
    CHECK(tt.partition().atoms() == t.partition().atoms());
  }
  SUBCASE("property: norm symmetry") {
    for (int trial = 0; trial < 50; ++trial) {
      const WctOperator t = oracle::random_instance(rng, corpus());
      CHECK(std::abs(operator_norm(t) - operator_norm(adjoint(t))) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(adjoint(oracle::random_instance(rng, corpus(3.0))), UnsupportedExponentError);
}

TEST_CASE("operator_norm") {
  std::mt19937_64 rng(4);
  SUBCASE("u = w = 1 gives 1") {
    const SpacePtr s = testing::random_space(rng, 10);
    const WctOperator t(MeasurableFunction::constant(s, 1.0), MeasurableFunction::constant(s, 1.0),
                        testing::random_partition(rng, s, 4));
    CHECK(operator_norm(t) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("p = 2: largest singular value of the weighted matrix") {
    for (int trial = 0; trial < 40; ++trial) {
      const WctOperator t = oracle::random_instance(rng, corpus());
      const DenseMatrix m = to_matrix(t);
      const Eigen::VectorXd r = m.mass.cwiseSqrt();
      const Eigen::MatrixXcd a = r.asDiagonal() * m.entries * r.cwiseInverse().asDiagonal();
      const double sigma = Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues()(0);
      CHECK(std::abs(operator_norm(t) - sigma) <= 1e-8 * std::max(1.0, sigma));
    }
  }
  SUBCASE("homogeneity in w") {
    const WctOperator t = oracle::random_instance(rng, corpus(1.5));
    const WctOperator t3(t.u(), t.w().scaled(3.0), t.partition(), t.p());
    CHECK(operator_norm(t3) == doctest::Approx(3.0 * operator_norm(t)).epsilon(1e-14));
  }
  SUBCASE("property: bound holds and is attained atomwise") {
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      for (int trial = 0; trial < 20; ++trial) {
        const WctOperator t = oracle::random_instance(rng, corpus(p));
        const double norm = operator_norm(t);
        for (int k = 0; k < 10; ++k) {
          const MeasurableFunction f = testing::random_complex(rng, t.space());
          const MeasurableFunction unit = f.scaled(1.0 / f.p_norm(p));
          CHECK(apply(t, unit).p_norm(p) <= norm * (1.0 + 1e-12));
        }
        CHECK(oracle::induced_norm_lower_bound(t, p, 8, 99) >= (1.0 - 1e-6) * norm);
      }
    }
  }
  SUBCASE("p = 1 uses the atom max of |u|") {
    const SpacePtr s = two_halves();
    const WctOperator t(MeasurableFunction::from_real(s, std::vector<double>{1, -3}),
                        MeasurableFunction::from_real(s, std::vector<double>{2, 0}), Partition::whole(s), 1.0);
    // E|w| = 1, max|u| = 3.
    CHECK(operator_norm(t) == doctest::Approx(3.0));
  }
}

TEST_CASE("power_norm") {
  SUBCASE("symbol 0.9 with B = 1") {
    const SpacePtr s = two_halves();
    const double d = std::sqrt(0.19);
    const WctOperator t(MeasurableFunction::constant(s, 1.0),
                        MeasurableFunction::from_real(s, std::vector<double>{0.9 + d, 0.9 - d}), Partition::whole(s));
    CHECK(operator_norm(t) == doctest::Approx(1.0).epsilon(1e-15));
    // 0.9^49 from mpmath: 0.0057264168970223481...
    CHECK(power_norm(t, 50) == doctest::Approx(0.0057264168970223481).epsilon(1e-13));
    CHECK(power_norm(t, 1) == operator_norm(t));
    CHECK(std::exp(log_power_norm(t, 50)) == doctest::Approx(power_norm(t, 50)).epsilon(1e-13));
  }
  SUBCASE("symbol 1 gives a constant sequence") {
    std::mt19937_64 rng(5);
    const SpacePtr s = testing::random_space(rng, 9);
    const WctOperator t(MeasurableFunction::constant(s, 1.0), MeasurableFunction::constant(s, 1.0),
                        testing::random_partition(rng, s, 3));
    for (std::size_t n = 1; n <= 200; ++n) CHECK(power_norm(t, n) == power_norm(t, 1));
  }
  SUBCASE("property: submultiplicative") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 40; ++trial) {
      const WctOperator t = oracle::random_instance(rng, corpus(trial % 2 ? 2.0 : 1.5));
      for (std::size_t m = 1; m <= 8; ++m)
        for (std::size_t n = 1; n <= 8; ++n)
          CHECK(power_norm(t, m + n) <= power_norm(t, m) * power_norm(t, n) * (1.0 + 1e-12));
    }
  }
  SUBCASE("growth does not overflow the log form") {
    std::mt19937_64 rng(7);
    oracle::CorpusOptions o = corpus();
    o.scale_lo = o.scale_hi = 5.0;
    const WctOperator t = oracle::random_instance(rng, o);
    CHECK(std::isfinite(log_power_norm(t, 1000)));
    CHECK(log_power_norm(t, 1000) == doctest::Approx(999.0 * std::log(5.0) + std::log(power_norm(t, 1))).epsilon(1e-9));
  }
}

TEST_CASE("to_matrix") {
  std::mt19937_64 rng(8);
  SUBCASE("averaging matrix") {
    const SpacePtr s = two_halves();
    const WctOperator t(MeasurableFunction::constant(s, 1.0), MeasurableFunction::constant(s, 1.0),
                        Partition::whole(s));
    const DenseMatrix m = to_matrix(t);
    CHECK((m.entries.array() - Complex{0.5, 0.0}).abs().maxCoeff() == 0.0);
  }
  SUBCASE("matrix-vector product, rank, and composition") {
    for (int trial = 0; trial < 30; ++trial) {
      const WctOperator t = oracle::random_instance(rng, corpus());
      const DenseMatrix m = to_matrix(t);
      const MeasurableFunction f = testing::random_complex(rng, t.space());
      const double scale = 1.0 + operator_norm(t) * f.sup_norm() * 10.0;
      CHECK(max_diff(apply(t, f), m.entries * as_vector(f)) <= 1e-12 * scale);
      CHECK(max_diff(apply(t, apply(t, f)), m.entries * (m.entries * as_vector(f))) <=
            1e-12 * scale * (1.0 + operator_norm(t)));

      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.entries);
      svd.setThreshold(1e-10);
      CHECK(static_cast<std::size_t>(svd.rank()) <= t.partition().atom_count());
    }
  }
  SUBCASE("cap") {
    const SpacePtr s = testing::random_space(rng, 300);
    const WctOperator t(MeasurableFunction::constant(s, 1.0), MeasurableFunction::constant(s, 1.0),
                        Partition::whole(s));
    CHECK_THROWS_AS(to_matrix(t), SizeError);
    CHECK(to_matrix(t, 300).dim() == 300);
  }
}
