#include "wct/examples.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>

#include "wct/error.hpp"
#include "wct/summation.hpp"

namespace wct::examples {

namespace {

constexpr std::size_t kMaxSeriesTerms = 20'000'000;

Complex product_at(const expr::Expr& u, const expr::Expr& w, const expr::Point& at) {
  return expr::eval(u, at) * expr::eval(w, at);
}

/// Weighted series over x = first, first + stride, ... of (uw)(x) weight(x),
/// summed until the weights fall below double resolution of the running total.
struct SeriesSums {
  Complex weighted;
  double weight;
};

SeriesSums sum_series(const expr::Expr& u, const expr::Expr& w, std::size_t first, std::size_t stride,
                      const std::function<double(double)>& weight, const std::function<std::int64_t(std::size_t)>& index_of,
                      double peak_x) {
  CompensatedComplexSum num;
  CompensatedSum den;
  for (std::size_t x = first, terms = 0;; x += stride, ++terms) {
    const double xd = static_cast<double>(x);
    const double wt = weight(xd);
    if (wt > 0.0) {
      expr::Point at;
      at.x = xd;
      at.k = index_of(x);
      at.dimension = 1;
      num.add(product_at(u, w, at) * wt);
      den.add(wt);
    }
    if (xd > peak_x && wt <= 1e-18 * den.value()) break;
    if (xd > peak_x && den.value() == 0.0) break;
    if (terms > kMaxSeriesTerms) throw DomainError("series did not reach its tolerance");
  }
  return {num.value(), den.value()};
}

Partition partition_by(const SpacePtr& space, std::size_t classes, const std::function<std::size_t(double)>& cls) {
  if (space->dimension() != 1) throw DomainError("coordinate partitions need a 1-D space");
  std::vector<std::vector<std::size_t>> atoms(classes);
  for (std::size_t i = 0; i < space->size(); ++i) atoms[cls(space->coord(i)[0])].push_back(i);
  std::erase_if(atoms, [](const auto& a) { return a.empty(); });
  return Partition(space, std::move(atoms));
}

}  // namespace

const LabeledConstant& ExampleInstance::constant(const std::string& label) const {
  for (const auto& c : expected_constants) {
    if (c.label == label) return c;
  }
  throw DomainError("example " + name + " has no constant '" + label + "'");
}

Partition parity_partition(const SpacePtr& space) {
  return partition_by(space, 3, [](double x) -> std::size_t {
    if (x == 0.0) return 0;
    return std::fmod(x, 2.0) == 1.0 ? 1 : 2;
  });
}

Partition multiples_of_three_partition(const SpacePtr& space) {
  return partition_by(space, 2, [](double x) -> std::size_t { return std::fmod(x, 3.0) == 0.0 ? 0 : 1; });
}

ExampleInstance build_example_a(double theta, const expr::Expr& u, const expr::Expr& w, double eps_tail) {
  SpacePtr space = truncate_discrete(PoissonFamily{theta}, eps_tail);
  Partition part = parity_partition(space);

  auto weight = [theta](double x) {
    if (theta == 0.0) return x == 0.0 ? 1.0 : 0.0;
    return std::exp(-theta + x * std::log(theta) - std::lgamma(x + 1.0));
  };
  auto index_of = [](std::size_t x) { return static_cast<std::int64_t>(x); };

  ExampleInstance inst{"a_poisson",
                       {{"theta", theta}, {"eps_tail", eps_tail}},
                       space,
                       part,
                       MeasurableFunction::from_expr(space, u),
                       MeasurableFunction::from_expr(space, w),
                       expr::to_string(u),
                       expr::to_string(w),
                       {},
                       {},
                       {}};

  expr::Point origin;
  origin.dimension = 1;
  inst.expected_constants.push_back({"a1", product_at(u, w, origin)});
  const SeriesSums odd = sum_series(u, w, 1, 2, weight, index_of, theta);
  const SeriesSums even = sum_series(u, w, 2, 2, weight, index_of, theta);
  if (odd.weight > 0.0) {
    inst.expected_constants.push_back({"a2", odd.weighted / odd.weight});
  } else {
    inst.notes.emplace_back("odd atom X1 has zero mass for this theta; a2 is undefined");
  }
  if (even.weight > 0.0) {
    inst.expected_constants.push_back({"a3", even.weighted / even.weight});
  } else {
    inst.notes.emplace_back("even atom X2 has zero mass for this theta; a3 is undefined");
  }

  for (std::size_t a = 0; a < part.atom_count(); ++a) {
    const double x = space->coord(part.atom(a).front())[0];
    const char* label = x == 0.0 ? "a1" : std::fmod(x, 2.0) == 1.0 ? "a2" : "a3";
    inst.reference_atom_values.push_back(inst.constant(label).value);
  }
  return inst;
}

ExampleInstance build_example_b(double p, const expr::Expr& u, const expr::Expr& w, double eps_tail) {
  SpacePtr space = truncate_discrete(GeometricFamily{p}, eps_tail);
  Partition part = multiples_of_three_partition(space);
  const double q = 1.0 - p;
  const double peak = 1.0;

  auto weight = [p, q](double x) { return p * std::pow(q, x - 1.0); };
  auto index_of = [](std::size_t x) { return static_cast<std::int64_t>(x) - 1; };

  ExampleInstance inst{"b_geometric",
                       {{"p", p}, {"eps_tail", eps_tail}},
                       space,
                       part,
                       MeasurableFunction::from_expr(space, u),
                       MeasurableFunction::from_expr(space, w),
                       expr::to_string(u),
                       expr::to_string(w),
                       {},
                       {},
                       {}};
  inst.notes.emplace_back(
      "alpha1 uses u(3n)w(3n) as in the averaging derivation; the printed spectrum formula reads u(3n)w(2n)");

  const SeriesSums thirds = sum_series(u, w, 3, 3, weight, index_of, peak);
  const SeriesSums all = sum_series(u, w, 1, 1, weight, index_of, peak);
  inst.expected_constants.push_back({"alpha1", thirds.weighted / thirds.weight});
  inst.expected_constants.push_back({"alpha2", (all.weighted - thirds.weighted) / (all.weight - thirds.weight)});

  for (std::size_t a = 0; a < part.atom_count(); ++a) {
    const double x = space->coord(part.atom(a).front())[0];
    inst.reference_atom_values.push_back(inst.constant(std::fmod(x, 3.0) == 0.0 ? "alpha1" : "alpha2").value);
  }
  return inst;
}

ExampleInstance build_example_c(double a, const expr::Expr& u, const expr::Expr& w, std::size_t n,
                                QuadratureRule rule) {
  if (u.uses(expr::Variable::k) || w.uses(expr::Variable::k)) {
    throw DomainError("example c expressions must depend on x and y only");
  }
  GridSpace grid = square_grid(a, n, rule);

  ExampleInstance inst{"c_square",
                       {{"a", a}, {"n", static_cast<double>(n)}},
                       grid.space,
                       grid.columns,
                       MeasurableFunction::from_expr(grid.space, u),
                       MeasurableFunction::from_expr(grid.space, w),
                       expr::to_string(u),
                       expr::to_string(w),
                       {},
                       {},
                       {}};
  if (u == expr::parse("exp(x + y)") && w == expr::parse("1")) {
    inst.notes.emplace_back(
        "E(u) is computed as the column integral of e^(x+t), i.e. e^x (e^a - 1) / a; the commonly printed "
        "e^x - e^(x+1) has the opposite sign, |E(uw)| > 1 either way");
  }
  if (a != 1.0) {
    inst.notes.emplace_back("conditional expectation on [0,a]^2 averages each column: (1/a) * int_0^a f(x,t) dt");
  }

  // Reference path: adaptive Gauss-Kronrod of the column average.
  auto column_average = [&](double x) {
    using boost::math::quadrature::gauss_kronrod;
    auto component = [&](bool imag) {
      auto f = [&](double t) {
        expr::Point at;
        at.x = x;
        at.y = t;
        at.dimension = 2;
        const Complex v = product_at(u, w, at);
        return imag ? v.imag() : v.real();
      };
      return gauss_kronrod<double, 61>::integrate(f, 0.0, a, 15, 1e-15);
    };
    return Complex{component(false), component(true)} / a;
  };

  double min_abs = std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  for (std::size_t col = 0; col < grid.columns.atom_count(); ++col) {
    const Complex ref = column_average(grid.space->coord(grid.columns.atom(col).front())[0]);
    inst.reference_atom_values.push_back(ref);
    min_abs = std::min(min_abs, std::abs(ref));
    max_abs = std::max(max_abs, std::abs(ref));
  }
  inst.expected_constants.push_back({"symbol_at_0", column_average(0.0)});
  inst.expected_constants.push_back({"symbol_at_a", column_average(a)});
  inst.expected_constants.push_back({"min_abs_on_grid", min_abs});
  inst.expected_constants.push_back({"max_abs_on_grid", max_abs});
  return inst;
}

}  // namespace wct::examples
