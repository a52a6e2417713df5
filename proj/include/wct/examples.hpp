#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wct/expr.hpp"
#include "wct/measure.hpp"
#include "wct/operator.hpp"

// The three worked families: a Poisson space with the {0}/odd/even partition,
// a geometric space split by multiples of 3, and the unit-square grid whose
// atoms are x-columns.
namespace wct::examples {

struct LabeledConstant {
  std::string label;
  Complex value;
};

struct ExampleInstance {
  std::string name;
  std::vector<std::pair<std::string, double>> parameters;
  SpacePtr space;
  Partition partition;
  MeasurableFunction u;
  MeasurableFunction w;
  std::string u_text;
  std::string w_text;
  /// Constants computed from series / reference quadrature, independent of
  /// the truncated space.
  std::vector<LabeledConstant> expected_constants;
  /// Same independent path, one value per atom of `partition`.
  std::vector<Complex> reference_atom_values;
  std::vector<std::string> notes;

  WctOperator op(double p = 2.0) const { return WctOperator(u, w, partition, p); }
  const LabeledConstant& constant(const std::string& label) const;
};

/// Partition of a 1-D space by coordinate: {x = 0}, odd x, even x >= 2.
/// Empty classes are dropped.
Partition parity_partition(const SpacePtr& space);

/// Partition of a 1-D space into {x divisible by 3} and the rest; empty classes dropped.
Partition multiples_of_three_partition(const SpacePtr& space);

ExampleInstance build_example_a(double theta, const expr::Expr& u, const expr::Expr& w, double eps_tail);
ExampleInstance build_example_b(double p, const expr::Expr& u, const expr::Expr& w, double eps_tail);
ExampleInstance build_example_c(double a, const expr::Expr& u, const expr::Expr& w, std::size_t n,
                                QuadratureRule rule = QuadratureRule::midpoint);

}  // namespace wct::examples
