#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

namespace wct::expr {

enum class Variable { x, y, k };
enum class BinaryOp { add, sub, mul, div, pow };
enum class Function { exp, abs, sqrt, conj, re, im };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Real literal `2.5` or imaginary literal `2.5i` / `i`.
struct Literal {
  double magnitude;
  bool imaginary;
  bool operator==(const Literal&) const = default;
};

struct VariableRef {
  Variable var;
  bool operator==(const VariableRef&) const = default;
};

struct Negate {
  NodePtr operand;
};

struct Binary {
  BinaryOp op;
  NodePtr lhs;
  NodePtr rhs;
};

struct Call {
  Function fn;
  NodePtr arg;
};

struct Node {
  std::variant<Literal, VariableRef, Negate, Binary, Call> data;
};

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  explicit Expr(NodePtr root);

  const Node& root() const noexcept { return *root_; }
  bool uses(Variable v) const;

  /// Structural equality.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  NodePtr root_;
};

/// Precedence: ^ (right-assoc) > unary minus > * / > + -. `i` is the
/// imaginary unit; a number followed directly by `i` is an imaginary literal.
/// Throws ParseError carrying the 0-based offset of the offending character.
Expr parse(std::string_view text);

/// Canonical, fully parenthesized form; parse(to_string(e)) == e.
std::string to_string(const Expr& e);

/// Evaluation context. `dimension` says which coordinates exist: x needs 1,
/// y needs 2; the point index k is always available.
struct Point {
  double x = 0.0;
  double y = 0.0;
  std::int64_t k = 0;
  int dimension = 0;
};

/// Pure and deterministic. Real-valued subexpressions stay exactly real.
/// Throws EvalError on division by zero, unavailable variables, and
/// non-integer powers of complex or negative bases.
std::complex<double> eval(const Expr& e, const Point& at);

}  // namespace wct::expr
