#include "wct/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "wct/error.hpp"

namespace wct::expr {

namespace {

using cplx = std::complex<double>;

constexpr std::array<std::pair<std::string_view, Function>, 6> kFunctions{{
    {"exp", Function::exp},
    {"abs", Function::abs},
    {"sqrt", Function::sqrt},
    {"conj", Function::conj},
    {"re", Function::re},
    {"im", Function::im},
}};

std::string_view name_of(Function fn) {
  for (const auto& [name, f] : kFunctions) {
    if (f == fn) return name;
  }
  return "?";
}

NodePtr make(auto alternative) { return std::make_shared<const Node>(Node{std::move(alternative)}); }

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr run() {
    NodePtr root = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return Expr(std::move(root));
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const { throw ParseError(what, at); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Binary{BinaryOp::add, lhs, term()});
      } else if (accept('-')) {
        lhs = make(Binary{BinaryOp::sub, lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Binary{BinaryOp::mul, lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Binary{BinaryOp::div, lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Negate{unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Binary{BinaryOp::pow, base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expression();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.')) ++end;
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < text_.size() && (text_[exp_end] == '+' || text_[exp_end] == '-')) ++exp_end;
      if (exp_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_end]))) {
        while (exp_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_end]))) ++exp_end;
        end = exp_end;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, value);
    if (ec != std::errc() || ptr != text_.data() + end) fail_at("malformed number", start);
    if (!std::isfinite(value)) fail_at("number out of range", start);
    pos_ = end;
    bool imaginary = false;
    if (pos_ < text_.size() && text_[pos_] == 'i' &&
        (pos_ + 1 == text_.size() || !is_ident_char(text_[pos_ + 1]))) {
      imaginary = true;
      ++pos_;
    }
    return make(Literal{value, imaginary});
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x") return make(VariableRef{Variable::x});
    if (name == "y") return make(VariableRef{Variable::y});
    if (name == "k") return make(VariableRef{Variable::k});
    if (name == "i") return make(Literal{1.0, true});
    for (const auto& [fname, fn] : kFunctions) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after " + std::string(name));
        NodePtr arg = expression();
        if (!accept(')')) fail("expected ')'");
        return make(Call{fn, std::move(arg)});
      }
    }
    fail_at("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool node_uses(const Node& n, Variable v) {
  return std::visit(
      [v](const auto& alt) -> bool {
        using T = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<T, VariableRef>) {
          return alt.var == v;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return node_uses(*alt.operand, v);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return node_uses(*alt.lhs, v) || node_uses(*alt.rhs, v);
        } else if constexpr (std::is_same_v<T, Call>) {
          return node_uses(*alt.arg, v);
        } else {
          return false;
        }
      },
      n.data);
}

bool nodes_equal(const Node& a, const Node& b) {
  if (a.data.index() != b.data.index()) return false;
  return std::visit(
      [&b](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.data);
        if constexpr (std::is_same_v<T, Literal> || std::is_same_v<T, VariableRef>) {
          return lhs == rhs;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return nodes_equal(*lhs.operand, *rhs.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return lhs.op == rhs.op && nodes_equal(*lhs.lhs, *rhs.lhs) && nodes_equal(*lhs.rhs, *rhs.rhs);
        } else {
          return lhs.fn == rhs.fn && nodes_equal(*lhs.arg, *rhs.arg);
        }
      },
      a.data);
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void print(const Node& n, std::string& out) {
  std::visit(
      [&out](const auto& alt) {
        using T = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<T, Literal>) {
          out += format_number(alt.magnitude);
          if (alt.imaginary) out += 'i';
        } else if constexpr (std::is_same_v<T, VariableRef>) {
          out += alt.var == Variable::x ? "x" : alt.var == Variable::y ? "y" : "k";
        } else if constexpr (std::is_same_v<T, Negate>) {
          out += "(-";
          print(*alt.operand, out);
          out += ')';
        } else if constexpr (std::is_same_v<T, Binary>) {
          static constexpr std::array<const char*, 5> ops{" + ", " - ", " * ", " / ", " ^ "};
          out += '(';
          print(*alt.lhs, out);
          out += ops[static_cast<std::size_t>(alt.op)];
          print(*alt.rhs, out);
          out += ')';
        } else {
          out += name_of(alt.fn);
          out += '(';
          print(*alt.arg, out);
          out += ')';
        }
      },
      n.data);
}

std::string describe(const Point& at) {
  std::ostringstream os;
  os.precision(17);
  os << "point k=" << at.k;
  if (at.dimension >= 1) os << " x=" << at.x;
  if (at.dimension >= 2) os << " y=" << at.y;
  return os.str();
}

bool is_real(cplx z) { return z.imag() == 0.0; }

cplx integer_power(cplx base, long long n, const Point& at) {
  const bool invert = n < 0;
  unsigned long long e = invert ? static_cast<unsigned long long>(-(n + 1)) + 1ULL : static_cast<unsigned long long>(n);
  if (is_real(base)) {
    double b = base.real();
    double acc = 1.0;
    while (e) {
      if (e & 1ULL) acc *= b;
      b *= b;
      e >>= 1U;
    }
    if (invert) {
      if (acc == 0.0) throw EvalError("division by zero (negative power of 0) at " + describe(at));
      acc = 1.0 / acc;
    }
    return {acc, 0.0};
  }
  cplx acc{1.0, 0.0};
  while (e) {
    if (e & 1ULL) acc *= base;
    base *= base;
    e >>= 1U;
  }
  if (invert) {
    if (acc == cplx{}) throw EvalError("division by zero (negative power of 0) at " + describe(at));
    acc = 1.0 / acc;
  }
  return acc;
}

cplx eval_node(const Node& n, const Point& at);

cplx eval_binary(const Binary& b, const Point& at) {
  const cplx l = eval_node(*b.lhs, at);
  const cplx r = eval_node(*b.rhs, at);
  const bool both_real = is_real(l) && is_real(r);
  switch (b.op) {
    case BinaryOp::add:
      return l + r;
    case BinaryOp::sub:
      return l - r;
    case BinaryOp::mul:
      return both_real ? cplx{l.real() * r.real(), 0.0} : l * r;
    case BinaryOp::div:
      if (r == cplx{}) throw EvalError("division by zero at " + describe(at));
      return both_real ? cplx{l.real() / r.real(), 0.0} : l / r;
    case BinaryOp::pow: {
      if (!is_real(r)) throw EvalError("complex exponent is not supported at " + describe(at));
      const double e = r.real();
      if (std::nearbyint(e) == e && std::abs(e) < 9.0e15) return integer_power(l, static_cast<long long>(e), at);
      if (!is_real(l) || l.real() < 0.0) {
        throw EvalError("non-integer power of a complex or negative base at " + describe(at));
      }
      return {std::pow(l.real(), e), 0.0};
    }
  }
  return {};
}

cplx eval_call(const Call& c, const Point& at) {
  const cplx a = eval_node(*c.arg, at);
  switch (c.fn) {
    case Function::exp:
      return is_real(a) ? cplx{std::exp(a.real()), 0.0} : std::exp(a);
    case Function::abs:
      return {std::abs(a), 0.0};
    case Function::sqrt:
      return (is_real(a) && a.real() >= 0.0) ? cplx{std::sqrt(a.real()), 0.0} : std::sqrt(a);
    case Function::conj:
      return std::conj(a);
    case Function::re:
      return {a.real(), 0.0};
    case Function::im:
      return {a.imag(), 0.0};
  }
  return {};
}

cplx eval_node(const Node& n, const Point& at) {
  return std::visit(
      [&at](const auto& alt) -> cplx {
        using T = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return alt.imaginary ? cplx{0.0, alt.magnitude} : cplx{alt.magnitude, 0.0};
        } else if constexpr (std::is_same_v<T, VariableRef>) {
          switch (alt.var) {
            case Variable::x:
              if (at.dimension < 1) throw EvalError("variable x is not available at " + describe(at));
              return {at.x, 0.0};
            case Variable::y:
              if (at.dimension < 2) throw EvalError("variable y is not available at " + describe(at));
              return {at.y, 0.0};
            case Variable::k:
              return {static_cast<double>(at.k), 0.0};
          }
          return {};
        } else if constexpr (std::is_same_v<T, Negate>) {
          const cplx v = eval_node(*alt.operand, at);
          return is_real(v) ? cplx{-v.real(), 0.0} : -v;
        } else if constexpr (std::is_same_v<T, Binary>) {
          return eval_binary(alt, at);
        } else {
          return eval_call(alt, at);
        }
      },
      n.data);
}

}  // namespace

Expr::Expr(NodePtr root) : root_(std::move(root)) {}

bool Expr::uses(Variable v) const { return node_uses(*root_, v); }

bool operator==(const Expr& a, const Expr& b) { return nodes_equal(*a.root_, *b.root_); }

Expr parse(std::string_view text) { return Parser(text).run(); }

std::string to_string(const Expr& e) {
  std::string out;
  print(e.root(), out);
  return out;
}

std::complex<double> eval(const Expr& e, const Point& at) { return eval_node(e.root(), at); }

}  // namespace wct::expr
