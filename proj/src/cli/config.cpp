#include "wct/cli/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wct/examples.hpp"
#include "wct/expr.hpp"

namespace wct::cli {

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "is required");
  return obj.at(key);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(join(path, key), "unknown field");
  }
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
  return d;
}

std::size_t count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(path, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::vector<double> number_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

SpaceSpec parse_space(const json& s) {
  const std::string path = "space";
  if (!s.is_object()) throw ConfigError(path, "expected an object");
  const json& kind_v = require(s, "kind", path);
  if (!kind_v.is_string()) throw ConfigError("space.kind", "expected a string");
  const std::string kind = kind_v.get<std::string>();
  if (kind == "explicit") {
    reject_unknown(s, {"kind", "masses", "x", "y"}, path);
    ExplicitSpaceSpec spec{number_array(require(s, "masses", path), "space.masses"), {}, {}};
    if (s.contains("x")) spec.x = number_array(s.at("x"), "space.x");
    if (s.contains("y")) spec.y = number_array(s.at("y"), "space.y");
    if (!spec.y.empty() && spec.x.empty()) throw ConfigError("space.y", "needs space.x");
    return spec;
  }
  if (kind == "poisson") {
    reject_unknown(s, {"kind", "theta", "eps_tail"}, path);
    return PoissonSpaceSpec{number(require(s, "theta", path), "space.theta"),
                            number(require(s, "eps_tail", path), "space.eps_tail")};
  }
  if (kind == "geometric") {
    reject_unknown(s, {"kind", "p", "eps_tail"}, path);
    return GeometricSpaceSpec{number(require(s, "p", path), "space.p"),
                              number(require(s, "eps_tail", path), "space.eps_tail")};
  }
  if (kind == "square_grid") {
    reject_unknown(s, {"kind", "a", "n", "rule"}, path);
    QuadratureRule rule = QuadratureRule::midpoint;
    if (s.contains("rule")) {
      if (!s.at("rule").is_string()) throw ConfigError("space.rule", "expected a string");
      try {
        rule = parse_quadrature_rule(s.at("rule").get<std::string>());
      } catch (const DomainError& e) {
        throw ConfigError("space.rule", e.what());
      }
    }
    return GridSpaceSpec{number(require(s, "a", path), "space.a"), count(require(s, "n", path), "space.n"), rule};
  }
  throw ConfigError("space.kind", "unknown kind '" + kind + "' (explicit, poisson, geometric, square_grid)");
}

PartitionSpec parse_partition(const json& p) {
  if (!p.is_object()) throw ConfigError("partition", "expected an object");
  reject_unknown(p, {"atoms", "scheme"}, "partition");
  if (p.contains("atoms") == p.contains("scheme")) {
    throw ConfigError("partition", "give exactly one of 'atoms' or 'scheme'");
  }
  if (p.contains("scheme")) {
    const json& v = p.at("scheme");
    if (!v.is_string()) throw ConfigError("partition.scheme", "expected a string");
    const std::string name = v.get<std::string>();
    for (const char* known : {"whole", "singletons", "parity", "multiples_of_3", "columns"}) {
      if (name == known) return name;
    }
    throw ConfigError("partition.scheme", "unknown scheme '" + name + "'");
  }
  const json& atoms = p.at("atoms");
  if (!atoms.is_array()) throw ConfigError("partition.atoms", "expected an array of index arrays");
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const std::string path = "partition.atoms[" + std::to_string(a) + "]";
    if (!atoms[a].is_array()) throw ConfigError(path, "expected an array of point indices");
    std::vector<std::size_t> atom;
    for (std::size_t k = 0; k < atoms[a].size(); ++k) {
      atom.push_back(count(atoms[a][k], path + "[" + std::to_string(k) + "]"));
    }
    out.push_back(std::move(atom));
  }
  return out;
}

FunctionSpec parse_function(const json& v, const std::string& path) {
  if (v.is_string()) {
    const std::string text = v.get<std::string>();
    try {
      (void)expr::parse(text);
    } catch (const ParseError& e) {
      throw ConfigError(path, e.what());
    }
    return text;
  }
  if (v.is_number()) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), number(v, path));
    return std::string(buf.data(), res.ptr);
  }
  if (!v.is_array()) throw ConfigError(path, "expected an expression string or an array of values");
  std::vector<Complex> values;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string item = path + "[" + std::to_string(i) + "]";
    if (v[i].is_array()) {
      if (v[i].size() != 2) throw ConfigError(item, "complex values are [re, im] pairs");
      values.emplace_back(number(v[i][0], item + "[0]"), number(v[i][1], item + "[1]"));
    } else {
      values.emplace_back(number(v[i], item), 0.0);
    }
  }
  return values;
}

json function_json(const FunctionSpec& f) {
  if (const auto* text = std::get_if<std::string>(&f)) return *text;
  json arr = json::array();
  for (const Complex& z : std::get<std::vector<Complex>>(f)) {
    if (z.imag() == 0.0) {
      arr.push_back(z.real());
    } else {
      arr.push_back(json::array({z.real(), z.imag()}));
    }
  }
  return arr;
}

MeasurableFunction materialize(const FunctionSpec& spec, const SpacePtr& space, const std::string& path) {
  try {
    if (const auto* text = std::get_if<std::string>(&spec)) {
      return MeasurableFunction::from_expr(space, expr::parse(*text));
    }
    return MeasurableFunction(space, std::get<std::vector<Complex>>(spec));
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

Config parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  reject_unknown(j, {"space", "partition", "u", "w", "f", "p", "tolerances", "quasi_contraction_n", "oracle", "output",
                     "notes"},
                 "");
  Config c;
  c.space = parse_space(require(j, "space", ""));
  c.partition = parse_partition(require(j, "partition", ""));
  c.u = parse_function(require(j, "u", ""), "u");
  c.w = parse_function(require(j, "w", ""), "w");
  if (j.contains("f")) c.f = parse_function(j.at("f"), "f");
  if (j.contains("p")) {
    c.p = number(j.at("p"), "p");
    if (c.p < 1.0) throw ConfigError("p", "must be >= 1");
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) throw ConfigError("tolerances", "expected an object");
    reject_unknown(t, {"eta", "cluster_tol"}, "tolerances");
    if (t.contains("eta")) c.eta = number(t.at("eta"), "tolerances.eta");
    if (t.contains("cluster_tol")) c.cluster_tol = number(t.at("cluster_tol"), "tolerances.cluster_tol");
    if (c.eta < 0.0) throw ConfigError("tolerances.eta", "must be >= 0");
    if (c.cluster_tol < 0.0) throw ConfigError("tolerances.cluster_tol", "must be >= 0");
  }
  if (j.contains("quasi_contraction_n")) {
    const json& q = j.at("quasi_contraction_n");
    if (!q.is_array()) throw ConfigError("quasi_contraction_n", "expected an array of positive integers");
    c.quasi_contraction_n.clear();
    for (std::size_t i = 0; i < q.size(); ++i) {
      const std::string path = "quasi_contraction_n[" + std::to_string(i) + "]";
      const std::size_t n = count(q[i], path);
      if (n == 0) throw ConfigError(path, "must be >= 1");
      c.quasi_contraction_n.push_back(n);
    }
  }
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    if (!o.is_object()) throw ConfigError("oracle", "expected an object");
    reject_unknown(o, {"enabled", "cap", "seed", "iters"}, "oracle");
    if (o.contains("enabled")) {
      const json& e = o.at("enabled");
      if (e.is_boolean()) {
        c.oracle.mode = e.get<bool>() ? OracleMode::on : OracleMode::off;
      } else if (e.is_string() && e.get<std::string>() == "auto") {
        c.oracle.mode = OracleMode::automatic;
      } else {
        throw ConfigError("oracle.enabled", "expected true, false or \"auto\"");
      }
    }
    if (o.contains("cap")) {
      c.oracle.cap = count(o.at("cap"), "oracle.cap");
      if (c.oracle.cap == 0 || c.oracle.cap > 256) throw ConfigError("oracle.cap", "must lie in [1, 256]");
    }
    if (o.contains("seed")) c.oracle.seed = count(o.at("seed"), "oracle.seed");
    if (o.contains("iters")) {
      const std::size_t iters = count(o.at("iters"), "oracle.iters");
      if (iters == 0 || iters > 100000) throw ConfigError("oracle.iters", "must lie in [1, 100000]");
      c.oracle.iters = static_cast<int>(iters);
    }
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    if (!o.is_object()) throw ConfigError("output", "expected an object");
    reject_unknown(o, {"report", "trace"}, "output");
    if (o.contains("report")) {
      if (!o.at("report").is_string()) throw ConfigError("output.report", "expected a path string");
      c.report_path = o.at("report").get<std::string>();
    }
    if (o.contains("trace")) {
      if (!o.at("trace").is_string()) throw ConfigError("output.trace", "expected a path string");
      c.trace_path = o.at("trace").get<std::string>();
    }
  }
  if (j.contains("notes")) {
    const json& n = j.at("notes");
    if (!n.is_array()) throw ConfigError("notes", "expected an array of strings");
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (!n[i].is_string()) throw ConfigError("notes[" + std::to_string(i) + "]", "expected a string");
      c.notes.push_back(n[i].get<std::string>());
    }
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("", path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                              ": JSON syntax error");
  }
  return parse_config(j);
}

nlohmann::ordered_json to_json(const Config& c) {
  nlohmann::ordered_json j;
  std::visit(
      [&j](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ExplicitSpaceSpec>) {
          j["space"] = {{"kind", "explicit"}, {"masses", s.masses}};
          if (!s.x.empty()) j["space"]["x"] = s.x;
          if (!s.y.empty()) j["space"]["y"] = s.y;
        } else if constexpr (std::is_same_v<T, PoissonSpaceSpec>) {
          j["space"] = {{"kind", "poisson"}, {"theta", s.theta}, {"eps_tail", s.eps_tail}};
        } else if constexpr (std::is_same_v<T, GeometricSpaceSpec>) {
          j["space"] = {{"kind", "geometric"}, {"p", s.p}, {"eps_tail", s.eps_tail}};
        } else {
          j["space"] = {{"kind", "square_grid"}, {"a", s.a}, {"n", s.n}, {"rule", std::string(to_string(s.rule))}};
        }
      },
      c.space);
  if (const auto* scheme = std::get_if<std::string>(&c.partition)) {
    j["partition"] = {{"scheme", *scheme}};
  } else {
    j["partition"] = {{"atoms", std::get<std::vector<std::vector<std::size_t>>>(c.partition)}};
  }
  j["u"] = function_json(c.u);
  j["w"] = function_json(c.w);
  if (c.f) j["f"] = function_json(*c.f);
  j["p"] = c.p;
  j["tolerances"] = {{"eta", c.eta}, {"cluster_tol", c.cluster_tol}};
  j["quasi_contraction_n"] = c.quasi_contraction_n;
  const char* mode = c.oracle.mode == OracleMode::automatic ? "auto" : nullptr;
  if (mode) {
    j["oracle"]["enabled"] = "auto";
  } else {
    j["oracle"]["enabled"] = c.oracle.mode == OracleMode::on;
  }
  j["oracle"]["cap"] = c.oracle.cap;
  j["oracle"]["seed"] = c.oracle.seed;
  j["oracle"]["iters"] = c.oracle.iters;
  if (!c.report_path.empty()) j["output"]["report"] = c.report_path;
  if (!c.trace_path.empty()) j["output"]["trace"] = c.trace_path;
  if (!c.notes.empty()) j["notes"] = c.notes;
  return j;
}

Problem build_problem(const Config& c) {
  SpacePtr space;
  std::optional<Partition> grid_columns;
  try {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, ExplicitSpaceSpec>) {
            const std::size_t n = s.masses.size();
            if (!s.x.empty() && s.x.size() != n) throw ConfigError("space.x", "needs one entry per mass");
            if (!s.y.empty() && s.y.size() != n) throw ConfigError("space.y", "needs one entry per mass");
            const int dim = s.y.empty() ? (s.x.empty() ? 0 : 1) : 2;
            std::vector<Coord> coords;
            if (dim > 0) {
              for (std::size_t i = 0; i < n; ++i) coords.push_back({s.x[i], dim == 2 ? s.y[i] : 0.0});
            }
            space = std::make_shared<const MeasureSpace>(s.masses, dim, std::move(coords));
          } else if constexpr (std::is_same_v<T, PoissonSpaceSpec>) {
            space = truncate_discrete(PoissonFamily{s.theta}, s.eps_tail);
          } else if constexpr (std::is_same_v<T, GeometricSpaceSpec>) {
            space = truncate_discrete(GeometricFamily{s.p}, s.eps_tail);
          } else {
            GridSpace g = square_grid(s.a, s.n, s.rule);
            space = g.space;
            grid_columns = g.columns;
          }
        },
        c.space);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("space", e.what());
  }

  std::optional<Partition> part;
  try {
    if (const auto* scheme = std::get_if<std::string>(&c.partition)) {
      if (*scheme == "whole") {
        part = Partition::whole(space);
      } else if (*scheme == "singletons") {
        part = Partition::singletons(space);
      } else if (*scheme == "parity") {
        part = examples::parity_partition(space);
      } else if (*scheme == "multiples_of_3") {
        part = examples::multiples_of_three_partition(space);
      } else {
        if (!grid_columns) throw ConfigError("partition.scheme", "'columns' needs a square_grid space");
        part = *grid_columns;
      }
    } else {
      part = Partition(space, std::get<std::vector<std::vector<std::size_t>>>(c.partition));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("partition", e.what());
  }

  MeasurableFunction u = materialize(c.u, space, "u");
  MeasurableFunction w = materialize(c.w, space, "w");
  std::optional<MeasurableFunction> f;
  if (c.f) f = materialize(*c.f, space, "f");
  try {
    return Problem{space, WctOperator(std::move(u), std::move(w), std::move(*part), c.p), std::move(f)};
  } catch (const Error& e) {
    throw ConfigError("p", e.what());
  }
}

}  // namespace wct::cli
