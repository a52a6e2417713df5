#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wct/error.hpp"
#include "wct/measure.hpp"
#include "wct/operator.hpp"

namespace wct::cli {

/// Invalid configuration; `field` is a dotted path such as "space.theta".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : "field '" + field + "': " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ExplicitSpaceSpec {
  std::vector<double> masses;
  std::vector<double> x;
  std::vector<double> y;
};

struct PoissonSpaceSpec {
  double theta;
  double eps_tail;
};

struct GeometricSpaceSpec {
  double p;
  double eps_tail;
};

struct GridSpaceSpec {
  double a;
  std::size_t n;
  QuadratureRule rule;
};

using SpaceSpec = std::variant<ExplicitSpaceSpec, PoissonSpaceSpec, GeometricSpaceSpec, GridSpaceSpec>;

/// Explicit atoms or one of: whole, singletons, parity, multiples_of_3, columns.
using PartitionSpec = std::variant<std::vector<std::vector<std::size_t>>, std::string>;

/// Expression text or tabulated values.
using FunctionSpec = std::variant<std::string, std::vector<Complex>>;

enum class OracleMode { automatic, on, off };

struct OracleSettings {
  OracleMode mode = OracleMode::automatic;
  std::size_t cap = 256;
  std::uint64_t seed = 0;
  int iters = 16;
};

struct Config {
  SpaceSpec space;
  PartitionSpec partition;
  FunctionSpec u;
  FunctionSpec w;
  std::optional<FunctionSpec> f;
  double p = 2.0;
  double eta = 1e-9;
  double cluster_tol = 0.0;
  std::vector<std::size_t> quasi_contraction_n{1, 2, 3};
  OracleSettings oracle;
  std::string report_path;
  std::string trace_path;
  std::vector<std::string> notes;
};

Config parse_config(const nlohmann::json& j);

/// Reads and validates a config file. Parse errors carry line:column.
Config load_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const Config& c);

/// Everything a command needs, materialized from a Config.
struct Problem {
  SpacePtr space;
  WctOperator op;
  std::optional<MeasurableFunction> f;
};

/// Builds the space, partition and functions; failures become ConfigError
/// naming the offending field.
Problem build_problem(const Config& c);

}  // namespace wct::cli
