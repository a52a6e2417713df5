#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wct/analysis.hpp"
#include "wct/cli/config.hpp"
#include "wct/oracle.hpp"

namespace wct::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitMarginal = 2;
inline constexpr int kExitVerificationFailure = 3;

inline constexpr const char* kTraceHeader = "n,power_norm,oracle_lower_bound,ratio";

nlohmann::ordered_json complex_json(Complex z);

/// Report for one configured operator; `oracle_ok` is cleared when the dense
/// cross-check disagrees with the closed forms.
nlohmann::ordered_json analysis_report(const Config& config, const Problem& problem, bool& oracle_ok);

/// Writes the JSON report to `report_path` (or config.output.report, or `out`).
int cmd_analyze(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& report_path,
                std::ostream& out, std::ostream& err);

void write_trace_csv(const std::vector<oracle::TraceRow>& rows, std::ostream& out);

int cmd_iterate(const std::filesystem::path& config_path, std::size_t n_max,
                const std::optional<std::filesystem::path>& csv_path, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  std::uint64_t seed = 42;
  std::size_t instances = 100;
  std::size_t size = 64;
  bool sabotage = false;
  unsigned threads = 0;
};

/// Outcome of the full check battery on one operator.
nlohmann::ordered_json check_instance(const WctOperator& t, std::uint64_t seed, bool sabotage, bool& pass,
                                      bool& oracle_failure);

/// Runs the battery over a seeded random corpus; returns the report and sets
/// `exit_code` (0 all pass, 3 any failure).
nlohmann::ordered_json run_verify(const VerifyOptions& opts, int& exit_code);

int cmd_verify(const VerifyOptions& opts, const std::optional<std::filesystem::path>& report_path, std::ostream& out,
               std::ostream& err);

struct ExampleRequest {
  std::string name;
  std::optional<double> theta;
  std::optional<double> geometric_p;
  std::optional<double> a;
  std::optional<std::size_t> n;
  std::optional<std::string> rule;
  std::optional<std::string> u;
  std::optional<std::string> w;
  std::optional<double> eps_tail;
};

/// Config reproducing one of the three example families, with its notes.
Config example_config(const ExampleRequest& req);

int cmd_examples_list(std::ostream& out);
int cmd_examples_write(const ExampleRequest& req, const std::optional<std::filesystem::path>& path, std::ostream& out,
                       std::ostream& err);

/// Dense matrix as CSV rows `row,col,re,im` (nonzero entries only).
int cmd_matrix(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& csv_path,
               std::ostream& out, std::ostream& err);

}  // namespace wct::cli
