#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wct/cli/commands.hpp"

namespace {

template <typename T>
std::optional<T> opt_if(const CLI::Option* o, const T& value) {
  return o->count() ? std::optional<T>(value) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace wct::cli;
  CLI::App app{"Weighted conditional type operators: symbol, spectrum, power norms and stability"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string config_path;
  std::string out_path;

  auto* analyze = app.add_subcommand("analyze", "Classify the operator described by a config file");
  analyze->add_option("config", config_path, "Config JSON")->required();
  auto* analyze_out = analyze->add_option("-o,--report", out_path, "Report path (default: config output.report or stdout)");

  std::size_t n_max = 50;
  auto* iterate = app.add_subcommand("iterate", "Trace ||T^n|| next to its oracle lower bound");
  iterate->add_option("config", config_path, "Config JSON")->required();
  iterate->add_option("--n-max", n_max, "Largest power (<= 200)")->capture_default_str();
  auto* iterate_out = iterate->add_option("--csv", out_path, "CSV path (default: config output.trace or stdout)");

  VerifyOptions vopts;
  auto* verify = app.add_subcommand("verify", "Run the theorem check battery on a random corpus");
  verify->add_option("--seed", vopts.seed, "Corpus seed")->capture_default_str();
  verify->add_option("--instances", vopts.instances, "Number of instances")->capture_default_str();
  verify->add_option("--size", vopts.size, "Points per instance (<= 256)")->capture_default_str();
  verify->add_option("--threads", vopts.threads, "Worker threads (0: hardware)");
  verify->add_flag("--sabotage", vopts.sabotage, "Harness self-test: classify against a wrong threshold")
      ->group("");
  auto* verify_out = verify->add_option("--report", out_path, "Report path (default: stdout)");

  auto* examples = app.add_subcommand("examples", "List or materialize the example families");
  examples->require_subcommand(1);
  examples->add_subcommand("list", "List example families");
  ExampleRequest req;
  double theta = 1.0, geo_p = 0.5, side = 1.0, eps_tail = 1e-12;
  std::size_t grid_n = 64;
  std::string rule, u_text, w_text;
  auto* write = examples->add_subcommand("write", "Write a config for one example family");
  write->add_option("name", req.name, "a_poisson | b_geometric | c_square")->required();
  auto* o_theta = write->add_option("--theta", theta, "Poisson parameter");
  auto* o_p = write->add_option("--p", geo_p, "Geometric parameter");
  auto* o_a = write->add_option("--a", side, "Square side");
  auto* o_n = write->add_option("--n", grid_n, "Grid nodes per axis");
  auto* o_rule = write->add_option("--rule", rule, "midpoint | trapezoid");
  auto* o_u = write->add_option("--u", u_text, "Expression for u");
  auto* o_w = write->add_option("--w", w_text, "Expression for w");
  auto* o_eps = write->add_option("--eps-tail", eps_tail, "Truncation tail mass");
  auto* write_out = write->add_option("-o,--out", out_path, "Config path (default: stdout)");

  auto* matrix = app.add_subcommand("matrix", "Export the dense matrix of the operator as CSV");
  matrix->add_option("config", config_path, "Config JSON")->required();
  auto* matrix_out = matrix->add_option("--csv", out_path, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  using path = std::filesystem::path;
  if (analyze->parsed()) return cmd_analyze(config_path, opt_if<path>(analyze_out, out_path), std::cout, std::cerr);
  if (iterate->parsed()) {
    return cmd_iterate(config_path, n_max, opt_if<path>(iterate_out, out_path), std::cout, std::cerr);
  }
  if (verify->parsed()) return cmd_verify(vopts, opt_if<path>(verify_out, out_path), std::cout, std::cerr);
  if (matrix->parsed()) return cmd_matrix(config_path, opt_if<path>(matrix_out, out_path), std::cout, std::cerr);
  if (write->parsed()) {
    req.theta = opt_if(o_theta, theta);
    req.geometric_p = opt_if(o_p, geo_p);
    req.a = opt_if(o_a, side);
    req.n = opt_if(o_n, grid_n);
    req.rule = opt_if(o_rule, rule);
    req.u = opt_if(o_u, u_text);
    req.w = opt_if(o_w, w_text);
    req.eps_tail = opt_if(o_eps, eps_tail);
    return cmd_examples_write(req, opt_if<path>(write_out, out_path), std::cout, std::cerr);
  }
  return cmd_examples_list(std::cout);
}
