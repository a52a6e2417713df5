#include "wct/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>

#include "wct/examples.hpp"
#include "wct/expr.hpp"

namespace wct::cli {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kPsdExclusion = 1e-6;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ojson p_conj_json(double q) { return std::isinf(q) ? ojson("inf") : ojson(q); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output", "cannot write " + path.string());
  out << text;
}

bool outside_boundary(double s) { return std::abs(s - 1.0) > kPsdExclusion; }

ojson classification_json(const ClassificationReport& r) {
  ojson c;
  c["power_bounded"] = to_string(r.power_bounded);
  ojson qc = ojson::object();
  for (const auto& [n, v] : r.quasi_contraction) qc[std::to_string(n)] = to_string(v);
  c["quasi_contraction"] = qc;
  c["convergent"] = to_string(r.convergent());
  c["uniformly_stable"] = to_string(r.uniformly_stable());
  c["strongly_stable"] = to_string(r.strongly_stable());
  c["weakly_stable"] = to_string(r.weakly_stable());
  c["uniformly_exponentially_stable"] = to_string(r.uniformly_exponentially_stable());
  if (r.exponential) {
    c["exponential_constants"] = {{"M", r.exponential->m}, {"epsilon", r.exponential->epsilon}};
  } else {
    c["exponential_constants"] = nullptr;
  }
  c["marginal"] = r.any_marginal();
  return c;
}

ojson oracle_json(const Config& config, const Problem& problem, const ClassificationReport& report, bool& ok) {
  const WctOperator& t = problem.op;
  const std::size_t n = t.space()->size();
  ojson o;
  if (config.oracle.mode == OracleMode::off) {
    o["status"] = "disabled";
    return o;
  }
  if (n > config.oracle.cap) {
    if (config.oracle.mode == OracleMode::on) {
      throw ConfigError("oracle.enabled", "space has " + std::to_string(n) + " points, above the oracle cap " +
                                              std::to_string(config.oracle.cap));
    }
    o["status"] = "skipped";
    o["reason"] = "space has " + std::to_string(n) + " points, above the oracle cap " + std::to_string(config.oracle.cap);
    return o;
  }
  o["status"] = "ran";
  o["seed"] = config.oracle.seed;

  const double s = report.sup_symbol;
  try {
    const oracle::SpectrumMatch sm = oracle::compare_spectrum(t, 1e-8 * std::max(1.0, s));
    o["spectrum"] = {{"pass", sm.pass}, {"max_error", sm.max_error}, {"nonzero_eigenvalues", sm.nonzero_eigenvalues}};
    ok = ok && sm.pass;

    const double norm = report.operator_norm;
    const double lower = oracle::induced_norm_lower_bound(t, t.p(), config.oracle.iters, config.oracle.seed);
    const bool lower_ok = lower <= norm * (1.0 + 1e-12) + 1e-300 && lower >= norm * (1.0 - 1e-6);
    ojson norm_j{{"closed_form", norm}, {"induced_lower_bound", lower}, {"lower_bound_pass", lower_ok}};
    ok = ok && lower_ok;
    if (t.p() == 2.0) {
      const double dense = oracle::weighted_spectral_norm(to_matrix(t, config.oracle.cap));
      const bool dense_ok = std::abs(dense - norm) <= 1e-8 * std::max(1.0, norm);
      norm_j["dense_singular_value"] = dense;
      norm_j["dense_pass"] = dense_ok;
      ok = ok && dense_ok;

      ojson psd = ojson::array();
      for (std::size_t k : config.quasi_contraction_n) {
        const oracle::PsdResult pr = oracle::quasi_contraction_psd(t, k);
        const TriState claimed = report.quasi_contraction_n(k);
        const bool comparable = outside_boundary(s) && claimed != TriState::marginal;
        const bool agree = !comparable || pr.verdict == claimed;
        ok = ok && agree;
        psd.push_back({{"n", k},
                       {"verdict", to_string(pr.verdict)},
                       {"min_eigenvalue", pr.min_eigenvalue},
                       {"scale", pr.scale},
                       {"compared", comparable},
                       {"agree", agree}});
      }
      o["quasi_contraction"] = psd;
    }
    o["norm"] = norm_j;
  } catch (const OracleError& e) {
    ok = false;
    o["error"] = e.what();
  }
  o["agree"] = ok;
  return o;
}

}  // namespace

ojson complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

ojson analysis_report(const Config& config, const Problem& problem, bool& oracle_ok) {
  const WctOperator& t = problem.op;
  ClassifyOptions opts;
  opts.eta = config.eta;
  opts.n_list = config.quasi_contraction_n;
  opts.cluster_tol = config.cluster_tol;
  const ClassificationReport report = classify(t, opts);

  ojson j;
  j["tool"] = "wct";
  j["version"] = kToolVersion;
  j["space"] = {{"points", t.space()->size()},
                {"total_mass", t.space()->total_mass()},
                {"tail_bound", t.space()->tail_bound()},
                {"atoms", t.partition().atom_count()}};
  j["p"] = t.p();
  j["p_conj"] = p_conj_json(t.p_conj());
  j["tolerances"] = {{"eta", config.eta}, {"cluster_tol", config.cluster_tol}};
  j["seed"] = config.oracle.seed;

  ojson atoms = ojson::array();
  const Symbol& g = t.symbol();
  for (std::size_t a = 0; a < g.atom_values.size(); ++a) {
    atoms.push_back({{"atom", a},
                     {"size", t.partition().atom(a).size()},
                     {"mass", g.atom_masses[a]},
                     {"value", complex_json(g.atom_values[a])},
                     {"abs", std::abs(g.atom_values[a])},
                     {"bound", t.atom_bounds()[a]}});
  }
  j["symbol"] = {{"atoms", atoms}, {"sup_abs", g.sup_abs}};
  ojson spec = ojson::array();
  for (const Complex& z : report.spectrum) spec.push_back(complex_json(z));
  j["spectrum"] = spec;
  j["spectral_radius"] = report.spectral_radius;
  j["operator_norm"] = report.operator_norm;
  j["classification"] = classification_json(report);

  if (problem.f) {
    const MeasurableFunction tf = apply(t, *problem.f);
    ojson image = ojson::array();
    for (const Complex& z : tf.values()) image.push_back(complex_json(z));
    j["test_vector"] = {{"norm_p", problem.f->p_norm(t.p())}, {"image_norm_p", tf.p_norm(t.p())}, {"image", image}};
  }
  oracle_ok = true;
  j["oracle"] = oracle_json(config, problem, report, oracle_ok);
  j["notes"] = config.notes;
  return j;
}

int cmd_analyze(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& report_path,
                std::ostream& out, std::ostream& err) {
  try {
    const Config config = load_config(config_path);
    const Problem problem = build_problem(config);
    bool oracle_ok = true;
    const ojson report = analysis_report(config, problem, oracle_ok);
    const std::string text = report.dump(2) + "\n";
    std::optional<std::filesystem::path> dest = report_path;
    if (!dest && !config.report_path.empty()) dest = config.report_path;
    if (dest) {
      write_text(*dest, text);
    } else {
      out << text;
    }
    if (!oracle_ok) {
      err << "oracle cross-check disagrees with the closed forms\n";
      return kExitVerificationFailure;
    }
    return report["classification"]["marginal"].get<bool>() ? kExitMarginal : kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

void write_trace_csv(const std::vector<oracle::TraceRow>& rows, std::ostream& out) {
  out << kTraceHeader << "\n";
  for (const oracle::TraceRow& r : rows) {
    out << r.n << ',' << format_double(r.power_norm) << ',' << format_double(r.oracle_lower_bound) << ',';
    if (r.ratio) out << format_double(*r.ratio);
    out << "\n";
  }
}

int cmd_iterate(const std::filesystem::path& config_path, std::size_t n_max,
                const std::optional<std::filesystem::path>& csv_path, std::ostream& out, std::ostream& err) {
  try {
    if (n_max < 1 || n_max > 200) throw ConfigError("--n-max", "must lie in [1, 200]");
    const Config config = load_config(config_path);
    const Problem problem = build_problem(config);
    const auto rows = oracle::power_growth_trace(problem.op, n_max, config.oracle.iters, config.oracle.seed);
    std::optional<std::filesystem::path> dest = csv_path;
    if (!dest && !config.trace_path.empty()) dest = config.trace_path;
    if (dest) {
      std::ofstream file(*dest, std::ios::binary);
      if (!file) throw ConfigError("--csv", "cannot write " + dest->string());
      write_trace_csv(rows, file);
    } else {
      write_trace_csv(rows, out);
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

ojson check_instance(const WctOperator& t, std::uint64_t seed, bool sabotage, bool& pass, bool& oracle_failure) {
  pass = true;
  oracle_failure = false;
  ojson checks;
  const double s = t.symbol().sup_abs;
  try {
    // Spectrum versus dense eigenvalues.
    const oracle::SpectrumMatch sm = oracle::compare_spectrum(t, 1e-8);
    checks["spectrum"] = {{"pass", sm.pass}, {"max_error", sm.max_error}};
    pass = pass && sm.pass;

    // Classification versus the PSD form for n = 1, 2, 3.
    ClassifyOptions opts;
    opts.n_list = {1, 2, 3};
    const ClassificationReport report = detail::classify_at(t, opts, sabotage ? 0.5 : 1.0);
    bool psd_pass = true;
    ojson verdicts = ojson::array();
    if (outside_boundary(s)) {
      for (std::size_t n : opts.n_list) {
        const oracle::PsdResult pr = oracle::quasi_contraction_psd(t, n);
        psd_pass = psd_pass && pr.verdict == report.quasi_contraction_n(n);
        verdicts.push_back(to_string(pr.verdict));
      }
    }
    checks["quasi_contraction"] = {{"pass", psd_pass}, {"classified", to_string(report.power_bounded)},
                                   {"oracle", verdicts}, {"compared", outside_boundary(s)}};
    pass = pass && psd_pass;

    // Norm formula versus the dense singular value and the Holder search.
    const double norm = operator_norm(t);
    const double dense = oracle::weighted_spectral_norm(to_matrix(t));
    bool norm_pass = std::abs(dense - norm) <= 1e-8 * std::max(1.0, norm);
    ojson lower = ojson::object();
    for (double p : {1.0, 1.5, 3.0}) {
      const WctOperator tp(t.u(), t.w(), t.partition(), p);
      const double np = operator_norm(tp);
      const double lb = oracle::induced_norm_lower_bound(tp, p, 8, seed);
      const bool ok = lb <= np * (1.0 + 1e-12) && lb >= np * (1.0 - 1e-6);
      norm_pass = norm_pass && ok;
      lower[format_double(p)] = {{"closed_form", np}, {"lower_bound", lb}};
    }
    checks["norm"] = {{"pass", norm_pass}, {"closed_form", norm}, {"dense", dense}, {"lower_bounds", lower}};
    pass = pass && norm_pass;

    // Power factorization versus repeated application.
    std::mt19937_64 rng(seed);
    const MeasurableFunction f = oracle::random_function(rng, t.space(), true);
    MeasurableFunction iter = f;
    double worst = 0.0;
    const double fnorm = f.p_norm(t.p());
    for (std::size_t n = 1; n <= 20; ++n) {
      iter = apply(t, iter);
      const double scale = std::max(1.0, iter.p_norm(t.p())) + fnorm;
      worst = std::max(worst, (power_apply(t, n, f) - iter).p_norm(t.p()) / scale);
    }
    const bool fact_pass = worst <= 1e-10;
    checks["factorization"] = {{"pass", fact_pass}, {"max_relative_error", worst}};
    pass = pass && fact_pass;

    // Adjoint: matrix identity and classification invariance.
    const WctOperator adj = adjoint(t);
    const DenseMatrix m = to_matrix(t);
    const double adj_err = (to_matrix(adj).entries - m.weighted_adjoint().entries).cwiseAbs().maxCoeff();
    const ClassificationReport ra = detail::classify_at(adj, opts, sabotage ? 0.5 : 1.0);
    const bool adj_pass = adj_err <= 1e-10 * std::max(1.0, m.entries.cwiseAbs().maxCoeff()) &&
                          ra.power_bounded == report.power_bounded && ra.stability == report.stability;
    checks["adjoint"] = {{"pass", adj_pass}, {"max_entry_error", adj_err}};
    pass = pass && adj_pass;
  } catch (const OracleError& e) {
    pass = false;
    oracle_failure = true;
    checks["error"] = e.what();
  }
  return checks;
}

ojson run_verify(const VerifyOptions& opts, int& exit_code) {
  if (opts.size < 1 || opts.size > oracle::kOracleCap) throw ConfigError("--size", "must lie in [1, 256]");
  std::vector<ojson> results(opts.instances);
  std::vector<char> passes(opts.instances, 0);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t i = next++; i < opts.instances; i = next++) {
      std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32U),
                        static_cast<std::uint32_t>(i)};
      std::mt19937_64 rng(seq);
      oracle::CorpusOptions corpus;
      corpus.min_points = opts.size;
      corpus.max_points = opts.size;
      const WctOperator t = oracle::random_instance(rng, corpus);
      bool pass = false;
      bool oracle_failure = false;
      ojson checks = check_instance(t, rng(), opts.sabotage, pass, oracle_failure);
      passes[i] = pass ? 1 : 0;
      results[i] = {{"index", i},
                    {"points", t.space()->size()},
                    {"atoms", t.partition().atom_count()},
                    {"sup_symbol", t.symbol().sup_abs},
                    {"pass", pass},
                    {"oracle_failure", oracle_failure},
                    {"checks", std::move(checks)}};
    }
  };
  unsigned threads = opts.threads ? opts.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, opts.instances)));
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  const bool all_pass = std::all_of(passes.begin(), passes.end(), [](char c) { return c != 0; });
  ojson j;
  j["tool"] = "wct";
  j["version"] = kToolVersion;
  j["seed"] = opts.seed;
  j["instances"] = opts.instances;
  j["size"] = opts.size;
  j["sabotage"] = opts.sabotage;
  j["all_pass"] = all_pass;
  j["failures"] = std::count(passes.begin(), passes.end(), 0);
  j["results"] = results;
  exit_code = all_pass ? kExitOk : kExitVerificationFailure;
  return j;
}

int cmd_verify(const VerifyOptions& opts, const std::optional<std::filesystem::path>& report_path, std::ostream& out,
               std::ostream& err) {
  try {
    int code = kExitOk;
    const ojson report = run_verify(opts, code);
    const std::string text = report.dump(2) + "\n";
    if (report_path) {
      write_text(*report_path, text);
    } else {
      out << text;
    }
    if (code != kExitOk) {
      err << report["failures"].get<std::size_t>() << " of " << opts.instances << " instances failed\n";
    }
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

Config example_config(const ExampleRequest& req) {
  Config c;
  const double eps = req.eps_tail.value_or(1e-12);
  examples::ExampleInstance inst = [&]() {
    if (req.name == "a_poisson") {
      const double theta = req.theta.value_or(1.0);
      c.u = req.u.value_or("x");
      c.w = req.w.value_or("1");
      c.space = PoissonSpaceSpec{theta, eps};
      c.partition = std::string("parity");
      return examples::build_example_a(theta, expr::parse(std::get<std::string>(c.u)),
                                       expr::parse(std::get<std::string>(c.w)), eps);
    }
    if (req.name == "b_geometric") {
      const double p = req.geometric_p.value_or(0.5);
      c.u = req.u.value_or("1");
      c.w = req.w.value_or("1");
      c.space = GeometricSpaceSpec{p, eps};
      c.partition = std::string("multiples_of_3");
      return examples::build_example_b(p, expr::parse(std::get<std::string>(c.u)),
                                       expr::parse(std::get<std::string>(c.w)), eps);
    }
    if (req.name == "c_square") {
      const double a = req.a.value_or(1.0);
      const std::size_t n = req.n.value_or(64);
      const QuadratureRule rule = parse_quadrature_rule(req.rule.value_or("midpoint"));
      c.u = req.u.value_or("exp(x+y)");
      c.w = req.w.value_or("1");
      c.space = GridSpaceSpec{a, n, rule};
      c.partition = std::string("columns");
      return examples::build_example_c(a, expr::parse(std::get<std::string>(c.u)),
                                       expr::parse(std::get<std::string>(c.w)), n, rule);
    }
    throw ConfigError("name", "unknown example '" + req.name + "' (a_poisson, b_geometric, c_square)");
  }();
  c.notes.push_back("example " + inst.name);
  for (const auto& note : inst.notes) c.notes.push_back(note);
  for (const auto& k : inst.expected_constants) {
    std::string line = "reference " + k.label + " = " + format_double(k.value.real());
    if (k.value.imag() != 0.0) line += " + " + format_double(k.value.imag()) + "i";
    c.notes.push_back(line);
  }
  return c;
}

int cmd_examples_list(std::ostream& out) {
  out << "a_poisson    Poisson(theta) on {0,1,2,...}, atoms {0}, odds, evens   (--theta, --eps-tail)\n"
      << "b_geometric  geometric(p) on {1,2,...}, atoms {3n}, complement       (--p, --eps-tail)\n"
      << "c_square     [0,a]^2 quadrature grid, atoms are x-columns             (--a, --n, --rule)\n";
  return kExitOk;
}

int cmd_examples_write(const ExampleRequest& req, const std::optional<std::filesystem::path>& path,
                       std::ostream& out, std::ostream& err) {
  try {
    const std::string text = to_json(example_config(req)).dump(2) + "\n";
    if (path) {
      write_text(*path, text);
    } else {
      out << text;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int cmd_matrix(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& csv_path,
               std::ostream& out, std::ostream& err) {
  try {
    const Config config = load_config(config_path);
    const Problem problem = build_problem(config);
    DenseMatrix m;
    try {
      m = to_matrix(problem.op, config.oracle.cap);
    } catch (const SizeError& e) {
      throw ConfigError("oracle.cap", e.what());
    }
    std::ofstream file;
    if (csv_path) {
      file.open(*csv_path, std::ios::binary);
      if (!file) throw ConfigError("--csv", "cannot write " + csv_path->string());
    }
    std::ostream& dest = csv_path ? file : out;
    dest << "row,col,re,im\n";
    for (Eigen::Index i = 0; i < m.dim(); ++i) {
      for (Eigen::Index k = 0; k < m.dim(); ++k) {
        const Complex z = m.entries(i, k);
        if (z == Complex{}) continue;
        dest << i << ',' << k << ',' << format_double(z.real()) << ',' << format_double(z.imag()) << "\n";
      }
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace wct::cli
