#include "ivar/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ivar/bench.hpp"
#include "ivar/design.hpp"
#include "ivar/io.hpp"

namespace ivar {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <class T>
void take(const json& j, T& field) {
  field = j.get<T>();
}

template <class T>
void take(const json& j, std::optional<T>& field) {
  if (j.is_null())
    field.reset();
  else
    field = j.get<T>();
}

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["domain"] = c.domain;
  j["kernel"] = c.kernel;
  j["strategy"] = c.strategy;
  j["n"] = c.n;
  j["batch"] = c.batch;
  put(j, "nugget", c.nugget);
  j["n_mc"] = c.n_mc;
  j["restarts"] = c.restarts;
  put(j, "max_iterations", c.max_iterations);
  put(j, "gradient_tolerance", c.gradient_tolerance);
  put(j, "objective_tolerance", c.objective_tolerance);
  j["candidates"] = c.candidates;
  j["sizes"] = c.sizes;
  j["strategies"] = c.strategies;
  j["draws"] = c.draws;
  j["test_points"] = c.test_points;
  j["grid"] = c.grid;
  j["function"] = c.function;
  j["total"] = c.total;
  j["extended"] = c.extended;
  j["hyper_restarts"] = c.hyper_restarts;
  j["error_samples"] = c.error_samples;
  j["nodes"] = c.nodes;
  j["terms"] = c.terms;
  j["decay"] = c.decay;
  j["max_index"] = c.max_index;
  j["configs"] = c.configs;
  return j;
}

void apply_json(RunConfig& c, const json& j) {
  require(j.is_object(), "config file must hold a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "command") take(v, c.command);
      else if (key == "seed") take(v, c.seed);
      else if (key == "out_dir") take(v, c.out_dir);
      else if (key == "domain") take(v, c.domain);
      else if (key == "kernel") take(v, c.kernel);
      else if (key == "strategy") take(v, c.strategy);
      else if (key == "n") take(v, c.n);
      else if (key == "batch") take(v, c.batch);
      else if (key == "nugget") take(v, c.nugget);
      else if (key == "n_mc") take(v, c.n_mc);
      else if (key == "restarts") take(v, c.restarts);
      else if (key == "max_iterations") take(v, c.max_iterations);
      else if (key == "gradient_tolerance") take(v, c.gradient_tolerance);
      else if (key == "objective_tolerance") take(v, c.objective_tolerance);
      else if (key == "candidates") take(v, c.candidates);
      else if (key == "sizes") take(v, c.sizes);
      else if (key == "strategies") take(v, c.strategies);
      else if (key == "draws") take(v, c.draws);
      else if (key == "test_points") take(v, c.test_points);
      else if (key == "grid") take(v, c.grid);
      else if (key == "function") take(v, c.function);
      else if (key == "total") take(v, c.total);
      else if (key == "extended") take(v, c.extended);
      else if (key == "hyper_restarts") take(v, c.hyper_restarts);
      else if (key == "error_samples") take(v, c.error_samples);
      else if (key == "nodes") take(v, c.nodes);
      else if (key == "terms") take(v, c.terms);
      else if (key == "decay") take(v, c.decay);
      else if (key == "max_index") take(v, c.max_index);
      else if (key == "configs") take(v, c.configs);
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

namespace {

std::vector<std::string> format_all(const std::vector<double>& v) {
  std::vector<std::string> out;
  for (double x : v) out.push_back(format_double(x));
  return out;
}

OptimizerConfig optimizer_config(const RunConfig& c) {
  OptimizerConfig o;
  o.seed = c.seed;
  o.restarts = c.restarts;
  o.batch_size = c.batch;
  o.max_iterations = c.max_iterations.value_or(o.max_iterations);
  o.gradient_tolerance = c.gradient_tolerance.value_or(o.gradient_tolerance);
  o.objective_tolerance = c.objective_tolerance.value_or(o.objective_tolerance);
  return o;
}

void fill_defaults(RunConfig& c) {
  const std::string& cmd = c.command;
  if (cmd == "design" || cmd == "compare") {
    if (c.domain.empty()) c.domain = "ball2d";
    if (c.kernel.empty()) c.kernel = "se:l=0.2";
    if (!c.nugget) c.nugget = kDefaultNugget;
  } else if (cmd == "lebesgue") {
    if (c.domain.empty()) c.domain = "interval";
    if (c.kernel.empty()) c.kernel = "se:l=0.2";
    if (!c.nugget) c.nugget = 1e-14;
    if (!c.gradient_tolerance) c.gradient_tolerance = 1e-18;
    if (!c.objective_tolerance) c.objective_tolerance = 1e-22;
    if (!c.max_iterations) c.max_iterations = 1000;
    if (c.sizes.empty())
      for (int n = 1; n <= 30; ++n) c.sizes.push_back(n);
  } else if (cmd == "spectrum") {
    if (!c.nugget) c.nugget = 0.0;
  } else if (cmd == "adapt") {
    if (c.kernel.empty()) c.kernel = "mehler:t=0.5";
    if (!c.nugget) c.nugget = 1e-6;
  }
  if (cmd == "compare") {
    if (c.sizes.empty()) c.sizes = {8, 12, 20};
    if (c.strategies.empty()) c.strategies = {"ivar", "ivar-greedy-1", "ivar-greedy-4", "alm", "mi"};
  }
  const OptimizerConfig o;
  if (!c.max_iterations) c.max_iterations = o.max_iterations;
  if (!c.gradient_tolerance) c.gradient_tolerance = o.gradient_tolerance;
  if (!c.objective_tolerance) c.objective_tolerance = o.objective_tolerance;
}

int cmd_design(const RunConfig& c, const fs::path& out) {
  require(c.n >= 1, "design: --n must be a positive integer");
  require(c.batch >= 1, "design: --batch must be positive");
  const Domain domain = parse_domain(c.domain);
  const Kernel kernel = parse_kernel(c.kernel, domain.dim());
  const double nugget = *c.nugget;
  Design design;
  json summary;
  std::vector<std::vector<std::string>> trace_rows;
  if (c.strategy == "ivar" || c.strategy == "ivar-greedy") {
    const SaaContext ctx = make_saa_context(kernel, domain, c.n_mc, nugget, c.seed);
    const OptimizerConfig o = optimizer_config(c);
    const IvarDesignResult r =
        c.strategy == "ivar" ? minimize_ivar_batch(ctx, domain, c.n, o) : minimize_ivar_greedy(ctx, domain, c.n, o);
    design = r.design;
    summary["ivar"] = r.ivar;
    summary["batch_ivar"] = r.batch_ivar;
    summary["batch_sizes"] = r.batch_sizes;
    summary["converged"] = r.converged;
    summary["projected_points"] = r.projected_points;
    summary["warnings"] = r.warnings;
    for (const auto& t : r.trace)
      trace_rows.push_back({std::to_string(t.batch), std::to_string(t.restart), std::to_string(t.iteration),
                            format_double(t.objective), format_double(t.gradient_norm)});
  } else if (c.strategy == "alm" || c.strategy == "mi") {
    const bool alm = c.strategy == "alm";
    const int candidates = c.candidates > 0 ? c.candidates : (alm ? kDefaultAlmCandidates : kDefaultMiCandidates);
    const DiscreteDesignResult r = alm ? alm_design(kernel, domain, c.n, nugget, candidates, c.seed)
                                       : mi_design(kernel, domain, c.n, nugget, candidates, c.seed);
    design = r.design;
    summary["ivar"] = ivar_saa(make_saa_context(kernel, domain, c.n_mc, nugget, c.seed), design.points);
    summary["skipped_candidates"] = r.skipped.size();
  } else {
    throw ConfigError("unknown strategy '" + c.strategy + "' (expected ivar, ivar-greedy, alm or mi)");
  }
  summary["kernel"] = kernel_to_json(kernel);
  summary["domain"] = domain_to_json(domain);
  summary["provenance"] = design.provenance;
  write_design_csv(out / "design.csv", design);
  write_csv(out / "trace.csv", {"batch", "restart", "iteration", "objective", "gradient_norm"}, trace_rows);
  write_json(out / "summary.json", summary);
  std::cout << design.provenance << ": " << design.size() << " points, IVAR " << format_double(summary["ivar"].get<double>())
            << "\n";
  return kExitOk;
}

int cmd_lebesgue(const RunConfig& c, const fs::path& out) {
  const Domain domain = parse_domain(c.domain);
  const Kernel kernel = parse_kernel(c.kernel, domain.dim());
  for (int n : c.sizes) require(n >= 1, "lebesgue: sizes must be positive");
  const auto rows = lebesgue_study(kernel, domain, c.sizes, *c.nugget, c.n_mc, c.grid, optimizer_config(c));
  std::vector<std::vector<std::string>> table;
  for (const auto& r : rows) {
    table.push_back({std::to_string(r.n), format_double(r.lebesgue), format_double(r.ivar)});
    std::cout << "N=" << r.n << " Lambda=" << format_double(r.lebesgue) << "\n";
  }
  write_csv(out / "lebesgue.csv", {"N", "lambda", "ivar"}, table);
  return kExitOk;
}

int cmd_spectrum(const RunConfig& c, const fs::path& out) {
  SpectrumOptions o;
  require(c.nodes >= 1 && c.terms >= 1 && c.max_index >= 1, "spectrum: sizes must be positive");
  o.nodes = c.nodes;
  o.terms = static_cast<std::size_t>(c.terms);
  o.decay = c.decay;
  o.nugget = *c.nugget;
  o.max_index = static_cast<std::size_t>(c.max_index);
  o.n_mc = c.n_mc;
  o.optimizer = optimizer_config(c);
  const SpectrumStudy s = spectrum_study(o);
  std::vector<std::vector<std::string>> table;
  for (Eigen::Index i = 0; i < s.psa_spectrum.size(); ++i)
    table.push_back({std::to_string(i), format_double(s.psa_spectrum(i)), format_double(s.gp_quadrature_spectrum(i)),
                     format_double(s.gp_ivar_spectrum(i)), format_double(s.exact_coefficients(i))});
  write_csv(out / "spectrum.csv", {"index", "psa", "gp_quadrature", "gp_ivar", "exact"}, table);
  json summary;
  summary["relative_error"] = {{"psa", s.psa_error}, {"gp_quadrature", s.gp_quadrature_error}, {"gp_ivar", s.gp_ivar_error}};
  summary["ivar_design"] = std::vector<double>(s.ivar_design.data(), s.ivar_design.data() + s.ivar_design.size());
  write_json(out / "summary.json", summary);
  std::cout << "relative L2 error: psa " << format_double(s.psa_error) << ", gp-quadrature "
            << format_double(s.gp_quadrature_error) << ", gp-ivar " << format_double(s.gp_ivar_error) << "\n";
  return kExitOk;
}

int cmd_compare(const RunConfig& c, const fs::path& out) {
  const Domain domain = parse_domain(c.domain);
  const Kernel kernel = parse_kernel(c.kernel, domain.dim());
  CompareOptions o;
  o.sizes = c.sizes;
  o.strategies = c.strategies;
  o.prior_draws = c.draws;
  o.test_points = c.test_points;
  o.nugget = *c.nugget;
  o.n_mc = c.n_mc;
  if (c.candidates > 0) o.alm_candidates = o.mi_candidates = c.candidates;
  o.seed = c.seed;
  o.optimizer = optimizer_config(c);
  const auto rows = compare_designs(domain, kernel, o);
  std::vector<std::vector<std::string>> table;
  for (const auto& r : rows) {
    table.push_back({r.strategy, std::to_string(r.n), format_double(r.mean_rel_err), format_double(r.std_rel_err),
                     std::to_string(r.seed)});
    std::cout << r.strategy << " N=" << r.n << " " << format_double(r.mean_rel_err) << " +- "
              << format_double(r.std_rel_err) << "\n";
  }
  write_csv(out / "compare.csv", {"strategy", "N", "mean_rel_err", "std_rel_err", "seed"}, table);
  return kExitOk;
}

int cmd_adapt(const RunConfig& c, const fs::path& out) {
  const TestFunction f = test_function(c.function, c.seed);
  const Domain domain = c.domain.empty() ? f.measure : parse_domain(c.domain);
  const Kernel kernel = parse_kernel(c.kernel, f.dimension);
  AdaptiveOptions o;
  if (c.extended) {
    o.batch_schedule = genz_extended_schedule(c.total);
  } else {
    require(c.batch >= 1 && c.total >= c.batch, "adapt: need 1 <= batch <= total");
    for (int n = 0; n < c.total; n += c.batch) o.batch_schedule.push_back(std::min(c.batch, c.total - n));
  }
  o.seed = c.seed;
  o.n_mc = c.n_mc;
  o.error_samples = c.error_samples;
  o.initial_nugget = *c.nugget;
  o.design = optimizer_config(c);
  o.hyper.restarts = c.hyper_restarts;
  const AdaptiveTrace trace = adaptive_gp_loop(kernel, domain, f.evaluator, o);
  std::vector<std::string> header{"batch", "N", "relative_error", "standard_error", "ivar", "seconds", "refit_ok"};
  header.insert(header.end(), trace.labels.begin(), trace.labels.end());
  std::vector<std::vector<std::string>> table;
  for (const auto& r : trace.records) {
    std::vector<std::string> row{std::to_string(r.batch), std::to_string(r.n), format_double(r.relative_error),
                                 format_double(r.error_standard_error), format_double(r.ivar), format_double(r.seconds),
                                 r.refit_ok ? "1" : "0"};
    const auto hp = format_all(r.hyperparameters);
    row.insert(row.end(), hp.begin(), hp.end());
    table.push_back(std::move(row));
    std::cout << "N=" << r.n << " relative error " << format_double(r.relative_error) << "\n";
  }
  write_csv(out / "trace.csv", header, table);
  write_design_csv(out / "design.csv", trace.design);
  return kExitOk;
}

int cmd_verify(const RunConfig& c, const fs::path& out) {
  const auto checks = verify_suite(c.seed, c.configs);
  json report = json::array();
  bool ok = true;
  for (const auto& ch : checks) {
    report.push_back({{"name", ch.name}, {"value", ch.value}, {"tolerance", ch.tolerance}, {"passed", ch.passed},
                      {"detail", ch.detail}});
    ok = ok && ch.passed;
    std::cout << (ch.passed ? "ok   " : "FAIL ") << ch.name << " " << format_double(ch.value) << " (tolerance "
              << format_double(ch.tolerance) << ")\n";
  }
  write_json(out / "verify.json", report);
  return ok ? kExitOk : kExitNumerical;
}

}  // namespace

int run_command(RunConfig config) {
  try {
    fill_defaults(config);
    require(config.n_mc >= 1, "--n-mc must be positive");
    require(config.restarts >= 1, "--restarts must be positive");
    const fs::path out(config.out_dir);
    fs::create_directories(out);
    write_json(out / "config.json", to_json(config));
    const std::string& cmd = config.command;
    if (cmd == "design") return cmd_design(config, out);
    if (cmd == "lebesgue") return cmd_lebesgue(config, out);
    if (cmd == "spectrum") return cmd_spectrum(config, out);
    if (cmd == "compare") return cmd_compare(config, out);
    if (cmd == "adapt") return cmd_adapt(config, out);
    if (cmd == "verify") return cmd_verify(config, out);
    throw ConfigError("unknown command '" + cmd + "'");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"IVAR experimental design and GP/pseudospectral comparisons"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig c;
  std::string config_file;
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--out-dir", c.out_dir, "output directory");
  app.add_option("--config", config_file, "JSON file whose entries override the flags")->check(CLI::ExistingFile);

  auto optional_double = [](CLI::App* sub, const std::string& name, std::optional<double>& target,
                            const std::string& help) {
    sub->add_option_function<double>(name, [&target](const double& v) { target = v; }, help);
  };
  auto optimizer_flags = [&](CLI::App* sub) {
    sub->add_option("--n-mc", c.n_mc, "SAA Monte Carlo points");
    sub->add_option("--restarts", c.restarts, "optimizer restarts");
    sub->add_option_function<int>("--max-iter", [&](const int& v) { c.max_iterations = v; }, "iterations per run");
    optional_double(sub, "--grad-tol", c.gradient_tolerance, "projected gradient tolerance");
    optional_double(sub, "--obj-tol", c.objective_tolerance, "relative objective change tolerance");
  };

  auto* design = app.add_subcommand("design", "build a design (ivar, ivar-greedy, alm, mi)");
  design->add_option("--domain", c.domain, "domain preset or spec");
  design->add_option("--kernel", c.kernel, "kernel spec, e.g. se:l=0.2");
  design->add_option("--n", c.n, "number of design points");
  design->add_option("--strategy", c.strategy, "ivar | ivar-greedy | alm | mi");
  design->add_option("--batch", c.batch, "greedy batch size M");
  design->add_option("--candidates", c.candidates, "candidate count for alm/mi");
  optional_double(design, "--nugget", c.nugget, "nugget sigma^2");
  optimizer_flags(design);

  auto* leb = app.add_subcommand("lebesgue", "Lebesgue constants of IVAR designs on an interval");
  leb->add_option("--domain", c.domain, "1-D domain");
  leb->add_option("--kernel", c.kernel, "kernel spec");
  leb->add_option("--sizes", c.sizes, "design sizes")->delimiter(',');
  leb->add_option("--grid", c.grid, "grid points for the maximum");
  leb->add_option_function<double>(
      "--l", [&](const double& l) { c.kernel = "se:l=" + format_double(l); }, "shorthand for --kernel se:l=L");
  optional_double(leb, "--nugget", c.nugget, "nugget sigma^2");
  optimizer_flags(leb);

  auto* spec = app.add_subcommand("spectrum", "PSA vs GP error spectra for sin(pi x + 0.2)");
  spec->add_option("--nodes", c.nodes, "Gauss-Hermite nodes");
  spec->add_option("--terms", c.terms, "PSA terms");
  spec->add_option("--decay", c.decay, "Mehler decay t");
  spec->add_option("--max-index", c.max_index, "spectrum length");
  optional_double(spec, "--nugget", c.nugget, "nugget sigma^2");
  optimizer_flags(spec);

  auto* cmp = app.add_subcommand("compare", "design strategies scored on prior draws");
  cmp->add_option("--domain", c.domain, "domain preset or spec");
  cmp->add_option("--kernel", c.kernel, "kernel spec");
  cmp->add_option("--sizes", c.sizes, "design sizes")->delimiter(',');
  cmp->add_option("--strategies", c.strategies, "strategies")->delimiter(',');
  cmp->add_option("--draws", c.draws, "prior draws");
  cmp->add_option("--test-points", c.test_points, "error evaluation points");
  cmp->add_option("--candidates", c.candidates, "candidate count for alm/mi");
  optional_double(cmp, "--nugget", c.nugget, "nugget sigma^2");
  optimizer_flags(cmp);

  auto* adapt = app.add_subcommand("adapt", "closed-loop IVAR design with hyperparameter refits");
  adapt->add_option("--function", c.function, "f1 | f2 | ishigami | genz10 | sine-shift");
  adapt->add_option("--kernel", c.kernel, "initial kernel spec");
  adapt->add_option("--domain", c.domain, "input measure (default: the function's)");
  adapt->add_option("--batch", c.batch, "batch size");
  adapt->add_option("--total", c.total, "total evaluations");
  adapt->add_flag("--extended", c.extended, "50-point batches to 700, then 200-point batches");
  adapt->add_option("--hyper-restarts", c.hyper_restarts, "likelihood restarts per refit");
  adapt->add_option("--error-samples", c.error_samples, "Monte Carlo points for the error");
  optional_double(adapt, "--nugget", c.nugget, "initial nugget");
  optimizer_flags(adapt);

  auto* verify = app.add_subcommand("verify", "bound, identity and degeneracy checks");
  verify->add_option("--configs", c.configs, "random configurations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  c.command = app.get_subcommands().front()->get_name();
  if (!config_file.empty()) {
    try {
      std::ifstream in(config_file);
      apply_json(c, json::parse(in));
    } catch (const json::exception& e) {
      std::cerr << "error: config file: " << e.what() << "\n";
      return kExitConfig;
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitConfig;
    }
    if (c.command != app.get_subcommands().front()->get_name()) {
      std::cerr << "error: config file names command '" << c.command << "'\n";
      return kExitConfig;
    }
  }
  return run_command(c);
}

}  // namespace ivar
