#include "tl1/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

namespace tl1 {

namespace {

using nlohmann::json;

json parse_override_value(const std::string& raw) {
  try {
    return json::parse(raw);
  } catch (const json::exception&) {
    return json(raw);  // bare strings like S2 or gaussian
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* ctx) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw std::invalid_argument(std::string(ctx) + " config: unknown key '" +
                                  item.key() + "'");
    }
  }
}

template <typename T>
T require_field(const json& j, const char* key, const char* ctx) {
  if (!j.contains(key)) {
    throw std::invalid_argument(std::string(ctx) +
                                " config: missing required key '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string(ctx) +
                                " config: bad value for key '" + key + "'");
  }
}

template <typename T>
T field_or(const json& j, const char* key, T def, const char* ctx) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string(ctx) +
                                " config: bad value for key '" + key + "'");
  }
}

std::vector<Scheme> parse_schemes(const json& j, const char* ctx) {
  const auto names = require_field<std::vector<std::string>>(j, "schemes", ctx);
  if (names.empty()) {
    throw std::invalid_argument(std::string(ctx) +
                                " config: 'schemes' must be nonempty");
  }
  std::vector<Scheme> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(scheme_from_name(n));
  return out;
}

std::optional<NoiseSpec> parse_noise(const json& j, const char* ctx) {
  if (!j.contains("noise") || j.at("noise").is_null()) return std::nullopt;
  const json& n = j.at("noise");
  check_keys(n, {"sigma", "linf_cap"}, ctx);
  NoiseSpec spec;
  spec.sigma = require_field<double>(n, "sigma", ctx);
  spec.linf_cap = require_field<double>(n, "linf_cap", ctx);
  return spec;
}

void fill_solver_fields(const json& j, SolverConfig& cfg, const char* ctx) {
  cfg.a = field_or<double>(j, "a", 1.0, ctx);
  cfg.mu_eps = field_or<double>(j, "mu_eps", 0.01, ctx);
  cfg.max_iter = field_or<int>(j, "max_iter", 3000, ctx);
  cfg.rel_tol = field_or<double>(j, "rel_tol", 1e-8, ctx);
  cfg.warm_start_iters = field_or<int>(j, "warm_start_iters", 20, ctx);
  cfg.warm_start_lambda_scale =
      field_or<double>(j, "warm_start_lambda_scale", 0.1, ctx);
}

int resolve_threads(const json& j, const char* ctx) {
  if (j.contains("threads")) return field_or<int>(j, "threads", 1, ctx);
  if (const char* env = std::getenv("TL1_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (...) {
      throw std::invalid_argument("TL1_THREADS is not an integer");
    }
  }
  return 1;
}

json read_json_file(const std::string& path, const char* what) {
  std::ifstream f(path);
  if (!f) {
    throw std::invalid_argument(std::string(what) + " file '" + path +
                                "' cannot be opened");
  }
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string(what) + " file '" + path +
                                "' is not valid JSON: " + e.what());
  }
}

}  // namespace

json load_config_json(const std::string& path,
                      const std::vector<std::string>& overrides) {
  json j = read_json_file(path, "config");
  if (!j.is_object()) {
    throw std::invalid_argument("config file '" + path +
                                "' must hold a JSON object");
  }
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("override '" + kv +
                                  "' is not of the form key=value");
    }
    j[kv.substr(0, eq)] = parse_override_value(kv.substr(eq + 1));
  }
  return j;
}

SolverConfig parse_solver_config(const json& j) {
  static constexpr const char* ctx = "solver";
  check_keys(j,
             {"scheme", "k", "a", "lambda", "mu_eps", "max_iter", "rel_tol",
              "warm_start_iters", "warm_start_lambda_scale", "instance"},
             ctx);
  SolverConfig cfg;
  cfg.scheme = scheme_from_name(require_field<std::string>(j, "scheme", ctx));
  cfg.k = field_or<int>(j, "k", 0, ctx);
  cfg.lambda = field_or<double>(j, "lambda", 0.0, ctx);
  fill_solver_fields(j, cfg, ctx);
  if (cfg.scheme == Scheme::S1 && !(cfg.lambda > 0.0)) {
    throw std::invalid_argument(
        "solver config: scheme S1 requires a positive 'lambda'");
  }
  if (cfg.scheme != Scheme::S1 && cfg.k < 1) {
    throw std::invalid_argument(
        "solver config: this scheme requires a sparsity estimate 'k' >= 1");
  }
  return cfg;
}

ExperimentSpec parse_experiment_spec(const json& j) {
  static constexpr const char* ctx = "experiment";
  check_keys(j, {"family", "M", "N", "r", "F", "min_sep", "amplitude_std",
                 "k_grid", "schemes", "trials", "noise", "success_tol", "seed",
                 "threads", "a", "mu_eps", "max_iter", "rel_tol",
                 "warm_start_iters", "warm_start_lambda_scale"},
             ctx);
  ExperimentSpec spec;
  spec.family = require_field<std::string>(j, "family", ctx);
  if (spec.family != "gaussian" && spec.family != "dct") {
    throw std::invalid_argument(
        "experiment config: 'family' must be gaussian or dct");
  }
  spec.m = require_field<int>(j, "M", ctx);
  spec.n = require_field<int>(j, "N", ctx);
  spec.r = field_or<double>(j, "r", 0.0, ctx);
  if (spec.family == "dct") {
    spec.f = require_field<double>(j, "F", ctx);
  }
  if (j.contains("min_sep")) {
    spec.min_sep = require_field<int>(j, "min_sep", ctx);
  }
  spec.amplitude_std = field_or<double>(j, "amplitude_std", 1.0, ctx);
  spec.k_grid = require_field<std::vector<int>>(j, "k_grid", ctx);
  if (spec.k_grid.empty()) {
    throw std::invalid_argument("experiment config: 'k_grid' must be nonempty");
  }
  spec.schemes = parse_schemes(j, ctx);
  spec.trials = field_or<int>(j, "trials", 20, ctx);
  spec.noise = parse_noise(j, ctx);
  spec.success_tol =
      field_or<double>(j, "success_tol", spec.noise ? 1e-2 : 1e-3, ctx);
  spec.master_seed = field_or<std::uint64_t>(j, "seed", 1, ctx);
  spec.threads = resolve_threads(j, ctx);
  fill_solver_fields(j, spec.solver, ctx);
  return spec;
}

RobustnessSpec parse_robustness_spec(const json& j) {
  static constexpr const char* ctx = "robustness";
  check_keys(j, {"N", "true_k", "M_grid", "k_est_grid", "schemes", "trials",
                 "r", "amplitude_std", "noise", "seed", "threads", "a",
                 "mu_eps", "max_iter", "rel_tol", "warm_start_iters",
                 "warm_start_lambda_scale"},
             ctx);
  RobustnessSpec spec;
  spec.n = require_field<int>(j, "N", ctx);
  spec.true_k = require_field<int>(j, "true_k", ctx);
  spec.m_grid = require_field<std::vector<int>>(j, "M_grid", ctx);
  spec.k_est_grid = require_field<std::vector<int>>(j, "k_est_grid", ctx);
  if (j.contains("schemes")) {
    spec.schemes = parse_schemes(j, ctx);
  } else {
    spec.schemes = {Scheme::S2, Scheme::S3};
  }
  spec.trials = field_or<int>(j, "trials", 10, ctx);
  spec.r = field_or<double>(j, "r", 0.0, ctx);
  spec.amplitude_std = field_or<double>(j, "amplitude_std", 1.0, ctx);
  spec.noise = parse_noise(j, ctx);
  spec.master_seed = field_or<std::uint64_t>(j, "seed", 1, ctx);
  spec.threads = resolve_threads(j, ctx);
  fill_solver_fields(j, spec.solver, ctx);
  return spec;
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp(target);
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
      throw std::runtime_error("cannot open '" + tmp.string() +
                               "' for writing");
    }
    f << content;
    f.close();
    if (!f) {
      throw std::runtime_error("failed writing '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, target);
}

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out = "-";
  std::uint64_t seed = 1;
  std::vector<std::string> overrides;
};

int cmd_gen(const ExperimentSpec& spec, int k, std::uint64_t seed,
            const std::string& out) {
  ExperimentSpec full = spec;
  full.master_seed = seed;
  RngStream rng(seed, 0);
  const ProblemInstance inst = make_instance(full, k, rng);
  const json j = inst;
  write_output(out, j.dump() + "\n");
  return 0;
}

int cmd_solve(const CommonOpts& opts) {
  const json cfg_json = load_config_json(opts.config_path, opts.overrides);
  const SolverConfig cfg = parse_solver_config(cfg_json);
  if (!cfg_json.contains("instance")) {
    throw std::invalid_argument(
        "solver config: missing required key 'instance' (path to a problem "
        "file produced by `gen`)");
  }
  const auto inst_path = cfg_json.at("instance").get<std::string>();
  const ProblemInstance inst =
      read_json_file(inst_path, "instance").get<ProblemInstance>();

  LinearModel model(inst.A, inst.y);
  const SolveResult result = solve(model, cfg);

  json out{{"scheme", scheme_name(cfg.scheme)},
           {"x", std::vector<double>(result.x.begin(), result.x.end())},
           {"iterations", result.iterations},
           {"converged", result.converged},
           {"final_rel_change", result.final_rel_change},
           {"fixed_point_residual", result.fixed_point_residual}};
  if (cfg.scheme == Scheme::S1) {
    out["objective_history"] = result.objective_history;
  }
  if (inst.x_true.size() == result.x.size()) {
    const double tn = inst.x_true.norm();
    const double en = (result.x - inst.x_true).norm();
    out["rel_error"] =
        tn > 0.0 ? en / tn : (result.x.norm() == 0.0 ? 0.0 : 1.0);
  }
  write_output(opts.out, out.dump(2) + "\n");
  return 0;
}

int cmd_success_rate(const CommonOpts& opts) {
  const json j = load_config_json(opts.config_path, opts.overrides);
  const ExperimentSpec spec = parse_experiment_spec(j);
  write_output(opts.out, success_curves_csv(run_success_experiment(spec)));
  return 0;
}

int cmd_robustness(const CommonOpts& opts) {
  const json j = load_config_json(opts.config_path, opts.overrides);
  const RobustnessSpec spec = parse_robustness_spec(j);
  write_output(opts.out, robustness_curves_csv(run_robustness_experiment(spec)));
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Sparse recovery via transformed-L1 iterative thresholding"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a sensing problem instance");
  ExperimentSpec gen_spec;
  int gen_k = 0;
  int gen_min_sep = -1;
  double noise_sigma = 0.0, noise_cap = 0.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "-";
  gen->add_option("--family", gen_spec.family, "gaussian | dct")->required();
  gen->add_option("--M", gen_spec.m, "row count")->required();
  gen->add_option("--N", gen_spec.n, "column count")->required();
  gen->add_option("--r", gen_spec.r, "gaussian column covariance");
  gen->add_option("--F", gen_spec.f, "dct over-sampling factor");
  gen->add_option("--k", gen_k, "signal sparsity")->required();
  gen->add_option("--min-sep", gen_min_sep,
                  "support separation (default 0 gaussian, 2F dct)");
  gen->add_option("--amplitude-std", gen_spec.amplitude_std,
                  "signal amplitude std");
  gen->add_option("--noise-sigma", noise_sigma, "noise std (0 = noiseless)");
  gen->add_option("--noise-cap", noise_cap, "noise amplitude cap");
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--out", gen_out, "output path or - for stdout");

  // shared pieces for config-driven commands
  CommonOpts solve_opts, rate_opts, robust_opts;
  std::string flag_scheme, flag_instance;
  double flag_lambda = 0.0, flag_a = 0.0;
  int flag_k = 0, flag_trials = 0, flag_threads = 0;

  auto* solve = app.add_subcommand("solve", "Solve one problem instance");
  solve->add_option("--config", solve_opts.config_path, "solver config JSON")
      ->required();
  solve->add_option("--instance", flag_instance, "instance file override");
  solve->add_option("--scheme", flag_scheme, "S1|S2|S3|HardIT|HalfIT");
  solve->add_option("--lambda", flag_lambda, "fixed regularization (S1)");
  solve->add_option("--a", flag_a, "TL1 shape parameter");
  solve->add_option("--k", flag_k, "sparsity estimate");
  solve->add_option("--seed", solve_opts.seed, "rng seed");
  solve->add_option("--out", solve_opts.out, "output path or -");
  solve->add_option("--set", solve_opts.overrides,
                    "config override key=value (repeatable)");

  auto* rate = app.add_subcommand("success-rate",
                                  "Success-rate sweep over sparsities");
  rate->add_option("--config", rate_opts.config_path, "experiment config JSON")
      ->required();
  rate->add_option("--seed", rate_opts.seed, "master seed");
  rate->add_option("--trials", flag_trials, "trials per (scheme, k)");
  rate->add_option("--threads", flag_threads,
                   "worker threads (or TL1_THREADS)");
  rate->add_option("--out", rate_opts.out, "output path or -");
  rate->add_option("--set", rate_opts.overrides,
                   "config override key=value (repeatable)");

  auto* robust = app.add_subcommand(
      "robustness", "Recovery error under sparsity misestimation");
  robust->add_option("--config", robust_opts.config_path,
                     "robustness config JSON")
      ->required();
  robust->add_option("--seed", robust_opts.seed, "master seed");
  robust->add_option("--trials", flag_trials, "trials per cell");
  robust->add_option("--threads", flag_threads,
                     "worker threads (or TL1_THREADS)");
  robust->add_option("--out", robust_opts.out, "output path or -");
  robust->add_option("--set", robust_opts.overrides,
                     "config override key=value (repeatable)");

  auto* table =
      app.add_subcommand("prox-table", "Sample the thresholding operators");
  double tbl_lambda = 0.0, tbl_xmin = -3.0, tbl_xmax = 3.0, tbl_step = 0.01;
  std::string tbl_out = "-";
  table->add_option("--lambda", tbl_lambda, "regularization level")->required();
  table->add_option("--x-min", tbl_xmin, "grid start");
  table->add_option("--x-max", tbl_xmax, "grid end");
  table->add_option("--step", tbl_step, "grid step");
  table->add_option("--out", tbl_out, "output path or -");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("tl1");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  // named flags become config overrides, taking precedence over the file
  auto given = [](CLI::App* sub, const char* name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  auto push_named = [&](CommonOpts& opts, CLI::App* sub) {
    if (given(sub, "--scheme"))
      opts.overrides.push_back("scheme=" + flag_scheme);
    if (given(sub, "--instance"))
      opts.overrides.push_back("instance=" + flag_instance);
    if (given(sub, "--lambda"))
      opts.overrides.push_back("lambda=" + format_real(flag_lambda));
    if (given(sub, "--a"))
      opts.overrides.push_back("a=" + format_real(flag_a));
    if (given(sub, "--k"))
      opts.overrides.push_back("k=" + std::to_string(flag_k));
    if (given(sub, "--seed"))
      opts.overrides.push_back("seed=" + std::to_string(opts.seed));
    if (given(sub, "--trials"))
      opts.overrides.push_back("trials=" + std::to_string(flag_trials));
    if (given(sub, "--threads"))
      opts.overrides.push_back("threads=" + std::to_string(flag_threads));
  };

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (sub == gen) {
      if (gen_min_sep >= 0) gen_spec.min_sep = gen_min_sep;
      if (noise_sigma > 0.0) {
        gen_spec.noise = NoiseSpec{noise_sigma, noise_cap};
      }
      return cmd_gen(gen_spec, gen_k, gen_seed, gen_out);
    }
    if (sub == solve) {
      push_named(solve_opts, solve);
      return cmd_solve(solve_opts);
    }
    if (sub == rate) {
      push_named(rate_opts, rate);
      return cmd_success_rate(rate_opts);
    }
    if (sub == robust) {
      push_named(robust_opts, robust);
      return cmd_robustness(robust_opts);
    }
    if (sub == table) {
      write_output(tbl_out, threshold_table_csv(threshold_table(
                                tbl_lambda, tbl_xmin, tbl_xmax, tbl_step)));
      return 0;
    }
    throw std::logic_error("unreachable subcommand");
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n\n" << sub->help() << std::flush;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
}

}  // namespace tl1
