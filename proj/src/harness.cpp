#include "tl1/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

namespace tl1 {

namespace {

// Deterministic parallel loop: items are independent and write to their own
// slots, so the schedule cannot affect results.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int nw = std::min(threads, count);
  pool.reserve(static_cast<std::size_t>(nw));
  for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t trial_stream_id(int outer, int trial) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(outer)) << 32) |
         static_cast<std::uint32_t>(trial);
}

int effective_min_sep(const ExperimentSpec& spec) {
  if (spec.min_sep) return *spec.min_sep;
  if (spec.family == "dct") return static_cast<int>(std::lround(2.0 * spec.f));
  return 0;
}

// Ground truth plus a ready-to-solve model; instances are shared by all
// schemes at a given (k, trial).
struct TrialSetup {
  Eigen::VectorXd x_true;
  int k = 0;
  std::optional<LinearModel> model;
};

TrialSetup build_setup(const ExperimentSpec& spec, int k, std::uint64_t sid) {
  RngStream rng(spec.master_seed, sid);
  ProblemInstance inst = make_instance(spec, k, rng);
  TrialSetup setup;
  setup.x_true = std::move(inst.x_true);
  setup.k = k;
  setup.model.emplace(std::move(inst.A), std::move(inst.y));
  return setup;
}

TrialRecord score(const Eigen::VectorXd& x_true, const SolveResult& result,
                  Scheme scheme, int k, int trial_index, double success_tol) {
  TrialRecord rec;
  rec.scheme = scheme;
  rec.k = k;
  rec.trial_index = trial_index;
  rec.iterations = result.iterations;
  rec.converged = result.converged;
  const double true_norm = x_true.norm();
  const double err_norm = (result.x - x_true).norm();
  if (true_norm > 0.0) {
    rec.rel_error = err_norm / true_norm;
  } else {
    rec.rel_error = (result.x.norm() == 0.0) ? 0.0 : 1.0;
  }
  rec.mse = err_norm * err_norm / static_cast<double>(x_true.size());
  rec.success = rec.rel_error <= success_tol;
  return rec;
}

TrialRecord solve_and_score(const LinearModel& model,
                            const Eigen::VectorXd& x_true, Scheme scheme,
                            SolverConfig cfg, double success_tol, int k,
                            int trial_index) {
  cfg.scheme = scheme;
  try {
    const SolveResult result = solve(model, cfg);
    return score(x_true, result, scheme, k, trial_index, success_tol);
  } catch (const std::exception& e) {
    throw std::runtime_error("trial failed (scheme=" + scheme_name(scheme) +
                             ", k=" + std::to_string(k) +
                             ", trial=" + std::to_string(trial_index) +
                             "): " + e.what());
  }
}

}  // namespace

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::S1:
      return "S1";
    case Scheme::S2:
      return "S2";
    case Scheme::S3:
      return "S3";
    case Scheme::HardIT:
      return "HardIT";
    case Scheme::HalfIT:
      return "HalfIT";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "S1") return Scheme::S1;
  if (name == "S2") return Scheme::S2;
  if (name == "S3") return Scheme::S3;
  if (name == "HardIT") return Scheme::HardIT;
  if (name == "HalfIT") return Scheme::HalfIT;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

ProblemInstance make_instance(const ExperimentSpec& spec, int k,
                              RngStream& rng) {
  ProblemInstance inst;
  inst.family = spec.family;
  inst.k = k;
  inst.seed = spec.master_seed;
  if (spec.family == "gaussian") {
    inst.A = gen_gaussian_matrix({spec.m, spec.n, spec.r}, rng);
    inst.params = {{"M", spec.m}, {"N", spec.n}, {"r", spec.r}};
  } else if (spec.family == "dct") {
    inst.A = gen_dct_matrix({spec.m, spec.n, spec.f}, rng);
    inst.params = {{"M", spec.m}, {"N", spec.n}, {"F", spec.f}};
  } else {
    throw std::invalid_argument("make_instance: unknown family '" +
                                spec.family + "'");
  }
  const int sep = effective_min_sep(spec);
  inst.params["min_sep"] = sep;
  inst.params["amplitude_std"] = spec.amplitude_std;
  inst.x_true = gen_signal({spec.n, k, sep, spec.amplitude_std}, rng);
  inst.y = inst.A * inst.x_true;
  if (spec.noise) {
    inst.y = apply_noise(inst.y, *spec.noise, rng);
    inst.params["sigma"] = spec.noise->sigma;
    inst.params["linf_cap"] = spec.noise->linf_cap;
  }
  return inst;
}

TrialRecord run_trial(const ProblemInstance& inst, Scheme scheme,
                      SolverConfig cfg, double success_tol, int trial_index) {
  LinearModel model(inst.A, inst.y);
  return solve_and_score(model, inst.x_true, scheme, cfg, success_tol, inst.k,
                         trial_index);
}

std::vector<SuccessCurve> run_success_experiment(const ExperimentSpec& spec) {
  if (spec.trials < 1) {
    throw std::invalid_argument("run_success_experiment: trials must be >= 1");
  }
  if (!(spec.success_tol > 0.0)) {
    throw std::invalid_argument(
        "run_success_experiment: success_tol must be positive");
  }
  const int nk = static_cast<int>(spec.k_grid.size());
  const int ns = static_cast<int>(spec.schemes.size());

  std::vector<TrialSetup> setups(static_cast<std::size_t>(nk) * spec.trials);
  parallel_for(nk * spec.trials, spec.threads, [&](int i) {
    const int ki = i / spec.trials;
    const int trial = i % spec.trials;
    setups[static_cast<std::size_t>(i)] = build_setup(
        spec, spec.k_grid[static_cast<std::size_t>(ki)],
        trial_stream_id(spec.k_grid[static_cast<std::size_t>(ki)], trial));
  });

  std::vector<TrialRecord> records(static_cast<std::size_t>(ns) * nk *
                                   spec.trials);
  parallel_for(static_cast<int>(records.size()), spec.threads, [&](int i) {
    const int si = i / (nk * spec.trials);
    const int ki = (i / spec.trials) % nk;
    const int trial = i % spec.trials;
    const TrialSetup& setup =
        setups[static_cast<std::size_t>(ki) * spec.trials + trial];
    SolverConfig cfg = spec.solver;
    cfg.k = setup.k;
    records[static_cast<std::size_t>(i)] = solve_and_score(
        *setup.model, setup.x_true, spec.schemes[static_cast<std::size_t>(si)],
        cfg, spec.success_tol, setup.k, trial);
  });

  const double sweep = (spec.family == "dct") ? spec.f : spec.r;
  std::vector<SuccessCurve> curves;
  curves.reserve(static_cast<std::size_t>(ns));
  for (int si = 0; si < ns; ++si) {
    SuccessCurve curve;
    curve.scheme = spec.schemes[static_cast<std::size_t>(si)];
    curve.sweep = sweep;
    curve.trials = spec.trials;
    curve.k = spec.k_grid;
    curve.successes.assign(static_cast<std::size_t>(nk), 0);
    for (int ki = 0; ki < nk; ++ki) {
      for (int trial = 0; trial < spec.trials; ++trial) {
        const auto idx = (static_cast<std::size_t>(si) * nk + ki) * spec.trials +
                         trial;
        if (records[idx].success) ++curve.successes[static_cast<std::size_t>(ki)];
      }
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<RobustnessCurve> run_robustness_experiment(
    const RobustnessSpec& spec) {
  if (spec.trials < 1 || spec.true_k < 1) {
    throw std::invalid_argument("run_robustness_experiment: bad trials/true_k");
  }
  for (const int k_est : spec.k_est_grid) {
    if (k_est < 1 || k_est >= spec.n) {
      throw std::invalid_argument(
          "run_robustness_experiment: k_est must satisfy 1 <= k_est < N");
    }
  }
  const int nm = static_cast<int>(spec.m_grid.size());
  const int nk = static_cast<int>(spec.k_est_grid.size());
  const int ns = static_cast<int>(spec.schemes.size());

  // One instance per (M, trial); every (scheme, k_est) sees the same data.
  std::vector<TrialSetup> setups(static_cast<std::size_t>(nm) * spec.trials);
  parallel_for(nm * spec.trials, spec.threads, [&](int i) {
    const int mi = i / spec.trials;
    const int trial = i % spec.trials;
    ExperimentSpec gen;
    gen.family = "gaussian";
    gen.m = spec.m_grid[static_cast<std::size_t>(mi)];
    gen.n = spec.n;
    gen.r = spec.r;
    gen.amplitude_std = spec.amplitude_std;
    gen.noise = spec.noise;
    gen.master_seed = spec.master_seed;
    setups[static_cast<std::size_t>(i)] = build_setup(
        gen, spec.true_k,
        trial_stream_id(spec.m_grid[static_cast<std::size_t>(mi)], trial));
  });

  std::vector<double> mses(static_cast<std::size_t>(ns) * nm * nk *
                           spec.trials);
  parallel_for(static_cast<int>(mses.size()), spec.threads, [&](int i) {
    const int si = i / (nm * nk * spec.trials);
    const int mi = (i / (nk * spec.trials)) % nm;
    const int ki = (i / spec.trials) % nk;
    const int trial = i % spec.trials;
    const TrialSetup& setup =
        setups[static_cast<std::size_t>(mi) * spec.trials + trial];
    SolverConfig cfg = spec.solver;
    cfg.k = spec.k_est_grid[static_cast<std::size_t>(ki)];
    const TrialRecord rec = solve_and_score(
        *setup.model, setup.x_true, spec.schemes[static_cast<std::size_t>(si)],
        cfg, 1e-3, cfg.k, trial);
    mses[static_cast<std::size_t>(i)] = rec.mse;
  });

  std::vector<RobustnessCurve> curves;
  curves.reserve(static_cast<std::size_t>(ns) * nm);
  for (int si = 0; si < ns; ++si) {
    for (int mi = 0; mi < nm; ++mi) {
      RobustnessCurve curve;
      curve.scheme = spec.schemes[static_cast<std::size_t>(si)];
      curve.m = spec.m_grid[static_cast<std::size_t>(mi)];
      curve.trials = spec.trials;
      curve.k_est = spec.k_est_grid;
      curve.mean_mse.assign(static_cast<std::size_t>(nk), 0.0);
      for (int ki = 0; ki < nk; ++ki) {
        double sum = 0.0;
        for (int trial = 0; trial < spec.trials; ++trial) {
          const auto idx =
              ((static_cast<std::size_t>(si) * nm + mi) * nk + ki) *
                  spec.trials +
              trial;
          sum += mses[idx];
        }
        curve.mean_mse[static_cast<std::size_t>(ki)] =
            sum / static_cast<double>(spec.trials);
      }
      curves.push_back(std::move(curve));
    }
  }
  return curves;
}

std::vector<ThresholdTableRow> threshold_table(double lam, double x_min,
                                               double x_max, double step) {
  if (!(step > 0.0) || !(x_max >= x_min)) {
    throw std::invalid_argument("threshold_table: bad grid");
  }
  const PenaltyParam a1(1.0);
  const PenaltyParam a2(2.0);
  std::vector<ThresholdTableRow> rows;
  const auto n = static_cast<long>(std::floor((x_max - x_min) / step + 0.5));
  rows.reserve(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) {
    double x = x_min + static_cast<double>(i) * step;
    if (std::abs(x) < 1e-12) x = 0.0;  // land the zero row exactly
    ThresholdTableRow row{};
    row.x = x;
    row.soft = soft(x, lam);
    row.half = half(x, lam);
    row.tl1_a2 = prox_tl1(x, lam, a2).value;
    row.tl1_a1 = prox_tl1(x, lam, a1).value;
    rows.push_back(row);
  }
  return rows;
}

std::string success_curves_csv(const std::vector<SuccessCurve>& curves) {
  std::ostringstream out;
  out << "scheme,sweep,k,trials,successes,rate\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.k.size(); ++i) {
      const double rate =
          static_cast<double>(c.successes[i]) / static_cast<double>(c.trials);
      out << scheme_name(c.scheme) << ',' << format_real(c.sweep) << ','
          << c.k[i] << ',' << c.trials << ',' << c.successes[i] << ','
          << format_real(rate) << '\n';
    }
  }
  return out.str();
}

std::string robustness_curves_csv(const std::vector<RobustnessCurve>& curves) {
  std::ostringstream out;
  out << "scheme,M,k_est,trials,mean_mse\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.k_est.size(); ++i) {
      out << scheme_name(c.scheme) << ',' << c.m << ',' << c.k_est[i] << ','
          << c.trials << ',' << format_real(c.mean_mse[i]) << '\n';
    }
  }
  return out.str();
}

std::string threshold_table_csv(const std::vector<ThresholdTableRow>& rows) {
  std::ostringstream out;
  out << "x,soft,half,tl1_a2,tl1_a1\n";
  for (const auto& r : rows) {
    out << format_real(r.x) << ',' << format_real(r.soft) << ','
        << format_real(r.half) << ',' << format_real(r.tl1_a2) << ','
        << format_real(r.tl1_a1) << '\n';
  }
  return out.str();
}

}  // namespace tl1
