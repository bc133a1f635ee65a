#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tl1/problems.hpp"
#include "tl1/solvers.hpp"

namespace tl1 {

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

/// A success-rate sweep over sparsities for one matrix family. Matching the
/// benchmark protocol: every scheme sees the same instances for a given
/// (k, trial), success means relative L2 recovery error within success_tol.
struct ExperimentSpec {
  std::string family = "gaussian";  // "gaussian" | "dct"
  int m = 0;
  int n = 0;
  double r = 0.0;            // gaussian column covariance
  double f = 0.0;            // dct over-sampling factor
  std::optional<int> min_sep;  // default: 0 gaussian, round(2f) dct
  double amplitude_std = 1.0;
  std::vector<int> k_grid;
  std::vector<Scheme> schemes;
  int trials = 20;
  std::optional<NoiseSpec> noise;
  double success_tol = 1e-3;
  std::uint64_t master_seed = 1;
  int threads = 1;
  SolverConfig solver;  // scheme/k fields are overwritten per run
};

struct TrialRecord {
  Scheme scheme{};
  int k = 0;
  int trial_index = 0;
  double rel_error = 0.0;
  double mse = 0.0;
  int iterations = 0;
  bool converged = false;
  bool success = false;
};

struct SuccessCurve {
  Scheme scheme{};
  double sweep = 0.0;  // r (gaussian) or f (dct)
  int trials = 0;
  std::vector<int> k;
  std::vector<int> successes;  // rate = successes / trials, exact rational
};

/// Sparsity-misestimation study: data with true_k nonzeros, solver told
/// k_est, mean squared recovery error per (M, k_est).
struct RobustnessSpec {
  int n = 0;
  int true_k = 0;
  std::vector<int> m_grid;
  std::vector<int> k_est_grid;
  std::vector<Scheme> schemes;
  int trials = 10;
  double r = 0.0;
  double amplitude_std = 1.0;
  std::optional<NoiseSpec> noise;
  std::uint64_t master_seed = 1;
  int threads = 1;
  SolverConfig solver;
};

struct RobustnessCurve {
  Scheme scheme{};
  int m = 0;
  int trials = 0;
  std::vector<int> k_est;
  std::vector<double> mean_mse;
};

/// Generate one instance of the spec's family at sparsity k from the given
/// stream (matrix, then signal, then optional noise).
ProblemInstance make_instance(const ExperimentSpec& spec, int k,
                              RngStream& rng);

/// Solve one instance with the given scheme and score against the ground
/// truth. cfg.k must already be set by the caller.
TrialRecord run_trial(const ProblemInstance& inst, Scheme scheme,
                      SolverConfig cfg, double success_tol, int trial_index = 0);

std::vector<SuccessCurve> run_success_experiment(const ExperimentSpec& spec);
std::vector<RobustnessCurve> run_robustness_experiment(
    const RobustnessSpec& spec);

/// Sampled threshold maps at regularization lam: soft, half, and the TL1
/// prox at a = 2 (continuous at lam = 1/2) and a = 1 (jump at lam = 1/2).
struct ThresholdTableRow {
  double x;
  double soft;
  double half;
  double tl1_a2;
  double tl1_a1;
};
std::vector<ThresholdTableRow> threshold_table(double lam, double x_min,
                                               double x_max, double step);

// CSV serializers; all real values carry 12 significant digits.
std::string success_curves_csv(const std::vector<SuccessCurve>& curves);
std::string robustness_curves_csv(const std::vector<RobustnessCurve>& curves);
std::string threshold_table_csv(const std::vector<ThresholdTableRow>& rows);

std::string format_real(double v);

}  // namespace tl1
