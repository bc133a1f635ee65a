#pragma once

#include <Eigen/Core>
#include <vector>

#include "tl1/thresholding.hpp"

namespace tl1 {

/// Largest singular value by power iteration on A^T A from a fixed seeded
/// start vector; stops when the relative change of the Rayleigh quotient
/// drops below 1e-12 or after 500 iterations. Rejects an all-zero matrix.
double spectral_norm(const Eigen::MatrixXd& A);

/// Dense sensing model y ~ A x with the spectral norm of A cached at
/// construction. Immutable afterwards; safe to share across threads.
class LinearModel {
 public:
  LinearModel(Eigen::MatrixXd A, Eigen::VectorXd y);

  const Eigen::MatrixXd& A() const noexcept { return A_; }
  const Eigen::VectorXd& y() const noexcept { return y_; }
  double op_norm() const noexcept { return op_norm_; }
  Eigen::Index rows() const noexcept { return A_.rows(); }
  Eigen::Index cols() const noexcept { return A_.cols(); }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd y_;
  double op_norm_;
};

/// Landweber step B_mu(x) = x + mu * A^T (y - A x).
Eigen::VectorXd gradient_step(const Eigen::VectorXd& x,
                              const LinearModel& model, double mu);

/// C_lambda(x) = ||y - A x||^2 / 2 + lambda * P_a(x).
double objective(const Eigen::VectorXd& x, const LinearModel& model,
                 double lambda, PenaltyParam a);

/// ISTA warm start from zero: `iters` soft-thresholding steps with
/// lambda_ws = lambda_scale * ||A^T y||_inf. Supplies the initial iterate
/// for the nonconvex schemes.
Eigen::VectorXd warm_start(const LinearModel& model, int iters, double mu,
                           double lambda_scale = 0.1);

enum class Scheme { S1, S2, S3, HardIT, HalfIT };

struct SolverConfig {
  Scheme scheme = Scheme::S2;
  double a = 1.0;           // TL1 shape (S1/S2; S3 adapts it, baselines ignore)
  double lambda = 0.0;      // fixed regularization (S1 only)
  double mu_eps = 0.01;     // mu = (1 - mu_eps) / ||A||^2
  int k = 0;                // sparsity estimate (S2/S3/HardIT/HalfIT)
  int max_iter = 3000;
  double rel_tol = 1e-8;
  int warm_start_iters = 20;
  double warm_start_lambda_scale = 0.1;
};

struct SolveResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // S1 only; empty otherwise
  double final_rel_change = 0.0;
  double fixed_point_residual = 0.0;
};

/// Regularization choice of the semi-adaptive scheme: lambda1 when it stays
/// subcritical (then t equals the (k+1)-th magnitude of z), else lambda2
/// (supercritical, t equals the k-th magnitude). theta = lambda * mu carries
/// the mu-free product actually used by the thresholding step.
struct LambdaChoice {
  double lambda;
  double theta;
  double t;
  Regime regime;
};
LambdaChoice select_lambda_s2(const Eigen::VectorXd& z, int k, PenaltyParam a,
                              double mu);

/// Parameter choice of the fully adaptive scheme: theta and a placed exactly
/// at criticality so the single threshold t equals the (k+1)-th magnitude
/// of z. A zero (k+1)-th magnitude degenerates to the identity map.
struct AdaptiveParams {
  double theta;
  double a;
  double t;
};
AdaptiveParams select_params_s3(const Eigen::VectorXd& z, int k);

SolveResult solve_s1(const LinearModel& model, const SolverConfig& cfg);
SolveResult solve_s2(const LinearModel& model, const SolverConfig& cfg);
SolveResult solve_s3(const LinearModel& model, const SolverConfig& cfg);
SolveResult solve_hard_it(const LinearModel& model, const SolverConfig& cfg);
SolveResult solve_half_it(const LinearModel& model, const SolverConfig& cfg);

/// Dispatch on cfg.scheme.
SolveResult solve(const LinearModel& model, const SolverConfig& cfg);

/// ||x - G(B_mu(x))||_inf with the fixed TL1 prox map at (theta, a); zero
/// exactly at a fixed point of the S1 iteration.
double fixed_point_residual(const Eigen::VectorXd& x, const LinearModel& model,
                            double mu, double theta, PenaltyParam a);

}  // namespace tl1
