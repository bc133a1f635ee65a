#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "tl1/rng.hpp"

namespace tl1 {

/// Rows drawn i.i.d. from N(0, Sigma) with unit variances and pairwise
/// column covariance r.
struct GaussianMatrixSpec {
  int m = 0;
  int n = 0;
  double r = 0.0;
};

/// Over-sampled DCT matrix: column j is cos(2 pi w (j-1) / f) / sqrt(m) for
/// a single uniform draw w in (0,1)^m. f is both the over-sampling factor
/// and the Rayleigh length.
struct DctMatrixSpec {
  int m = 0;
  int n = 0;
  double f = 1.0;
};

/// k-sparse signal with support indices at pairwise distance >= min_sep and
/// N(0, amplitude_std^2) values on the support.
struct SignalSpec {
  int n = 0;
  int k = 0;
  int min_sep = 0;
  double amplitude_std = 1.0;
};

/// Truncated Gaussian measurement noise: i.i.d. N(0, sigma^2) with any draw
/// exceeding the cap redrawn, so |eps_i| <= linf_cap always.
struct NoiseSpec {
  double sigma = 0.0;
  double linf_cap = 0.0;
};

Eigen::MatrixXd gen_gaussian_matrix(const GaussianMatrixSpec& spec,
                                    RngStream& rng);
Eigen::MatrixXd gen_dct_matrix(const DctMatrixSpec& spec, RngStream& rng);
Eigen::VectorXd gen_signal(const SignalSpec& spec, RngStream& rng);
Eigen::VectorXd apply_noise(const Eigen::VectorXd& y, const NoiseSpec& spec,
                            RngStream& rng);

/// max_{j != l} |<a_j, a_l>| / (||a_j|| ||a_l||); rejects zero columns.
double mutual_coherence(const Eigen::MatrixXd& A);

/// One generated sensing problem: matrix, measurements, ground truth.
struct ProblemInstance {
  std::string family;  // "gaussian" | "dct"
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
  Eigen::VectorXd x_true;
  int k = 0;
  std::uint64_t seed = 0;
  nlohmann::json params;  // family parameters, noise settings
};

void to_json(nlohmann::json& j, const ProblemInstance& inst);
void from_json(const nlohmann::json& j, ProblemInstance& inst);

}  // namespace tl1
