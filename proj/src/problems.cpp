#include "tl1/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace tl1 {

namespace {
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
}

Eigen::MatrixXd gen_gaussian_matrix(const GaussianMatrixSpec& spec,
                                    RngStream& rng) {
  if (spec.m < 1 || spec.n < 1) {
    throw std::invalid_argument("gen_gaussian_matrix: m, n must be >= 1");
  }
  if (spec.r < 0.0 || spec.r >= 1.0) {
    throw std::invalid_argument("gen_gaussian_matrix: r must lie in [0, 1)");
  }
  // Rank-one-plus-diagonal factorization of Sigma: each row is
  // sqrt(r)*g0*ones + sqrt(1-r)*g, exact in distribution and O(MN).
  const double sr = std::sqrt(spec.r);
  const double sc = std::sqrt(1.0 - spec.r);
  Eigen::MatrixXd A(spec.m, spec.n);
  for (int i = 0; i < spec.m; ++i) {
    const double g0 = rng.normal();
    for (int j = 0; j < spec.n; ++j) {
      A(i, j) = sr * g0 + sc * rng.normal();
    }
  }
  return A;
}

Eigen::MatrixXd gen_dct_matrix(const DctMatrixSpec& spec, RngStream& rng) {
  if (spec.m < 1 || spec.n < 1) {
    throw std::invalid_argument("gen_dct_matrix: m, n must be >= 1");
  }
  if (!(spec.f >= 1.0)) {
    throw std::invalid_argument("gen_dct_matrix: f must be >= 1");
  }
  Eigen::VectorXd omega(spec.m);
  for (int i = 0; i < spec.m; ++i) omega[i] = rng.uniform_open();

  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.m));
  Eigen::MatrixXd A(spec.m, spec.n);
  for (int j = 0; j < spec.n; ++j) {
    for (int i = 0; i < spec.m; ++i) {
      A(i, j) = scale * std::cos(kTwoPi * omega[i] * j / spec.f);
    }
  }
  return A;
}

Eigen::VectorXd gen_signal(const SignalSpec& spec, RngStream& rng) {
  if (spec.n < 1 || spec.k < 0 || spec.k > spec.n) {
    throw std::invalid_argument("gen_signal: need 0 <= k <= n, n >= 1");
  }
  if (spec.min_sep < 0 || !(spec.amplitude_std > 0.0)) {
    throw std::invalid_argument("gen_signal: bad min_sep or amplitude_std");
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(spec.n);
  if (spec.k == 0) return x;

  // Sorted-gap construction: a uniform k-subset of a shrunk index range,
  // shifted back out, is uniform over supports with pairwise gaps >= sep.
  const long long sep = std::max(spec.min_sep, 1);
  const long long range =
      static_cast<long long>(spec.n) -
      static_cast<long long>(spec.k - 1) * (sep - 1);
  if (range < spec.k) {
    throw std::invalid_argument("gen_signal: infeasible support separation");
  }

  std::unordered_set<long long> seen;
  std::vector<long long> picks;
  picks.reserve(spec.k);
  while (static_cast<int>(picks.size()) < spec.k) {
    const auto v = static_cast<long long>(
        rng.uniform_int(static_cast<std::uint64_t>(range)));
    if (seen.insert(v).second) picks.push_back(v);
  }
  std::sort(picks.begin(), picks.end());

  for (int j = 0; j < spec.k; ++j) {
    const long long idx = picks[j] + static_cast<long long>(j) * (sep - 1);
    x[static_cast<Eigen::Index>(idx)] = spec.amplitude_std * rng.normal();
  }
  return x;
}

Eigen::VectorXd apply_noise(const Eigen::VectorXd& y, const NoiseSpec& spec,
                            RngStream& rng) {
  if (spec.sigma < 0.0 || spec.linf_cap < 0.0) {
    throw std::invalid_argument("apply_noise: sigma and cap must be >= 0");
  }
  if (spec.sigma == 0.0) return y;
  if (spec.linf_cap == 0.0) {
    throw std::invalid_argument(
        "apply_noise: linf_cap must be positive when sigma > 0");
  }
  Eigen::VectorXd out = y;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    double e;
    do {
      e = spec.sigma * rng.normal();
    } while (std::abs(e) > spec.linf_cap);
    out[i] += e;
  }
  return out;
}

double mutual_coherence(const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.cols();
  if (n < 2) {
    throw std::invalid_argument("mutual_coherence: need at least two columns");
  }
  Eigen::VectorXd norms(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    norms[j] = A.col(j).norm();
    if (norms[j] == 0.0) {
      throw std::invalid_argument("mutual_coherence: zero column");
    }
  }
  const Eigen::MatrixXd An = A * norms.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd G = An.transpose() * An;
  double best = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = j + 1; l < n; ++l) {
      best = std::max(best, std::abs(G(j, l)));
    }
  }
  return best;
}

void to_json(nlohmann::json& j, const ProblemInstance& inst) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < inst.A.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < inst.A.cols(); ++c) row.push_back(inst.A(i, c));
    rows.push_back(std::move(row));
  }
  j = nlohmann::json{
      {"A", std::move(rows)},
      {"y", std::vector<double>(inst.y.begin(), inst.y.end())},
      {"x_true", std::vector<double>(inst.x_true.begin(), inst.x_true.end())},
      {"k", inst.k},
      {"seed", inst.seed},
      {"family", inst.family},
      {"params", inst.params}};
}

void from_json(const nlohmann::json& j, ProblemInstance& inst) {
  const auto& rows = j.at("A");
  const auto m = static_cast<Eigen::Index>(rows.size());
  if (m == 0) throw std::invalid_argument("instance: matrix A is empty");
  const auto n = static_cast<Eigen::Index>(rows.at(0).size());
  inst.A.resize(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw std::invalid_argument("instance: ragged matrix A");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      inst.A(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
  }
  const auto y = j.at("y").get<std::vector<double>>();
  const auto xt = j.at("x_true").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(y.size()) != m) {
    throw std::invalid_argument("instance: y length does not match A");
  }
  if (static_cast<Eigen::Index>(xt.size()) != n) {
    throw std::invalid_argument("instance: x_true length does not match A");
  }
  inst.y = Eigen::Map<const Eigen::VectorXd>(y.data(), m);
  inst.x_true = Eigen::Map<const Eigen::VectorXd>(xt.data(), n);
  inst.k = j.at("k").get<int>();
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.family = j.at("family").get<std::string>();
  inst.params = j.value("params", nlohmann::json::object());
}

}  // namespace tl1
