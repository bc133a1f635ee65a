#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "tl1/problems.hpp"
#include "tl1/rng.hpp"

using namespace tl1;

TEST_CASE("rng streams reproduce and separate") {
  RngStream a(123, 5), b(123, 5), c(123, 6);
  bool all_equal = true;
  bool any_equal_cross = false;
  for (int i = 0; i < 64; ++i) {
    const double va = a.uniform();
    all_equal = all_equal && (va == b.uniform());
    any_equal_cross = any_equal_cross || (va == c.uniform());
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_cross);
}

TEST_CASE("gaussian matrix column covariance") {
  const int m = 2000, n = 8;

  SUBCASE("independent columns at r = 0") {
    RngStream rng(9);
    const Eigen::MatrixXd A = gen_gaussian_matrix({m, n, 0.0}, rng);
    const Eigen::MatrixXd cov = (A.transpose() * A) / static_cast<double>(m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double expected = (i == j) ? 1.0 : 0.0;
        CHECK(std::abs(cov(i, j) - expected) <= 0.05);
      }
    }
  }

  SUBCASE("correlated columns at r = 0.3") {
    RngStream rng(15);
    const Eigen::MatrixXd A = gen_gaussian_matrix({m, n, 0.3}, rng);
    const Eigen::MatrixXd cov = (A.transpose() * A) / static_cast<double>(m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double expected = (i == j) ? 1.0 : 0.3;
        CHECK(std::abs(cov(i, j) - expected) <= 0.05);
      }
    }
  }

  SUBCASE("deterministic given the stream") {
    RngStream r1(77, 3), r2(77, 3);
    const Eigen::MatrixXd A1 = gen_gaussian_matrix({20, 10, 0.2}, r1);
    const Eigen::MatrixXd A2 = gen_gaussian_matrix({20, 10, 0.2}, r2);
    CHECK((A1 - A2).lpNorm<Eigen::Infinity>() == 0.0);
  }

  RngStream rng(1);
  CHECK_THROWS_AS(gen_gaussian_matrix({10, 5, 1.0}, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_gaussian_matrix({10, 5, -0.1}, rng),
                  std::invalid_argument);
}

TEST_CASE("dct matrix structure and coherence") {
  RngStream rng(4);
  const Eigen::MatrixXd A = gen_dct_matrix({100, 1000, 10.0}, rng);

  // first column is constant 1/sqrt(M): cos(0) for every omega
  const double inv = 1.0 / std::sqrt(100.0);
  for (int i = 0; i < 100; ++i) CHECK(A(i, 0) == inv);
  CHECK(A.col(0).norm() == doctest::Approx(1.0).epsilon(1e-12));

  // every column norm is at most 1
  for (int j = 0; j < 1000; ++j) CHECK(A.col(j).norm() <= 1.0 + 1e-12);

  const double mu10 = mutual_coherence(A);
  CHECK(mu10 >= 0.99);
  CHECK(mu10 <= 1.0);

  RngStream rng2(4);
  const Eigen::MatrixXd A20 = gen_dct_matrix({100, 1000, 20.0}, rng2);
  CHECK(mutual_coherence(A20) >= 0.999);

  RngStream rng3(4);
  CHECK_THROWS_AS(gen_dct_matrix({100, 1000, 0.5}, rng3),
                  std::invalid_argument);
}

TEST_CASE("signal generation respects separation") {
  SUBCASE("unconstrained support is k distinct indices") {
    RngStream rng(15);
    const Eigen::VectorXd x = gen_signal({50, 10, 0, 1.0}, rng);
    int nnz = 0;
    for (int i = 0; i < 50; ++i) nnz += (x[i] != 0.0) ? 1 : 0;
    CHECK(nnz == 10);
  }

  SUBCASE("separated support") {
    RngStream rng(16);
    for (int rep = 0; rep < 50; ++rep) {
      const Eigen::VectorXd x = gen_signal({1500, 20, 16, 1.0}, rng);
      std::vector<int> support;
      for (int i = 0; i < 1500; ++i) {
        if (x[i] != 0.0) support.push_back(i);
      }
      REQUIRE(support.size() == 20);
      for (std::size_t i = 1; i < support.size(); ++i) {
        CHECK(support[i] - support[i - 1] >= 16);
      }
    }
  }

  SUBCASE("edge positions are reachable") {
    RngStream rng(17);
    bool saw_first = false, saw_last = false;
    for (int rep = 0; rep < 400 && !(saw_first && saw_last); ++rep) {
      const Eigen::VectorXd x = gen_signal({30, 3, 5, 1.0}, rng);
      saw_first = saw_first || (x[0] != 0.0);
      saw_last = saw_last || (x[29] != 0.0);
    }
    CHECK(saw_first);
    CHECK(saw_last);
  }

  SUBCASE("k = 0 gives the zero vector") {
    RngStream rng(18);
    CHECK(gen_signal({10, 0, 0, 1.0}, rng).norm() == 0.0);
  }

  SUBCASE("infeasible separation is rejected") {
    RngStream rng(19);
    CHECK_THROWS_AS(gen_signal({10, 4, 5, 1.0}, rng), std::invalid_argument);
    // boundary case that is still feasible: k + (k-1)(sep-1) == n
    const Eigen::VectorXd x = gen_signal({6, 3, 2, 1.0}, rng);
    std::vector<int> support;
    for (int i = 0; i < 6; ++i) {
      if (x[i] != 0.0) support.push_back(i);
    }
    REQUIRE(support.size() == 3);
    CHECK(support[1] - support[0] >= 2);
    CHECK(support[2] - support[1] >= 2);
  }

  SUBCASE("amplitude scale") {
    RngStream rng(20);
    double ss = 0.0;
    const int reps = 400;
    for (int rep = 0; rep < reps; ++rep) {
      const Eigen::VectorXd x = gen_signal({40, 10, 0, 2.0}, rng);
      ss += x.squaredNorm() / 10.0;
    }
    // var = amplitude_std^2 = 4
    CHECK(ss / reps == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("noise is truncated gaussian via redraw") {
  RngStream rng(33);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(100000);

  SUBCASE("sigma = 0 leaves y untouched") {
    const Eigen::VectorXd out = apply_noise(y, {0.0, 0.0}, rng);
    CHECK((out - y).norm() == 0.0);
  }

  SUBCASE("cap is enforced and the std shrinks accordingly") {
    const Eigen::VectorXd out = apply_noise(y, {0.01, 0.01}, rng);
    double ss = 0.0;
    for (int i = 0; i < out.size(); ++i) {
      CHECK(std::abs(out[i]) <= 0.01);
      ss += out[i] * out[i];
    }
    // std of a N(0, sigma^2) redrawn into [-sigma, sigma] is 0.53956 sigma
    const double sd = std::sqrt(ss / static_cast<double>(out.size()));
    CHECK(sd > 0.0052);
    CHECK(sd < 0.0056);
  }

  SUBCASE("zero cap with positive sigma is rejected") {
    CHECK_THROWS_AS(apply_noise(y, {0.01, 0.0}, rng), std::invalid_argument);
  }
}

TEST_CASE("mutual coherence basics") {
  CHECK(mutual_coherence(Eigen::MatrixXd::Identity(5, 5)) ==
        doctest::Approx(0.0));

  Eigen::MatrixXd dup(3, 3);
  dup.setRandom();
  dup.col(2) = 2.0 * dup.col(0);
  CHECK(mutual_coherence(dup) == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::MatrixXd with_zero = Eigen::MatrixXd::Identity(3, 3);
  with_zero.col(1).setZero();
  CHECK_THROWS_AS(mutual_coherence(with_zero), std::invalid_argument);
}

TEST_CASE("instance json round trip") {
  RngStream rng(55);
  ProblemInstance inst;
  inst.family = "gaussian";
  inst.A = gen_gaussian_matrix({6, 12, 0.2}, rng);
  inst.x_true = gen_signal({12, 3, 0, 1.0}, rng);
  inst.y = inst.A * inst.x_true;
  inst.k = 3;
  inst.seed = 55;
  inst.params = {{"M", 6}, {"N", 12}, {"r", 0.2}};

  const nlohmann::json j = inst;
  const auto back = j.get<ProblemInstance>();
  CHECK(back.family == "gaussian");
  CHECK(back.k == 3);
  CHECK(back.seed == 55);
  CHECK((back.A - inst.A).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((back.y - inst.y).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((back.x_true - inst.x_true).lpNorm<Eigen::Infinity>() == 0.0);

  // the serialized text itself round-trips exactly as well
  const auto reparsed =
      nlohmann::json::parse(j.dump()).get<ProblemInstance>();
  CHECK((reparsed.A - inst.A).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((reparsed.y - inst.y).lpNorm<Eigen::Infinity>() == 0.0);
}
