#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "tl1/rng.hpp"
#include "tl1/thresholding.hpp"

using namespace tl1;

namespace {

// Brute-force minimizer of (y-x)^2/2 + lam*sqrt(|y|), same grid+refine
// scheme as prox_oracle. Used to cross-check the half-thresholding formula.
double half_oracle(double x, double lam) {
  auto f = [&](double y) {
    return 0.5 * (y - x) * (y - x) + lam * std::sqrt(std::abs(y));
  };
  const double lo = -std::abs(x) - 1.0;
  const double hi = std::abs(x) + 1.0;
  const double step = 1e-4;
  double best_y = 0.0;
  double best_f = f(0.0);
  for (double y = lo; y <= hi; y += step) {
    if (f(y) < best_f) {
      best_f = f(y);
      best_y = y;
    }
  }
  double lb = best_y - step, ub = best_y + step;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = ub - gr * (ub - lb), d = lb + gr * (ub - lb);
  double fc = f(c), fd = f(d);
  while (ub - lb > 1e-10) {
    if (fc < fd) {
      ub = d;
      d = c;
      fd = fc;
      c = ub - gr * (ub - lb);
      fc = f(c);
    } else {
      lb = c;
      c = d;
      fc = fd;
      d = lb + gr * (ub - lb);
      fd = f(d);
    }
  }
  const double y = 0.5 * (lb + ub);
  return f(y) < f(0.0) ? y : 0.0;
}

double prox_objective(double y, double x, double theta, PenaltyParam a) {
  return 0.5 * (y - x) * (y - x) + theta * rho(std::abs(y), a);
}

}  // namespace

TEST_CASE("rho basics") {
  const PenaltyParam a1(1.0);
  CHECK(rho(0.0, a1) == 0.0);
  for (double a : {0.5, 1.0, 3.0, 10.0}) {
    CHECK(rho(1.0, PenaltyParam(a)) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(rho(2.0, a1) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(rho(-0.1, a1), std::invalid_argument);
  CHECK_THROWS_AS(PenaltyParam(0.0), std::invalid_argument);
  CHECK_THROWS_AS(PenaltyParam(-1.0), std::invalid_argument);

  // monotone increasing in t, bounded by a+1
  double prev = -1.0;
  for (double t = 0.0; t < 50.0; t += 0.5) {
    const double v = rho(t, a1);
    CHECK(v > prev);
    CHECK(v < 2.0);
    prev = v;
  }
}

TEST_CASE("rho interpolates the counting and L1 norms") {
  const PenaltyParam tiny(1e-6), huge(1e6);
  for (double t : {0.1, 1.0, 10.0}) {
    CHECK(std::abs(rho(t, tiny) - 1.0) <= 1e-4);
    CHECK(std::abs(rho(t, huge) - t) <= 1e-4);
  }
}

TEST_CASE("penalty sums componentwise") {
  CHECK(penalty(Eigen::Vector3d::Zero(), PenaltyParam(1.0)) == 0.0);
  Eigen::Vector2d pm;
  pm << 1.0, -1.0;
  CHECK(penalty(pm, PenaltyParam(3.0)) == doctest::Approx(2.0).epsilon(1e-15));
  Eigen::VectorXd single(1);
  single << 2.0;
  CHECK(penalty(single, PenaltyParam(1.0)) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("penalty subgradient component") {
  const PenaltyParam a1(1.0);
  CHECK(penalty_subgradient_component(1.0, a1) == doctest::Approx(0.5));
  CHECK(penalty_subgradient_component(-1.0, a1) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(penalty_subgradient_component(0.0, a1),
                  std::invalid_argument);

  // central difference of rho(|x|) at x = 2
  const double h = 1e-5;
  const double fd = (rho(2.0 + h, a1) - rho(2.0 - h, a1)) / (2.0 * h);
  CHECK(std::abs(penalty_subgradient_component(2.0, a1) - fd) <= 1e-6);
}

TEST_CASE("threshold parameters at pinned points") {
  const PenaltyParam a1(1.0);

  SUBCASE("critical point: all three collapse to a/2") {
    const ThresholdParams p = compute_thresholds(0.25, a1);
    CHECK(p.t1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.t2 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.t3 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.regime == Regime::Critical);
    CHECK(p.t == p.t2);
  }

  SUBCASE("supercritical") {
    const ThresholdParams p = compute_thresholds(0.5, a1);
    CHECK(p.t1 == doctest::Approx(0.889881574842).epsilon(1e-9));
    CHECK(p.t3 == doctest::Approx(std::sqrt(2.0) - 0.5).epsilon(1e-12));
    CHECK(p.t2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.regime == Regime::Supercritical);
    CHECK(p.t == p.t3);
  }

  SUBCASE("subcritical") {
    const ThresholdParams p = compute_thresholds(0.2, a1);
    CHECK(p.regime == Regime::Subcritical);
    CHECK(p.t == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(p.t == p.t2);
  }

  CHECK_THROWS_AS(compute_thresholds(0.0, a1), std::invalid_argument);
  CHECK_THROWS_AS(compute_thresholds(-1.0, a1), std::invalid_argument);
}

TEST_CASE("threshold ordering t1 <= t3 <= t2 over random parameters") {
  RngStream rng(42);
  for (int i = 0; i < 1000; ++i) {
    const double theta = 1e-6 + 10.0 * rng.uniform();
    const double a = 1e-6 + 10.0 * rng.uniform();
    const ThresholdParams p = compute_thresholds(theta, PenaltyParam(a));
    CHECK(p.t1 <= p.t3 + 1e-12);
    CHECK(p.t3 <= p.t2 + 1e-12);
    if (std::abs(p.t1 - p.t2) <= 1e-12 && std::abs(p.t3 - p.t2) <= 1e-12) {
      CHECK(std::abs(theta - critical_theta(a)) <= 1e-5);
    }
  }
  // exact criticality hits a/2 for a spread of shapes
  for (double a : {0.1, 0.5, 1.0, 2.0, 7.5}) {
    const ThresholdParams p =
        compute_thresholds(critical_theta(a), PenaltyParam(a));
    CHECK(std::abs(p.t1 - a / 2.0) <= 1e-12);
    CHECK(std::abs(p.t2 - a / 2.0) <= 1e-12);
    CHECK(std::abs(p.t3 - a / 2.0) <= 1e-12);
  }
}

TEST_CASE("g_value pinned points") {
  const PenaltyParam a1(1.0);

  // supercritical: value at the jump threshold
  const double t3 = compute_thresholds(0.5, a1).t3;
  CHECK(g_value(t3, 0.5, a1) ==
        doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-9));

  // subcritical: vanishes at the active threshold
  CHECK(std::abs(g_value(0.4, 0.2, a1)) <= 1e-9);

  // zero regularization collapses to the identity
  for (double x : {-3.0, -0.2, 0.7, 11.0}) {
    CHECK(g_value(x, 0.0, a1) == x);
  }

  // domain guard: below t1 the cubic loses its three real roots
  const double t1 = compute_thresholds(0.5, a1).t1;
  CHECK_THROWS_AS(g_value(0.5 * t1, 0.5, a1), std::domain_error);
}

TEST_CASE("g_value satisfies the defining cubic") {
  RngStream rng(7);
  for (int i = 0; i < 500; ++i) {
    const double theta = 1e-3 + 5.0 * rng.uniform();
    const double a = 0.05 + 5.0 * rng.uniform();
    const PenaltyParam ap(a);
    const ThresholdParams p = compute_thresholds(theta, ap);
    const double m = std::max(p.t1, 0.0) + 1e-3 + 5.0 * rng.uniform();
    const double x = (rng.uniform() < 0.5) ? m : -m;
    const double y = g_value(x, theta, ap);
    if (m > p.t) {
      // emitted-root bound; below the active threshold the largest root
      // may fall outside [-|x|, |x|] and the prox returns zero instead
      CHECK(std::abs(y) <= std::abs(x) * (1.0 + 1e-15));
    }
    const double d3 = std::pow(a + std::abs(x), 3.0);
    double res;
    if (x > 0) {
      res = y * (a + y) * (a + y) - x * (a + y) * (a + y) +
            theta * a * (a + 1.0);
    } else {
      res = y * (a - y) * (a - y) - x * (a - y) * (a - y) -
            theta * a * (a + 1.0);
    }
    CHECK(std::abs(res) <= 1e-8 * d3);
  }
}

TEST_CASE("prox pinned points and symmetry") {
  const PenaltyParam a1(1.0);

  CHECK(prox_tl1(0.0, 0.3, a1).value == 0.0);
  CHECK(prox_tl1(0.0, 5.0, PenaltyParam(0.3)).value == 0.0);

  // subcritical continuity just past the threshold
  CHECK(prox_tl1(0.4, 0.2, a1).value == 0.0);
  CHECK(std::abs(prox_tl1(0.4 + 1e-6, 0.2, a1).value) <= 1e-5);

  // theta = 0 acts as the identity
  CHECK(prox_tl1(1.7, 0.0, a1).value == 1.7);
  CHECK_THROWS_AS(prox_tl1(1.0, -0.1, a1), std::invalid_argument);

  // odd, magnitude-nonexpansive
  RngStream rng(11);
  for (int i = 0; i < 300; ++i) {
    const double x = 20.0 * (rng.uniform() - 0.5);
    const double theta = 1e-3 + 5.0 * rng.uniform();
    const double a = 0.05 + 5.0 * rng.uniform();
    const PenaltyParam ap(a);
    const ProxOutcome plus = prox_tl1(x, theta, ap);
    const ProxOutcome minus = prox_tl1(-x, theta, ap);
    CHECK(minus.value == -plus.value);
    CHECK(std::abs(plus.value) <= std::abs(x));
    if (plus.value != 0.0) {
      CHECK(plus.value * x > 0.0);
    }
  }
}

TEST_CASE("prox agrees with the brute-force oracle") {
  const PenaltyParam a1(1.0);
  CHECK(prox_oracle(0.0, 0.3, a1) == 0.0);

  const double v = prox_tl1(1.0, 0.5, a1).value;
  CHECK(std::abs(v) <= 1.0);
  CHECK(std::abs(v - prox_oracle(1.0, 0.5, a1)) <= 1e-6);

  RngStream rng(2024);
  for (int i = 0; i < 200; ++i) {
    const double x = 16.0 * (rng.uniform() - 0.5);
    const double theta = 1e-3 + 8.0 * rng.uniform();
    const double a = 0.05 + 8.0 * rng.uniform();
    const PenaltyParam ap(a);
    const double mine = prox_tl1(x, theta, ap).value;
    const double ref = prox_oracle(x, theta, ap);
    CHECK(prox_objective(mine, x, theta, ap) <=
          prox_objective(ref, x, theta, ap) + 1e-9);
    const double t = compute_thresholds(theta, ap).t;
    if (std::abs(std::abs(x) - t) > 1e-3) {
      CHECK(std::abs(mine - ref) <= 1e-6);
    }
  }
}

TEST_CASE("oracle resolves the supercritical jump") {
  const PenaltyParam a1(1.0);
  const double t3 = compute_thresholds(0.5, a1).t3;
  CHECK(prox_oracle(t3 - 1e-3, 0.5, a1) == 0.0);
  CHECK(std::abs(prox_oracle(t3 + 1e-3, 0.5, a1) - (std::sqrt(2.0) - 1.0)) <=
        1e-2);
}

TEST_CASE("subcritical prox is continuous at the threshold") {
  for (double theta : {0.1, 0.2}) {
    const PenaltyParam a1(1.0);
    const double t2 = compute_thresholds(theta, a1).t2;
    CHECK(prox_tl1(t2 - 1e-3, theta, a1).value == 0.0);
    CHECK(std::abs(prox_tl1(t2 + 1e-3, theta, a1).value) < 5e-3);
    CHECK(std::abs(prox_tl1(t2 + 1e-5, theta, a1).value) < 5e-5);
  }
}

TEST_CASE("supercritical prox jumps by sqrt(2 theta (a+1)) - a") {
  const struct {
    double theta;
    double a;
  } cases[] = {{0.5, 1.0}, {2.0, 1.0}, {1.0, 0.5}};
  for (const auto& c : cases) {
    const PenaltyParam ap(c.a);
    REQUIRE(c.theta > critical_theta(c.a));
    const double t3 = compute_thresholds(c.theta, ap).t3;
    const double below = prox_tl1(t3 - 1e-9, c.theta, ap).value;
    const double above = prox_tl1(t3 + 1e-9, c.theta, ap).value;
    const double jump = std::sqrt(2.0 * c.theta * (c.a + 1.0)) - c.a;
    CHECK(below == 0.0);
    CHECK(above - below >= jump - 1e-6);
    CHECK(std::abs(above - below - jump) <= 1e-6);
  }
}

TEST_CASE("at_jump flags inputs right at the active threshold") {
  const PenaltyParam a1(1.0);
  const double t3 = compute_thresholds(0.5, a1).t3;
  CHECK(prox_tl1(t3, 0.5, a1).at_jump);
  CHECK(prox_tl1(t3 - 1e-13, 0.5, a1).at_jump);
  CHECK(prox_tl1(t3 + 1e-13, 0.5, a1).at_jump);
  CHECK_FALSE(prox_tl1(t3 + 1e-3, 0.5, a1).at_jump);
  CHECK_FALSE(prox_tl1(0.0, 0.5, a1).at_jump);
}

TEST_CASE("prox is strictly increasing past the threshold") {
  for (auto [theta, a] : {std::pair{0.5, 1.0}, std::pair{0.2, 1.0}}) {
    const PenaltyParam ap(a);
    const double t = compute_thresholds(theta, ap).t;
    double prev = prox_tl1(t + 1e-6, theta, ap).value;
    for (double dx = 0.01; dx <= 5.0; dx += 0.01) {
      const double cur = prox_tl1(t + dx, theta, ap).value;
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("soft threshold") {
  CHECK(soft(0.5, 0.5) == 0.0);
  CHECK(soft(2.0, 0.5) == 1.5);
  CHECK(soft(-2.0, 0.5) == -1.5);
  CHECK(soft(0.0, 0.5) == 0.0);
}

TEST_CASE("hard threshold") {
  CHECK(hard(1.2, 0.5) == 1.2);  // cutoff sqrt(2*0.5) = 1
  CHECK(hard(0.9, 0.5) == 0.0);
  CHECK(hard(0.0, 0.5) == 0.0);
  CHECK(hard(-1.2, 0.5) == -1.2);
}

TEST_CASE("half threshold") {
  CHECK(half(0.0, 0.5) == 0.0);
  CHECK(half_threshold(0.5) == doctest::Approx(std::cbrt(54.0) / 4.0));
  CHECK(half_threshold(0.5) == doctest::Approx(0.94494).epsilon(1e-4));
  CHECK(half(0.9, 0.5) == 0.0);

  RngStream rng(99);
  int compared = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = 8.0 * (rng.uniform() - 0.5);
    const double lam = 0.05 + 2.0 * rng.uniform();
    const double mine = half(x, lam);
    const double ref = half_oracle(x, lam);
    if (std::abs(std::abs(x) - half_threshold(lam)) > 1e-3) {
      CHECK(std::abs(mine - ref) <= 1e-6);
      ++compared;
    }
  }
  CHECK(compared > 80);
}
