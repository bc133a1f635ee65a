#include "tl1/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tl1 {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Tolerances on regime classification and on the arccos domain. The domain
// boundary |x| = t1 is exact in reals but not in floats.
constexpr double kRegimeTol = 1e-12;
constexpr double kClampTol = 1e-12;

double sgn(double x) { return (x > 0.0) ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

PenaltyParam::PenaltyParam(double a) : a_(a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("PenaltyParam: a must be positive and finite");
  }
}

double rho(double t, PenaltyParam a) {
  if (t < 0.0 || !std::isfinite(t)) {
    throw std::invalid_argument("rho: t must be nonnegative and finite");
  }
  const double av = a.value();
  return (av + 1.0) * t / (av + t);
}

double penalty(const Eigen::VectorXd& x, PenaltyParam a) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sum += rho(std::abs(x[i]), a);
  }
  return sum;
}

double penalty_subgradient_component(double x, PenaltyParam a) {
  if (x == 0.0) {
    throw std::invalid_argument(
        "penalty_subgradient_component: undefined at x = 0");
  }
  const double av = a.value();
  const double d = av + std::abs(x);
  return av * (av + 1.0) * sgn(x) / (d * d);
}

ThresholdParams compute_thresholds(double theta, PenaltyParam a) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("compute_thresholds: theta must be positive");
  }
  const double av = a.value();
  ThresholdParams p{};
  p.theta = theta;
  p.a = av;
  p.t1 = 3.0 / std::pow(2.0, 2.0 / 3.0) *
             std::cbrt(theta * av * (av + 1.0)) -
         av;
  p.t2 = theta * (av + 1.0) / av;
  p.t3 = std::sqrt(2.0 * theta * (av + 1.0)) - av / 2.0;

  const double crit = critical_theta(av);
  if (std::abs(theta - crit) <= kRegimeTol) {
    p.regime = Regime::Critical;
  } else if (theta > crit) {
    p.regime = Regime::Supercritical;
  } else {
    p.regime = Regime::Subcritical;
  }
  // The critical case lands on the subcritical branch; t2 = t3 there anyway.
  p.t = (p.regime == Regime::Supercritical) ? p.t3 : p.t2;
  return p;
}

double g_value(double x, double theta, PenaltyParam a) {
  if (theta < 0.0 || !std::isfinite(theta)) {
    throw std::invalid_argument("g_value: theta must be nonnegative");
  }
  if (theta == 0.0) return x;  // analytic limit: identity

  const double av = a.value();
  const double m = std::abs(x);
  const double d = av + m;
  double arg = 1.0 - 27.0 * theta * av * (av + 1.0) / (2.0 * d * d * d);
  if (arg < -1.0) {
    if (arg < -1.0 - kClampTol) {
      throw std::domain_error(
          "g_value: |x| <= t1, cubic has no three distinct real roots");
    }
    arg = -1.0;
  }
  if (arg > 1.0) arg = 1.0;

  const double phi = std::acos(arg);
  const double g =
      (2.0 / 3.0) * d * std::cos(phi / 3.0) - 2.0 * av / 3.0 + m / 3.0;
  return sgn(x) * g;
}

ProxOutcome prox_tl1(double x, double theta, PenaltyParam a) {
  if (theta < 0.0 || !std::isfinite(theta)) {
    throw std::invalid_argument("prox_tl1: theta must be nonnegative");
  }
  if (theta == 0.0) return {x, false};

  const ThresholdParams p = compute_thresholds(theta, a);
  const double m = std::abs(x);
  const bool at_jump = std::abs(m - p.t) <= 1e-12 * std::max(1.0, p.t);
  if (m <= p.t) return {0.0, at_jump};
  // Past the threshold the emitted root lies in [0, m]; keep rounding from
  // breaking that.
  const double g = std::clamp(g_value(m, theta, a), 0.0, m);
  return {sgn(x) * g, at_jump};
}

Eigen::VectorXd prox_tl1(const Eigen::VectorXd& x, double theta,
                         PenaltyParam a) {
  if (theta < 0.0 || !std::isfinite(theta)) {
    throw std::invalid_argument("prox_tl1: theta must be nonnegative");
  }
  Eigen::VectorXd out(x.size());
  if (theta == 0.0) {
    out = x;
    return out;
  }
  const ThresholdParams p = compute_thresholds(theta, a);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double m = std::abs(x[i]);
    out[i] = (m <= p.t)
                 ? 0.0
                 : sgn(x[i]) * std::clamp(g_value(m, theta, a), 0.0, m);
  }
  return out;
}

double prox_oracle(double x, double theta, PenaltyParam a) {
  if (theta < 0.0 || !std::isfinite(theta)) {
    throw std::invalid_argument("prox_oracle: theta must be nonnegative");
  }
  auto f = [&](double y) {
    const double d = y - x;
    return 0.5 * d * d + theta * rho(std::abs(y), a);
  };

  const double lo = -std::abs(x) - 1.0;
  const double hi = std::abs(x) + 1.0;
  const double step = 1e-4;
  const auto n = static_cast<long>(std::ceil((hi - lo) / step));

  double best_y = 0.0;
  double best_f = f(0.0);
  for (long i = 0; i <= n; ++i) {
    const double y = std::min(lo + static_cast<double>(i) * step, hi);
    const double fy = f(y);
    if (fy < best_f) {
      best_f = fy;
      best_y = y;
    }
  }

  // Golden-section refinement of the winning bracket.
  double lb = std::max(lo, best_y - step);
  double ub = std::min(hi, best_y + step);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = ub - gr * (ub - lb);
  double d = lb + gr * (ub - lb);
  double fc = f(c);
  double fd = f(d);
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
  const double y_ref = 0.5 * (lb + ub);
  // f has a kink at zero; always compare against it explicitly.
  return (f(y_ref) < f(0.0)) ? y_ref : 0.0;
}

double soft(double x, double lam) {
  if (std::abs(x) <= lam) return 0.0;
  return x - sgn(x) * lam;
}

double hard(double x, double lam) {
  return (std::abs(x) > std::sqrt(2.0 * lam)) ? x : 0.0;
}

double half_threshold(double lam) {
  return std::cbrt(54.0) / 4.0 * std::pow(2.0 * lam, 2.0 / 3.0);
}

double half(double x, double lam) {
  const double m = std::abs(x);
  if (m <= half_threshold(lam)) return 0.0;
  // f_{2*lam,1/2} with Phi_{2*lam}(x) = arccos((lam/4)(|x|/3)^{-3/2}).
  double arg = (2.0 * lam / 8.0) * std::pow(m / 3.0, -1.5);
  arg = std::clamp(arg, -1.0, 1.0);
  const double phi = std::acos(arg);
  return (2.0 / 3.0) * x *
         (1.0 + std::cos(2.0 * kPi / 3.0 - (2.0 / 3.0) * phi));
}

}  // namespace tl1
