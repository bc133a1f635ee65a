#pragma once

#include <Eigen/Core>

namespace tl1 {

/// Shape parameter of the transformed-L1 penalty rho_a(t) = (a+1)t/(a+t).
/// Small a makes the penalty count nonzeros, large a makes it behave like
/// the plain L1 norm.
class PenaltyParam {
 public:
  explicit PenaltyParam(double a);
  double value() const noexcept { return a_; }

 private:
  double a_;
};

enum class Regime { Subcritical, Critical, Supercritical };

/// The critical value of theta = lambda*mu separating the continuous
/// (subcritical) and jump (supercritical) shapes of the TL1 threshold map.
inline double critical_theta(double a) { return a * a / (2.0 * (a + 1.0)); }

/// Threshold parameters of the scalar TL1 proximal map at a given
/// effective regularization theta. t is the active threshold: t2 in the
/// sub/critical regime, t3 in the supercritical one. t1 <= t3 <= t2 always,
/// with all three equal to a/2 exactly at theta = a^2/(2(a+1)).
struct ThresholdParams {
  double theta;
  double a;
  double t1;
  double t2;
  double t3;
  Regime regime;
  double t;
};

struct ProxOutcome {
  double value;
  bool at_jump;  // |input| within tolerance of the active threshold
};

/// Scalar penalty rho_a(t) = (a+1)t/(a+t) for t >= 0.
double rho(double t, PenaltyParam a);

/// P_a(x) = sum_i rho_a(|x_i|).
double penalty(const Eigen::VectorXd& x, PenaltyParam a);

/// d/dx rho_a(|x|) = a(a+1)sign(x)/(a+|x|)^2, defined for x != 0 only.
double penalty_subgradient_component(double x, PenaltyParam a);

/// Threshold parameters (t1, t2, t3), regime and active threshold for
/// theta > 0, a > 0.
ThresholdParams compute_thresholds(double theta, PenaltyParam a);

/// Largest real root of y(a+y)^2 - x(a+y)^2 + theta*a(a+1) = 0 for x > 0
/// (mirrored for x < 0), in trigonometric closed form. Requires |x| > t1 so
/// that the cubic has three distinct real roots; theta = 0 collapses to the
/// identity. |g(x)| <= |x|.
double g_value(double x, double theta, PenaltyParam a);

/// Global minimizer of f(y) = (y-x)^2/2 + theta*rho_a(|y|): zero for
/// |x| <= t, g_value(x) above the active threshold. Odd in x, total on the
/// reals; theta = 0 is the identity map.
ProxOutcome prox_tl1(double x, double theta, PenaltyParam a);

/// Componentwise vector form of the TL1 proximal map.
Eigen::VectorXd prox_tl1(const Eigen::VectorXd& x, double theta,
                         PenaltyParam a);

/// Brute-force minimizer of f(y) = (y-x)^2/2 + theta*rho_a(|y|): dense grid
/// scan at step 1e-4 over [-|x|-1, |x|+1], golden-section refinement of the
/// best bracket to width 1e-10, with y = 0 always compared explicitly.
/// Independent of the closed-form path; used to cross-check it.
double prox_oracle(double x, double theta, PenaltyParam a);

/// Soft threshold: 0 for |x| <= lam, else x - sign(x)*lam.
double soft(double x, double lam);

/// Hard threshold: x for |x| > sqrt(2*lam), else 0.
double hard(double x, double lam);

/// Half (L1/2) threshold: 0 for |x| <= half_threshold(lam), else
/// (2/3)x(1 + cos(2pi/3 - (2/3)*arccos((lam/4)(|x|/3)^{-3/2}))).
double half(double x, double lam);

/// The half-thresholding cutoff (54)^{1/3}/4 * (2*lam)^{2/3}.
double half_threshold(double lam);

}  // namespace tl1
