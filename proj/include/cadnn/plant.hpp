#pragma once

#include <Eigen/Core>

namespace cadnn {

struct PlantState {
  Eigen::Vector2d x;     // joint angles, rad
  Eigen::Vector2d xdot;  // joint rates, rad/s
};

/// Planar two-link manipulator constants: inertia terms of the mass matrix
/// and viscous joint friction. The model is gravity-free,
///   M(x) xdd + Vm(x, xd) xd + Fd xd = tau.
struct TwoLinkParams {
  double p1 = 3.473;  // kg m^2
  double p2 = 0.196;
  double p3 = 0.242;
  double fd1 = 5.3;  // N m s / rad
  double fd2 = 1.1;
};

Eigen::Matrix2d mass_matrix(const TwoLinkParams& params,
                            const Eigen::Vector2d& x);
Eigen::Matrix2d coriolis_matrix(const TwoLinkParams& params,
                                const Eigen::Vector2d& x,
                                const Eigen::Vector2d& xdot);

/// Drift term of the acceleration-form dynamics xdd = f + g u:
/// f = -M(x)^{-1} (Vm(x, xd) + Fd) xd.
Eigen::Vector2d drift_f(const TwoLinkParams& params, const PlantState& state);

struct Effectiveness {
  Eigen::Matrix2d g;       // M(x)^{-1}
  Eigen::Matrix2d g_pinv;  // right pseudo-inverse; equals M(x) here
};

/// Control effectiveness g = M(x)^{-1} and its pseudo-inverse. M is
/// positive-definite for all x with the default constants, so g is square
/// full-rank and g_pinv is exactly the mass matrix.
Effectiveness effectiveness_g(const TwoLinkParams& params,
                              const Eigen::Vector2d& x);

struct Desired {
  Eigen::Vector2d position;
  Eigen::Vector2d velocity;
  Eigen::Vector2d acceleration;
};

/// Reference trajectory x_d(t) = 0.25 exp(-sin t) [sin t, cos t]^T with
/// analytic first and second time derivatives.
Desired desired(double t);

}  // namespace cadnn
