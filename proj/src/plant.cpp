#include "cadnn/plant.hpp"

#include <cassert>
#include <cmath>

namespace cadnn {

Eigen::Matrix2d mass_matrix(const TwoLinkParams& params,
                            const Eigen::Vector2d& x) {
  const double c2 = std::cos(x(1));
  Eigen::Matrix2d m;
  m << params.p1 + 2.0 * params.p3 * c2, params.p2 + params.p3 * c2,
      params.p2 + params.p3 * c2, params.p2;
  return m;
}

Eigen::Matrix2d coriolis_matrix(const TwoLinkParams& params,
                                const Eigen::Vector2d& x,
                                const Eigen::Vector2d& xdot) {
  const double s2 = std::sin(x(1));
  Eigen::Matrix2d vm;
  vm << -params.p3 * s2 * xdot(1), -params.p3 * s2 * (xdot(0) + xdot(1)),
      params.p3 * s2 * xdot(0), 0.0;
  return vm;
}

Eigen::Vector2d drift_f(const TwoLinkParams& params, const PlantState& state) {
  const Eigen::Matrix2d m = mass_matrix(params, state.x);
  const double det = m.determinant();
  assert(det > 0.0 && "mass matrix must be positive-definite");
  const Eigen::Vector2d w =
      (coriolis_matrix(params, state.x, state.xdot) +
       Eigen::Vector2d(params.fd1, params.fd2).asDiagonal().toDenseMatrix()) *
      state.xdot;
  Eigen::Matrix2d minv;
  minv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  minv /= det;
  return -(minv * w);
}

Effectiveness effectiveness_g(const TwoLinkParams& params,
                              const Eigen::Vector2d& x) {
  Effectiveness eff;
  eff.g_pinv = mass_matrix(params, x);
  const double det = eff.g_pinv.determinant();
  assert(det > 0.0 && "mass matrix must be positive-definite");
  eff.g << eff.g_pinv(1, 1), -eff.g_pinv(0, 1), -eff.g_pinv(1, 0),
      eff.g_pinv(0, 0);
  eff.g /= det;
  return eff;
}

Desired desired(double t) {
  const double s = std::sin(t);
  const double c = std::cos(t);
  const double u = 0.25 * std::exp(-s);  // du/dt = -c u
  Desired d;
  d.position << u * s, u * c;
  d.velocity << u * c * (1.0 - s), -u * (c * c + s);
  d.acceleration << u * (c * c * s - 2.0 * c * c - s + s * s),
      u * c * s * (3.0 - s);
  return d;
}

}  // namespace cadnn
