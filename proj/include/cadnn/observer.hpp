#pragma once

#include <Eigen/Core>

#include "cadnn/control_law.hpp"

namespace cadnn {

/// Dynamics-observer state. f_hat is never integrated directly (that would
/// need the unmeasured state derivative); it is reconstructed from the
/// integral identity
///   f_hat(t) = f_hat(0) + k_f (rt(t) - rt(0)) + accumulator(t),
/// where rt = r - r_hat and accumulator integrates (k_f alpha2 + 1) rt.
struct ObserverState {
  Eigen::VectorXd r_hat;
  Eigen::VectorXd accumulator;
  Eigen::VectorXd r_tilde_0;  // rt at t = 0
  Eigen::VectorXd f_hat_0;    // f_hat at t = 0
};

/// Secondary dynamics estimate from the integral identity above.
Eigen::VectorXd observer_f_hat(const ObserverState& obs,
                               const Eigen::VectorXd& r, double k_f);

struct ObserverRates {
  Eigen::VectorXd r_hat_dot;
  Eigen::VectorXd accumulator_dot;
};

/// dr_hat/dt = g u - xdd_d + alpha1 (r - alpha1 e) + f_hat + alpha2 rt and
/// the accumulator rate (k_f alpha2 + 1) rt. `gu` is the product of the
/// effectiveness matrix with the applied control.
ObserverRates observer_rates(const ObserverState& obs,
                             const Eigen::VectorXd& r,
                             const Eigen::VectorXd& e,
                             const Eigen::VectorXd& gu,
                             const Eigen::VectorXd& xdd_desired,
                             const Eigen::VectorXd& f_hat, const Gains& gains);

/// E = f_hat - phi_out, the discrepancy between the observer's secondary
/// estimate of the drift and the network's estimate.
Eigen::VectorXd prediction_error(const Eigen::VectorXd& f_hat,
                                 const Eigen::VectorXd& phi_out);

}  // namespace cadnn
