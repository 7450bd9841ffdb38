#include "cadnn/observer.hpp"

namespace cadnn {

Eigen::VectorXd observer_f_hat(const ObserverState& obs,
                               const Eigen::VectorXd& r, double k_f) {
  return obs.f_hat_0 + k_f * ((r - obs.r_hat) - obs.r_tilde_0) +
         obs.accumulator;
}

ObserverRates observer_rates(const ObserverState& obs,
                             const Eigen::VectorXd& r,
                             const Eigen::VectorXd& e,
                             const Eigen::VectorXd& gu,
                             const Eigen::VectorXd& xdd_desired,
                             const Eigen::VectorXd& f_hat,
                             const Gains& gains) {
  const Eigen::VectorXd r_tilde = r - obs.r_hat;
  ObserverRates rates;
  rates.r_hat_dot = gu - xdd_desired +
                    gains.alpha1 * (r - gains.alpha1 * e) + f_hat +
                    gains.alpha2 * r_tilde;
  rates.accumulator_dot = (gains.k_f * gains.alpha2 + 1.0) * r_tilde;
  return rates;
}

Eigen::VectorXd prediction_error(const Eigen::VectorXd& f_hat,
                                 const Eigen::VectorXd& phi_out) {
  return f_hat - phi_out;
}

}  // namespace cadnn
