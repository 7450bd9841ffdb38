#include "cadnn/control_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cadnn {

ErrorSignals tracking_errors(const PlantState& state, const Desired& des,
                             double alpha1) {
  ErrorSignals errs;
  errs.e = state.x - des.position;
  errs.r = (state.xdot - des.velocity) + alpha1 * errs.e;
  return errs;
}

Eigen::VectorXd control_input(const Desired& des, const ErrorSignals& errs,
                              const Eigen::VectorXd& phi_out,
                              const Eigen::MatrixXd& g_pinv,
                              const Gains& gains) {
  if (!phi_out.allFinite()) {
    throw std::invalid_argument("control_input: non-finite feedforward");
  }
  const Eigen::VectorXd v = des.acceleration -
                            (gains.alpha1 + gains.k_r) * errs.r +
                            (gains.alpha1 * gains.alpha1 - 1.0) * errs.e -
                            phi_out;
  return g_pinv * v;
}

Eigen::VectorXd projection(const Eigen::Ref<const Eigen::VectorXd>& mu,
                           const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                           double theta_bar, double band) {
  const double norm = theta_hat.norm();
  const double inner = theta_bar * (1.0 - band);
  if (norm <= inner) return mu;
  const double outward = theta_hat.dot(mu);
  if (outward <= 0.0) return mu;
  const double ramp = std::min(1.0, (norm - inner) / (theta_bar * band));
  return mu - ramp * (outward / theta_hat.squaredNorm()) * theta_hat;
}

Eigen::VectorXd composite_rhs(
    const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
    const Eigen::Ref<const Eigen::MatrixXd>& gamma,
    const Eigen::Ref<const Eigen::MatrixXd>& jac,
    const Eigen::Ref<const Eigen::VectorXd>& r,
    const Eigen::Ref<const Eigen::VectorXd>& pred_error, const Gains& gains) {
  if (jac.cols() != theta_hat.size() || jac.rows() != r.size() ||
      r.size() != pred_error.size()) {
    throw std::invalid_argument("composite_rhs: dimension mismatch");
  }
  const Eigen::VectorXd mu =
      -gains.k_theta * theta_hat +
      jac.transpose() * (r + gains.alpha3 * pred_error);
  return gamma * projection(mu, theta_hat, gains.theta_bar,
                            gains.projection_band);
}

Eigen::VectorXd baseline_rhs(
    const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
    const Eigen::Ref<const Eigen::MatrixXd>& gamma0,
    const Eigen::Ref<const Eigen::MatrixXd>& jac,
    const Eigen::Ref<const Eigen::VectorXd>& r, const Gains& gains) {
  if (jac.cols() != theta_hat.size() || jac.rows() != r.size()) {
    throw std::invalid_argument("baseline_rhs: dimension mismatch");
  }
  const Eigen::VectorXd mu = -gains.k_theta * theta_hat + jac.transpose() * r;
  return gamma0 * projection(mu, theta_hat, gains.theta_bar,
                             gains.projection_band);
}

void gamma_rate(const Eigen::Ref<const Eigen::MatrixXd>& gamma,
                const Eigen::Ref<const Eigen::MatrixXd>& jac, double beta,
                Eigen::Ref<Eigen::MatrixXd> out) {
  // Gamma jac^T jac Gamma written as W W^T with W = Gamma jac^T keeps the
  // cost linear in the output dimension and the result exactly symmetric.
  const Eigen::MatrixXd w = gamma * jac.transpose();
  out = beta * gamma;
  out.noalias() -= w * w.transpose();
}

Eigen::MatrixXd gamma_rate(const Eigen::Ref<const Eigen::MatrixXd>& gamma,
                           const Eigen::Ref<const Eigen::MatrixXd>& jac,
                           double beta) {
  Eigen::MatrixXd out(gamma.rows(), gamma.cols());
  gamma_rate(gamma, jac, beta, out);
  return out;
}

double forgetting_factor(double lambda_max_gamma, double beta0,
                         double kappa0) {
  return std::max(0.0, beta0 * (1.0 - lambda_max_gamma / kappa0));
}

double forgetting_factor(const Eigen::Ref<const Eigen::MatrixXd>& gamma,
                         double beta0, double kappa0) {
  Eigen::VectorXd warm = Eigen::VectorXd::Ones(gamma.rows()).normalized();
  return forgetting_factor(lambda_max_sym(gamma, warm), beta0, kappa0);
}

double lambda_max_sym(const Eigen::Ref<const Eigen::MatrixXd>& m,
                      Eigen::VectorXd& warm, double tol, int max_iter) {
  if (warm.size() != m.rows() || warm.norm() < 1e-300) {
    warm = Eigen::VectorXd::Ones(m.rows()).normalized();
  } else {
    warm.normalize();
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  double lambda = 0.0;
  Eigen::VectorXd w(m.rows());
  for (int it = 0; it < max_iter; ++it) {
    w.noalias() = m * warm;
    lambda = warm.dot(w);
    const double resid = (w - lambda * warm).norm();
    const double wn = w.norm();
    if (wn < 1e-300) return 0.0;  // warm lies in the null space of m
    warm = w / wn;
    if (resid <= tol * scale) break;
  }
  return lambda;
}

double lambda_min_sym(const Eigen::Ref<const Eigen::MatrixXd>& m,
                      double lambda_max_hint, Eigen::VectorXd& warm,
                      double tol, int max_iter) {
  const double shift = lambda_max_hint + std::max(1.0, lambda_max_hint);
  Eigen::MatrixXd shifted = -m;
  shifted.diagonal().array() += shift;
  return shift - lambda_max_sym(shifted, warm, tol, max_iter);
}

}  // namespace cadnn
