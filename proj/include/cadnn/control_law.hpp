#pragma once

#include <Eigen/Core>

#include "cadnn/plant.hpp"

namespace cadnn {

/// Control, observer, and adaptation gains. All must be strictly positive;
/// kappa0 must exceed the largest eigenvalue of the initial least-squares
/// gain so the forgetting factor starts positive.
struct Gains {
  double alpha1 = 5.0;   // tracking-error filter gain
  double alpha2 = 10.0;  // observer estimate feedback gain
  double alpha3 = 20.0;  // prediction-error weight in adaptation
  double k_r = 20.0;     // auxiliary-error feedback gain
  double k_f = 20.0;     // observer dynamics gain
  double k_theta = 1e-4; // sigma-modification leak gain
  double beta0 = 10.0;   // maximum forgetting rate
  double kappa0 = 2.0;   // bound on lambda_max of the adaptation gain
  double theta_bar = 10.0;        // weight-ball radius for the projection
  double projection_band = 0.05;  // smoothing band as a fraction of theta_bar
};

struct ErrorSignals {
  Eigen::VectorXd e;  // x - x_d
  Eigen::VectorXd r;  // (xd - xd_d) + alpha1 e
};

ErrorSignals tracking_errors(const PlantState& state, const Desired& des,
                             double alpha1);

/// u = g_pinv (xdd_d - (alpha1 + k_r) r + (alpha1^2 - 1) e - phi_out).
/// Throws std::invalid_argument when phi_out is non-finite.
Eigen::VectorXd control_input(const Desired& des, const ErrorSignals& errs,
                              const Eigen::VectorXd& phi_out,
                              const Eigen::MatrixXd& g_pinv,
                              const Gains& gains);

/// Continuous ball projection. Returns mu unchanged while theta_hat is
/// inside the inner ball of radius theta_bar*(1 - band) or mu points
/// inward; otherwise the outward radial component of mu is scaled down by a
/// factor that ramps linearly from 1 at the inner-band edge to 0 at
/// ||theta_hat|| = theta_bar, keeping the rate field continuous and the
/// ball forward-invariant.
Eigen::VectorXd projection(const Eigen::Ref<const Eigen::VectorXd>& mu,
                           const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                           double theta_bar, double band);

/// Composite least-squares adaptation rate
/// Gamma * proj(-k_theta theta_hat + jac^T (r + alpha3 E)).
Eigen::VectorXd composite_rhs(
    const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
    const Eigen::Ref<const Eigen::MatrixXd>& gamma,
    const Eigen::Ref<const Eigen::MatrixXd>& jac,
    const Eigen::Ref<const Eigen::VectorXd>& r,
    const Eigen::Ref<const Eigen::VectorXd>& pred_error, const Gains& gains);

/// Tracking-error-only adaptation rate with a constant gain:
/// Gamma0 * proj(-k_theta theta_hat + jac^T r). Identical to composite_rhs
/// with alpha3 = 0 and the gain frozen.
Eigen::VectorXd baseline_rhs(
    const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
    const Eigen::Ref<const Eigen::MatrixXd>& gamma0,
    const Eigen::Ref<const Eigen::MatrixXd>& jac,
    const Eigen::Ref<const Eigen::VectorXd>& r, const Gains& gains);

/// Forward gain dynamics equivalent to d/dt(Gamma^{-1}) =
/// -beta Gamma^{-1} + jac^T jac, namely
/// dGamma/dt = beta Gamma - Gamma jac^T jac Gamma.
void gamma_rate(const Eigen::Ref<const Eigen::MatrixXd>& gamma,
                const Eigen::Ref<const Eigen::MatrixXd>& jac, double beta,
                Eigen::Ref<Eigen::MatrixXd> out);
Eigen::MatrixXd gamma_rate(const Eigen::Ref<const Eigen::MatrixXd>& gamma,
                           const Eigen::Ref<const Eigen::MatrixXd>& jac,
                           double beta);

/// Bounded-gain forgetting factor beta0 (1 - lambda_max/kappa0), clamped at
/// zero when integration error pushes lambda_max past kappa0.
double forgetting_factor(double lambda_max_gamma, double beta0, double kappa0);
double forgetting_factor(const Eigen::Ref<const Eigen::MatrixXd>& gamma,
                         double beta0, double kappa0);

/// Largest eigenvalue of a symmetric matrix by power iteration. `warm` is
/// the starting vector and is overwritten with the converged direction so
/// successive calls on slowly-varying matrices converge in a few sweeps.
double lambda_max_sym(const Eigen::Ref<const Eigen::MatrixXd>& m,
                      Eigen::VectorXd& warm, double tol = 1e-10,
                      int max_iter = 2000);

/// Smallest eigenvalue via power iteration on (shift I - m) with
/// shift > lambda_max(m).
double lambda_min_sym(const Eigen::Ref<const Eigen::MatrixXd>& m,
                      double lambda_max_hint, Eigen::VectorXd& warm,
                      double tol = 1e-10, int max_iter = 2000);

}  // namespace cadnn
