#pragma once

#include <Eigen/Core>
#include <vector>

#include "cadnn/sim.hpp"

namespace cadnn {

struct PeWindow {
  double t_start = 0.0;
  double t_end = 0.0;
  double lambda_min = 0.0;  // of the windowed integral of jac^T jac
  double lambda_max = 0.0;
};

/// Extremal eigenvalues of the trapezoidal integral of jac^T jac over
/// sliding windows of the given length, advanced by `stride`. Throws when
/// the window exceeds the sampled span.
std::vector<PeWindow> pe_windows(const std::vector<double>& times,
                                 const std::vector<Eigen::MatrixXd>& jacs,
                                 double window, double stride);

/// Same, with the regressor reconstructed from the log's state samples and
/// weight checkpoints (rows that carry a theta snapshot).
std::vector<PeWindow> pe_monitor(const SimLog& log, const DnnSpec& spec,
                                 double window, double stride);

/// (|e|^2 + |r|^2 + |rt|^2 + |ft|^2) / 2; the weight-error term of the full
/// candidate function is omitted because the ideal weights are unknown.
double lyapunov_partial(const Eigen::VectorXd& e, const Eigen::VectorXd& r,
                        const Eigen::VectorXd& r_tilde,
                        const Eigen::VectorXd& f_tilde);

/// Empirical gain-condition diagnostics: the regressor bound estimated from
/// the run and the parts of the stability margin that are computable from
/// it. Descriptive output, not a proof.
struct GainConditionReport {
  double gamma3 = 0.0;        // sup_t ||Phi'||_F over the log
  double gamma3_time = 0.0;   // where the sup was attained
  double alpha3_minus_half = 0.0;
  bool alpha3_ok = false;     // alpha3 - 1/2 > 0
  /// k_theta/2 - alpha3*gamma3: meaningful as a margin only when the
  /// forgetting factor has a positive lower bound (excited regressor).
  double leak_margin_needs_beta1 = 0.0;
};

GainConditionReport gain_condition_report(const Gains& gains,
                                          const SimLog& log);

}  // namespace cadnn
