#include "cadnn/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <stdexcept>

namespace cadnn {

std::vector<PeWindow> pe_windows(const std::vector<double>& times,
                                 const std::vector<Eigen::MatrixXd>& jacs,
                                 double window, double stride) {
  if (times.size() != jacs.size() || times.size() < 2) {
    throw std::invalid_argument("pe_windows: need at least two samples");
  }
  if (!(window > 0.0) || !(stride > 0.0)) {
    throw std::invalid_argument("pe_windows: window and stride must be > 0");
  }
  if (window > times.back() - times.front() + 1e-12) {
    throw std::invalid_argument("pe_windows: window longer than the record");
  }

  const Eigen::Index p = jacs.front().cols();
  std::vector<Eigen::MatrixXd> grams;
  grams.reserve(jacs.size());
  for (const Eigen::MatrixXd& j : jacs) {
    grams.push_back(j.transpose() * j);
  }

  std::vector<PeWindow> out;
  for (double t0 = times.front(); t0 + window <= times.back() + 1e-9;
       t0 += stride) {
    const double t1 = t0 + window;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
      const double a = times[i];
      const double b = times[i + 1];
      if (b <= t0 || a >= t1) continue;
      // trapezoid over the part of [a, b] inside the window
      const double lo = std::max(a, t0);
      const double hi = std::min(b, t1);
      acc += 0.5 * (hi - lo) * (grams[i] + grams[i + 1]);
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(acc);
    PeWindow w;
    w.t_start = t0;
    w.t_end = t1;
    w.lambda_min = eig.eigenvalues().minCoeff();
    w.lambda_max = eig.eigenvalues().maxCoeff();
    out.push_back(w);
  }
  return out;
}

std::vector<PeWindow> pe_monitor(const SimLog& log, const DnnSpec& spec,
                                 double window, double stride) {
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> jacs;
  for (const LogRow& row : log.rows) {
    if (!row.theta) continue;
    Eigen::VectorXd input(4);
    input << row.x, row.xdot;
    times.push_back(row.t);
    jacs.push_back(jacobian(spec, *row.theta, input));
  }
  return pe_windows(times, jacs, window, stride);
}

double lyapunov_partial(const Eigen::VectorXd& e, const Eigen::VectorXd& r,
                        const Eigen::VectorXd& r_tilde,
                        const Eigen::VectorXd& f_tilde) {
  return 0.5 * (e.squaredNorm() + r.squaredNorm() + r_tilde.squaredNorm() +
                f_tilde.squaredNorm());
}

GainConditionReport gain_condition_report(const Gains& gains,
                                          const SimLog& log) {
  GainConditionReport rep;
  for (const LogRow& row : log.rows) {
    if (row.phi_jac_fro > rep.gamma3) {
      rep.gamma3 = row.phi_jac_fro;
      rep.gamma3_time = row.t;
    }
  }
  rep.alpha3_minus_half = gains.alpha3 - 0.5;
  rep.alpha3_ok = rep.alpha3_minus_half > 0.0;
  rep.leak_margin_needs_beta1 =
      0.5 * gains.k_theta - gains.alpha3 * rep.gamma3;
  return rep;
}

}  // namespace cadnn
