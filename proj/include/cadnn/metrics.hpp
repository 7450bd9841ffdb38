#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "cadnn/sim.hpp"

namespace cadnn {

/// sqrt of the mean squared norm of the samples whose time stamp falls in
/// [t0, t1]. Throws std::invalid_argument when no sample does.
double rms_metric(std::span<const double> times,
                  std::span<const Eigen::Vector2d> samples, double t0,
                  double t1);

/// Steady-state tracking RMS in degrees over [t0, t1].
double tracking_rms_deg(const SimLog& log, double t0, double t1);

/// Steady-state RMS of ||f - Phi(X, theta_hat)|| over [t0, t1].
double approx_err_rms(const SimLog& log, double t0, double t1);

/// RMS of ||f(x, xd) - Phi(X, theta)|| over n_points inputs with all four
/// components drawn i.i.d. U(-0.25, 0.25) from the given seed. The drift
/// ground truth comes from the config (two-link model or truth DNN).
double test_set_eval(const SimConfig& cfg, const Eigen::VectorXd& theta,
                     int n_points, std::uint64_t seed);

struct RunMetrics {
  double e_rms_deg = 0.0;
  double f_err_rms_traj = 0.0;
  double f_err_rms_test = 0.0;
};

/// The three steady-state metrics of a completed run, using the config's
/// window and test-set settings and the run's final weights.
RunMetrics run_metrics(const SimLog& log, const SimConfig& cfg);

/// 100 (base - other) / base.
double percent_decrease(double base, double other);

double median(std::vector<double> values);

struct PairOutcome {
  std::uint64_t seed = 0;
  bool valid = false;  // both runs completed
  RunMetrics baseline;
  RunMetrics composite;
  double dec_e = 0.0;
  double dec_traj = 0.0;
  double dec_test = 0.0;
};

struct CompareReport {
  std::vector<PairOutcome> pairs;
  bool valid = false;  // every pair valid
  RunMetrics baseline_median;
  RunMetrics composite_median;
  double dec_e_of_medians = 0.0;
  double dec_traj_of_medians = 0.0;
  double dec_test_of_medians = 0.0;
};

/// Runs baseline and composite with identical initialization for each of
/// n_seeds seeds (cfg.seed, cfg.seed+1, ...) and aggregates median metrics.
/// per_run, when given, receives every finished run (for CSV emission).
using RunSink = std::function<void(const SimConfig&, const SimLog&)>;
CompareReport compare_experiment(const SimConfig& cfg, int n_seeds,
                                 const RunSink& per_run = {});

}  // namespace cadnn
