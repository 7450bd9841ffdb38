#include "cadnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace cadnn {

namespace {

constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

double uniform_real(std::mt19937_64& gen, double lo, double hi) {
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

double rms_metric(std::span<const double> times,
                  std::span<const Eigen::Vector2d> samples, double t0,
                  double t1) {
  if (times.size() != samples.size()) {
    throw std::invalid_argument("rms_metric: times/samples size mismatch");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t0 || times[i] > t1) continue;
    sum += samples[i].squaredNorm();
    ++count;
  }
  if (count == 0) throw std::invalid_argument("rms_metric: empty window");
  return std::sqrt(sum / static_cast<double>(count));
}

double tracking_rms_deg(const SimLog& log, double t0, double t1) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const LogRow& row : log.rows) {
    if (row.t < t0 || row.t > t1) continue;
    sum += (kRadToDeg * row.e).squaredNorm();
    ++count;
  }
  if (count == 0) throw std::invalid_argument("empty metrics window");
  return std::sqrt(sum / static_cast<double>(count));
}

double approx_err_rms(const SimLog& log, double t0, double t1) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const LogRow& row : log.rows) {
    if (row.t < t0 || row.t > t1) continue;
    sum += row.f_minus_phi_norm * row.f_minus_phi_norm;
    ++count;
  }
  if (count == 0) throw std::invalid_argument("empty metrics window");
  return std::sqrt(sum / static_cast<double>(count));
}

double test_set_eval(const SimConfig& cfg, const Eigen::VectorXd& theta,
                     int n_points, std::uint64_t seed) {
  const auto drift = truth_drift(cfg);
  std::mt19937_64 gen(seed);
  double sum = 0.0;
  Eigen::VectorXd input(4);
  for (int i = 0; i < n_points; ++i) {
    for (int j = 0; j < 4; ++j) input(j) = uniform_real(gen, -0.25, 0.25);
    const Eigen::Vector2d f = drift(input.head<2>(), input.tail<2>());
    const Eigen::VectorXd phi = forward(cfg.dnn, theta, input);
    sum += (f - Eigen::Vector2d(phi)).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(n_points));
}

RunMetrics run_metrics(const SimLog& log, const SimConfig& cfg) {
  RunMetrics m;
  m.e_rms_deg = tracking_rms_deg(log, cfg.window_start, cfg.window_end);
  m.f_err_rms_traj = approx_err_rms(log, cfg.window_start, cfg.window_end);
  m.f_err_rms_test =
      test_set_eval(cfg, log.theta_final, cfg.test_points, cfg.test_seed);
  return m;
}

double percent_decrease(double base, double other) {
  return 100.0 * (base - other) / base;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return (n % 2 == 1) ? values[n / 2]
                      : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

CompareReport compare_experiment(const SimConfig& cfg, int n_seeds,
                                 const RunSink& per_run) {
  if (n_seeds < 1) throw std::invalid_argument("need at least one seed");
  CompareReport report;
  report.valid = true;
  for (int i = 0; i < n_seeds; ++i) {
    PairOutcome pair;
    pair.seed = cfg.seed + static_cast<std::uint64_t>(i);

    SimConfig base_cfg = cfg;
    base_cfg.seed = pair.seed;
    base_cfg.controller = ControllerKind::Baseline;
    SimConfig comp_cfg = base_cfg;
    comp_cfg.controller = ControllerKind::Composite;

    const SimLog base_log = run_simulation(base_cfg);
    if (per_run) per_run(base_cfg, base_log);
    const SimLog comp_log = run_simulation(comp_cfg);
    if (per_run) per_run(comp_cfg, comp_log);

    pair.valid = base_log.status == RunStatus::Completed &&
                 comp_log.status == RunStatus::Completed;
    if (pair.valid) {
      pair.baseline = run_metrics(base_log, base_cfg);
      pair.composite = run_metrics(comp_log, comp_cfg);
      pair.dec_e =
          percent_decrease(pair.baseline.e_rms_deg, pair.composite.e_rms_deg);
      pair.dec_traj = percent_decrease(pair.baseline.f_err_rms_traj,
                                       pair.composite.f_err_rms_traj);
      pair.dec_test = percent_decrease(pair.baseline.f_err_rms_test,
                                       pair.composite.f_err_rms_test);
    } else {
      report.valid = false;
    }
    report.pairs.push_back(std::move(pair));
  }

  if (report.valid) {
    std::vector<double> be, bt, bs, ce, ct, cs;
    for (const PairOutcome& pair : report.pairs) {
      be.push_back(pair.baseline.e_rms_deg);
      bt.push_back(pair.baseline.f_err_rms_traj);
      bs.push_back(pair.baseline.f_err_rms_test);
      ce.push_back(pair.composite.e_rms_deg);
      ct.push_back(pair.composite.f_err_rms_traj);
      cs.push_back(pair.composite.f_err_rms_test);
    }
    report.baseline_median = {median(be), median(bt), median(bs)};
    report.composite_median = {median(ce), median(ct), median(cs)};
    report.dec_e_of_medians = percent_decrease(
        report.baseline_median.e_rms_deg, report.composite_median.e_rms_deg);
    report.dec_traj_of_medians =
        percent_decrease(report.baseline_median.f_err_rms_traj,
                         report.composite_median.f_err_rms_traj);
    report.dec_test_of_medians =
        percent_decrease(report.baseline_median.f_err_rms_test,
                         report.composite_median.f_err_rms_test);
  }
  return report;
}

}  // namespace cadnn
