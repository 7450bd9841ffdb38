#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cadnn/control_law.hpp"
#include "cadnn/dnn.hpp"
#include "cadnn/observer.hpp"
#include "cadnn/plant.hpp"

namespace cadnn {

enum class ControllerKind { Composite, Baseline };

std::string controller_name(ControllerKind kind);
ControllerKind controller_from_name(const std::string& name);

/// Full description of one closed-loop run. Identical configs (including
/// seed) produce bit-identical logs.
struct SimConfig {
  double duration = 100.0;  // s
  double step = 1e-3;       // s
  int decimation = 10;      // log every this many steps
  ControllerKind controller = ControllerKind::Composite;
  Gains gains;
  DnnSpec dnn;
  TwoLinkParams plant;
  std::uint64_t seed = 1;  // drives the initial weight draw

  Eigen::Vector2d x0{1.0, -1.0};
  Eigen::Vector2d xdot0{0.0, 0.0};
  Eigen::Vector2d f_hat0{0.0, 0.0};
  std::optional<Eigen::Vector2d> r_hat0;  // default: r(0), so rt(0) = 0

  /// Initial weight estimate; defaults to U(-0.5, 0.5) drawn from `seed`.
  std::optional<Eigen::VectorXd> theta0;

  /// When set, the plant drift is the DNN evaluated at these weights
  /// instead of the two-link model (the effectiveness matrix stays
  /// M(x)^{-1}).
  std::optional<Eigen::VectorXd> truth_theta;

  double gamma0_scale = 1.0;  // Gamma(0) = scale * I
  double blow_up = 1e6;       // abort when a state norm exceeds this

  double window_start = 50.0;  // steady-state metrics window
  double window_end = 100.0;
  int test_points = 100;
  std::uint64_t test_seed = 12345;
  int theta_checkpoint_stride = 10;  // in logged rows
};

/// Throws std::invalid_argument when the config violates an invariant
/// (non-positive gains, kappa0 <= gamma0_scale, bad step/decimation, ...).
void validate_config(const SimConfig& cfg);

/// Number of integration steps; duration must be an integer multiple of
/// step, and the step count a multiple of the decimation.
long config_steps(const SimConfig& cfg);

/// Drift used as ground truth by the simulator and the metrics (either the
/// two-link model or the DNN at truth_theta).
std::function<Eigen::Vector2d(const Eigen::Vector2d&, const Eigen::Vector2d&)>
truth_drift(const SimConfig& cfg);

struct LogRow {
  double t = 0.0;
  Eigen::Vector2d x, xdot, e, r, u;
  Eigen::Vector2d r_hat, f_hat, r_tilde, pred_error, accumulator;
  Eigen::Vector2d f_true;
  double theta_norm = 0.0;
  std::uint64_t theta_hash = 0;
  double lambda_max_gamma = 0.0;
  double lambda_min_gamma = 0.0;
  double beta = 0.0;
  double f_minus_phi_norm = 0.0;  // ||f - Phi(X, theta_hat)||
  double phi_jac_fro = 0.0;       // ||Phi'||_F
  double lyap_partial = 0.0;      // (|e|^2+|r|^2+|rt|^2+|ft|^2)/2
  std::optional<Eigen::VectorXd> theta;  // present on checkpoint rows
};

enum class RunStatus { Completed, Diverged };

struct SimLog {
  std::vector<LogRow> rows;
  RunStatus status = RunStatus::Completed;
  std::string abort_reason;
  double end_time = 0.0;
  ControllerKind controller = ControllerKind::Composite;
  std::uint64_t seed = 0;
  Eigen::VectorXd theta_initial;
  Eigen::VectorXd theta_final;
  Eigen::MatrixXd gamma_final;  // empty for baseline runs
};

/// One classical fourth-order Runge-Kutta step of dy/dt = rates(t, y).
/// The rates functor has signature void(double t, const VectorXd& y,
/// VectorXd& dy).
struct Rk4Workspace {
  Eigen::VectorXd k1, k2, k3, k4, ytmp;
  void resize(Eigen::Index n);
};

template <typename Rates>
void rk4_step_inplace(Rates&& rates, double t, Eigen::VectorXd& y, double h,
                      Rk4Workspace& ws) {
  ws.resize(y.size());
  rates(t, y, ws.k1);
  ws.ytmp = y + (0.5 * h) * ws.k1;
  rates(t + 0.5 * h, ws.ytmp, ws.k2);
  ws.ytmp = y + (0.5 * h) * ws.k2;
  rates(t + 0.5 * h, ws.ytmp, ws.k3);
  ws.ytmp = y + h * ws.k3;
  rates(t + h, ws.ytmp, ws.k4);
  y += (h / 6.0) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);
}

template <typename Rates>
Eigen::VectorXd rk4_step(Rates&& rates, double t, const Eigen::VectorXd& y,
                         double h) {
  Rk4Workspace ws;
  Eigen::VectorXd out = y;
  rk4_step_inplace(rates, t, out, h, ws);
  return out;
}

/// Integrates the full closed loop (plant, controller, observer,
/// adaptation, and for the composite controller the least-squares gain)
/// with fixed-step RK4, symmetrizing Gamma after every step. Divergence
/// (blow-up bound or non-finite rates) yields status Diverged with the
/// partial log.
SimLog run_simulation(const SimConfig& cfg);

}  // namespace cadnn
