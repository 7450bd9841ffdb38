#include "cadnn/sim.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "cadnn/io.hpp"

namespace cadnn {

namespace {

constexpr int kN = 2;            // plant dimension
constexpr double kLamTol = 1e-8; // power-iteration tolerance inside the loop

// Flat ODE state layout: [x(2) | xdot(2) | r_hat(2) | accumulator(2) |
// theta(p) | Gamma(p*p, composite only)].
struct Layout {
  int p = 0;
  bool with_gamma = false;
  int theta_off() const { return 4 * kN; }
  int gamma_off() const { return 4 * kN + p; }
  int total() const { return 4 * kN + p + (with_gamma ? p * p : 0); }
};

struct Diverged {
  double t;
  std::string reason;
};

struct ClosedLoop {
  const SimConfig& cfg;
  Layout lay;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&, const Eigen::Vector2d&)>
      drift;
  Eigen::Vector2d r_tilde_0;
  Eigen::Vector2d f_hat_0;
  Eigen::MatrixXd gamma0;     // baseline constant gain
  Eigen::VectorXd lam_warm;   // power-iteration warm start across calls

  ClosedLoop(const SimConfig& c, const Layout& l)
      : cfg(c), lay(l), drift(truth_drift(c)) {
    if (!lay.with_gamma) {
      gamma0 = cfg.gamma0_scale *
               Eigen::MatrixXd::Identity(lay.p, lay.p);
    }
    lam_warm = Eigen::VectorXd::Ones(lay.p).normalized();
  }

  void operator()(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(y.size());

    const Eigen::Vector2d x = y.segment<2>(0);
    const Eigen::Vector2d xdot = y.segment<2>(2);
    const Eigen::Vector2d r_hat = y.segment<2>(4);
    const Eigen::Vector2d acc = y.segment<2>(6);
    const auto theta = y.segment(lay.theta_off(), lay.p);

    const Desired des = desired(t);
    const PlantState state{x, xdot};
    const ErrorSignals errs = tracking_errors(state, des, cfg.gains.alpha1);

    Eigen::VectorXd dnn_in(4);
    dnn_in << x, xdot;
    const DnnEval eval = evaluate(cfg.dnn, theta, dnn_in);

    const Effectiveness eff = effectiveness_g(cfg.plant, x);
    const Eigen::VectorXd u =
        control_input(des, errs, eval.output, eff.g_pinv, cfg.gains);
    const Eigen::Vector2d gu = eff.g * u;
    const Eigen::Vector2d f_true = drift(x, xdot);

    const ObserverState obs{r_hat, acc, r_tilde_0, f_hat_0};
    const Eigen::VectorXd f_hat = observer_f_hat(obs, errs.r, cfg.gains.k_f);
    const ObserverRates orates = observer_rates(
        obs, errs.r, errs.e, gu, des.acceleration, f_hat, cfg.gains);

    dy.segment<2>(0) = xdot;
    dy.segment<2>(2) = f_true + gu;
    dy.segment<2>(4) = orates.r_hat_dot;
    dy.segment<2>(6) = orates.accumulator_dot;

    if (lay.with_gamma) {
      const Eigen::Map<const Eigen::MatrixXd> gamma(
          y.data() + lay.gamma_off(), lay.p, lay.p);
      const Eigen::VectorXd pred = prediction_error(f_hat, eval.output);
      dy.segment(lay.theta_off(), lay.p) =
          composite_rhs(theta, gamma, eval.jacobian, errs.r, pred, cfg.gains);

      const double lam = lambda_max_sym(gamma, lam_warm, kLamTol);
      const double beta =
          forgetting_factor(lam, cfg.gains.beta0, cfg.gains.kappa0);
      Eigen::Map<Eigen::MatrixXd> dgamma(dy.data() + lay.gamma_off(), lay.p,
                                         lay.p);
      gamma_rate(gamma, eval.jacobian, beta, dgamma);
      if (!std::isfinite(lam) || !std::isfinite(beta)) {
        throw Diverged{t, "non-finite adaptation gain spectrum"};
      }
    } else {
      dy.segment(lay.theta_off(), lay.p) =
          baseline_rhs(theta, gamma0, eval.jacobian, errs.r, cfg.gains);
    }

    if (!dy.head(lay.theta_off() + lay.p).allFinite()) {
      throw Diverged{t, "non-finite rates"};
    }
  }
};

Eigen::Vector2d initial_r(const SimConfig& cfg) {
  const Desired des = desired(0.0);
  const PlantState state{cfg.x0, cfg.xdot0};
  return tracking_errors(state, des, cfg.gains.alpha1).r;
}

}  // namespace

std::string controller_name(ControllerKind kind) {
  return kind == ControllerKind::Composite ? "composite" : "baseline";
}

ControllerKind controller_from_name(const std::string& name) {
  if (name == "composite") return ControllerKind::Composite;
  if (name == "baseline") return ControllerKind::Baseline;
  throw std::invalid_argument("unknown controller kind: " + name);
}

void Rk4Workspace::resize(Eigen::Index n) {
  if (k1.size() != n) {
    k1.resize(n);
    k2.resize(n);
    k3.resize(n);
    k4.resize(n);
    ytmp.resize(n);
  }
}

long config_steps(const SimConfig& cfg) {
  const long steps = std::lround(cfg.duration / cfg.step);
  if (steps < 1 ||
      std::abs(static_cast<double>(steps) * cfg.step - cfg.duration) >
          1e-9 * std::max(1.0, cfg.duration)) {
    throw std::invalid_argument(
        "duration must be an integer multiple of the step size");
  }
  return steps;
}

void validate_config(const SimConfig& cfg) {
  const Gains& g = cfg.gains;
  if (!(cfg.step > 0.0) || !(cfg.duration >= cfg.step)) {
    throw std::invalid_argument("need step > 0 and duration >= step");
  }
  const long steps = config_steps(cfg);
  if (cfg.decimation < 1 || steps % cfg.decimation != 0) {
    throw std::invalid_argument(
        "decimation must be >= 1 and divide the step count");
  }
  const double positives[] = {g.alpha1, g.alpha2, g.alpha3, g.k_r,   g.k_f,
                              g.k_theta, g.beta0,  g.kappa0, g.theta_bar};
  for (double v : positives) {
    if (!(v > 0.0)) throw std::invalid_argument("gains must be positive");
  }
  if (!(g.projection_band > 0.0 && g.projection_band < 1.0)) {
    throw std::invalid_argument("projection_band must be in (0, 1)");
  }
  if (!(cfg.gamma0_scale > 0.0) || !(g.kappa0 > cfg.gamma0_scale)) {
    throw std::invalid_argument(
        "need 0 < gamma0_scale < kappa0 for the gain dynamics");
  }
  if (cfg.dnn.input_size != 2 * kN || cfg.dnn.output_size != kN) {
    throw std::invalid_argument(
        "dnn must map the stacked state (4) to the drift dimension (2)");
  }
  const int p = param_count(cfg.dnn);
  if (cfg.theta0 && cfg.theta0->size() != p) {
    throw std::invalid_argument("theta0 length does not match the dnn spec");
  }
  if (cfg.truth_theta && cfg.truth_theta->size() != p) {
    throw std::invalid_argument(
        "truth_theta length does not match the dnn spec");
  }
  if (!cfg.x0.allFinite() || !cfg.xdot0.allFinite() ||
      !cfg.f_hat0.allFinite()) {
    throw std::invalid_argument("initial conditions must be finite");
  }
  if (!(cfg.window_start >= 0.0) || !(cfg.window_end > cfg.window_start) ||
      !(cfg.window_end <= cfg.duration + 1e-9)) {
    throw std::invalid_argument("metrics window must lie within the run");
  }
  if (cfg.test_points < 1) throw std::invalid_argument("test_points >= 1");
  if (cfg.theta_checkpoint_stride < 1) {
    throw std::invalid_argument("theta_checkpoint_stride >= 1");
  }
  if (!(cfg.blow_up > 0.0)) throw std::invalid_argument("blow_up > 0");
}

std::function<Eigen::Vector2d(const Eigen::Vector2d&, const Eigen::Vector2d&)>
truth_drift(const SimConfig& cfg) {
  if (cfg.truth_theta) {
    const DnnSpec spec = cfg.dnn;
    const Eigen::VectorXd theta = *cfg.truth_theta;
    return [spec, theta](const Eigen::Vector2d& x, const Eigen::Vector2d& xd) {
      Eigen::VectorXd in(4);
      in << x, xd;
      return Eigen::Vector2d(forward(spec, theta, in));
    };
  }
  const TwoLinkParams params = cfg.plant;
  return [params](const Eigen::Vector2d& x, const Eigen::Vector2d& xd) {
    return drift_f(params, PlantState{x, xd});
  };
}

SimLog run_simulation(const SimConfig& cfg) {
  validate_config(cfg);

  Layout lay;
  lay.p = param_count(cfg.dnn);
  lay.with_gamma = cfg.controller == ControllerKind::Composite;

  const long steps = config_steps(cfg);
  const long rows = steps / cfg.decimation + 1;

  SimLog log;
  log.controller = cfg.controller;
  log.seed = cfg.seed;
  log.rows.reserve(static_cast<size_t>(rows));

  Eigen::VectorXd y = Eigen::VectorXd::Zero(lay.total());
  y.segment<2>(0) = cfg.x0;
  y.segment<2>(2) = cfg.xdot0;
  const Eigen::Vector2d r0 = initial_r(cfg);
  const Eigen::Vector2d r_hat0 = cfg.r_hat0.value_or(r0);
  y.segment<2>(4) = r_hat0;
  // accumulator starts at zero
  y.segment(lay.theta_off(), lay.p) =
      cfg.theta0 ? *cfg.theta0 : random_weights(cfg.dnn, cfg.seed);
  if (lay.with_gamma) {
    Eigen::Map<Eigen::MatrixXd>(y.data() + lay.gamma_off(), lay.p, lay.p) =
        cfg.gamma0_scale * Eigen::MatrixXd::Identity(lay.p, lay.p);
  }
  log.theta_initial = y.segment(lay.theta_off(), lay.p);

  ClosedLoop loop(cfg, lay);
  loop.r_tilde_0 = r0 - r_hat0;
  loop.f_hat_0 = cfg.f_hat0;

  // Separate warm starts for the logged spectrum estimates so logging does
  // not perturb the integration path.
  Eigen::VectorXd log_warm_max = Eigen::VectorXd::Ones(lay.p).normalized();
  Eigen::VectorXd log_warm_min = Eigen::VectorXd::Ones(lay.p).normalized();
  constexpr long kAuditEveryRows = 100;  // Cholesky PD audit cadence

  const auto log_row = [&](double t, const Eigen::VectorXd& ys,
                           long row_index) {
    LogRow row;
    row.t = t;
    row.x = ys.segment<2>(0);
    row.xdot = ys.segment<2>(2);
    row.r_hat = ys.segment<2>(4);
    row.accumulator = ys.segment<2>(6);
    const auto theta = ys.segment(lay.theta_off(), lay.p);

    const Desired des = desired(t);
    const PlantState state{row.x, row.xdot};
    const ErrorSignals errs = tracking_errors(state, des, cfg.gains.alpha1);
    row.e = errs.e;
    row.r = errs.r;

    Eigen::VectorXd dnn_in(4);
    dnn_in << row.x, row.xdot;
    const DnnEval eval = evaluate(cfg.dnn, theta, dnn_in);
    const Effectiveness eff = effectiveness_g(cfg.plant, row.x);
    row.u = control_input(des, errs, eval.output, eff.g_pinv, cfg.gains);

    const ObserverState obs{row.r_hat, row.accumulator, loop.r_tilde_0,
                            loop.f_hat_0};
    row.f_hat = observer_f_hat(obs, errs.r, cfg.gains.k_f);
    row.r_tilde = errs.r - row.r_hat;
    row.pred_error = prediction_error(row.f_hat, eval.output);
    row.f_true = loop.drift(row.x, row.xdot);
    row.f_minus_phi_norm = (row.f_true - Eigen::Vector2d(eval.output)).norm();
    row.phi_jac_fro = eval.jacobian.norm();
    const Eigen::Vector2d f_tilde = row.f_true - row.f_hat;
    row.lyap_partial = 0.5 * (row.e.squaredNorm() + row.r.squaredNorm() +
                              row.r_tilde.squaredNorm() +
                              f_tilde.squaredNorm());
    row.theta_norm = theta.norm();
    row.theta_hash = hash_bytes(theta.data(), sizeof(double) *
                                                  static_cast<size_t>(lay.p));

    if (lay.with_gamma) {
      const Eigen::Map<const Eigen::MatrixXd> gamma(
          ys.data() + lay.gamma_off(), lay.p, lay.p);
      row.lambda_max_gamma = lambda_max_sym(gamma, log_warm_max, kLamTol);
      row.lambda_min_gamma =
          lambda_min_sym(gamma, row.lambda_max_gamma, log_warm_min, kLamTol);
      row.beta = forgetting_factor(row.lambda_max_gamma, cfg.gains.beta0,
                                   cfg.gains.kappa0);
      if (row_index % kAuditEveryRows == 0) {
        const Eigen::LLT<Eigen::MatrixXd> llt(gamma);
        if (llt.info() != Eigen::Success) {
          throw Diverged{t, "adaptation gain lost positive-definiteness"};
        }
      }
    } else {
      row.lambda_max_gamma = cfg.gamma0_scale;
      row.lambda_min_gamma = cfg.gamma0_scale;
      row.beta = 0.0;
    }

    if (row_index % cfg.theta_checkpoint_stride == 0) {
      row.theta = Eigen::VectorXd(theta);
    }
    log.rows.push_back(std::move(row));
  };

  Rk4Workspace ws;
  double t = 0.0;
  try {
    long row_index = 0;
    for (long k = 0; k <= steps; ++k) {
      t = static_cast<double>(k) * cfg.step;
      if (k % cfg.decimation == 0) {
        if (!y.allFinite()) throw Diverged{t, "non-finite state"};
        log_row(t, y, row_index++);
      }
      if (k == steps) break;

      rk4_step_inplace(loop, t, y, cfg.step, ws);

      if (lay.with_gamma) {
        Eigen::Map<Eigen::MatrixXd> gamma(y.data() + lay.gamma_off(), lay.p,
                                          lay.p);
        gamma = 0.5 * (gamma + gamma.transpose()).eval();
      }

      const auto small = y.head(lay.theta_off() + lay.p);
      if (!small.allFinite() || small.norm() > cfg.blow_up) {
        throw Diverged{t + cfg.step, "state norm exceeded blow-up bound"};
      }
    }
    log.status = RunStatus::Completed;
    log.end_time = cfg.duration;
  } catch (const Diverged& d) {
    log.status = RunStatus::Diverged;
    log.abort_reason = d.reason;
    log.end_time = d.t;
  }
  log.theta_final = y.segment(lay.theta_off(), lay.p);
  if (lay.with_gamma) {
    log.gamma_final =
        Eigen::Map<const Eigen::MatrixXd>(y.data() + lay.gamma_off(), lay.p,
                                          lay.p);
  }
  return log;
}

}  // namespace cadnn
