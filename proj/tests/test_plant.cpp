#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "cadnn/plant.hpp"

using namespace cadnn;

namespace {

// Fully expanded scalar oracle for the drift, derived by hand from
// -M^{-1} (Vm + Fd) xd with Cramer's rule. Independent of the library's
// matrix path.
Eigen::Vector2d drift_oracle(const TwoLinkParams& prm,
                             const Eigen::Vector2d& x,
                             const Eigen::Vector2d& xd) {
  const double c = std::cos(x(1));
  const double s = std::sin(x(1));
  const double w1 =
      -prm.p3 * s * (2.0 * xd(0) * xd(1) + xd(1) * xd(1)) + prm.fd1 * xd(0);
  const double w2 = prm.p3 * s * xd(0) * xd(0) + prm.fd2 * xd(1);
  const double det =
      prm.p2 * (prm.p1 + 2.0 * prm.p3 * c) -
      (prm.p2 + prm.p3 * c) * (prm.p2 + prm.p3 * c);
  const double f1 = -(prm.p2 * w1 - (prm.p2 + prm.p3 * c) * w2) / det;
  const double f2 =
      -(-(prm.p2 + prm.p3 * c) * w1 + (prm.p1 + 2.0 * prm.p3 * c) * w2) / det;
  return {f1, f2};
}

}  // namespace

TEST_CASE("drift vanishes at rest") {
  const TwoLinkParams prm;
  for (double a = -3.0; a <= 3.0; a += 0.37) {
    const PlantState state{{a, -2.0 * a}, {0.0, 0.0}};
    CHECK(drift_f(prm, state).norm() == 0.0);
  }
}

TEST_CASE("drift matches the hand-expanded oracle") {
  const TwoLinkParams prm;
  {
    const PlantState state{{1.0, -1.0}, {0.1, -0.2}};
    const Eigen::Vector2d expected = drift_oracle(prm, state.x, state.xdot);
    CHECK((drift_f(prm, state) - expected).norm() < 1e-12);
  }
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const PlantState state{{dist(gen), dist(gen)}, {dist(gen), dist(gen)}};
    const Eigen::Vector2d expected = drift_oracle(prm, state.x, state.xdot);
    CHECK((drift_f(prm, state) - expected).norm() <
          1e-12 * std::max(1.0, expected.norm()));
  }
}

TEST_CASE("drift is velocity-Lipschitz on a sampled grid") {
  const TwoLinkParams prm;
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  double max_ratio = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector2d x(dist(gen), dist(gen));
    const Eigen::Vector2d xd(dist(gen), dist(gen));
    const Eigen::Vector2d delta =
        1e-4 * Eigen::Vector2d(dist(gen), dist(gen));
    const Eigen::Vector2d f0 = drift_f(prm, {x, xd});
    const Eigen::Vector2d f1 = drift_f(prm, {x, xd + delta});
    max_ratio = std::max(max_ratio, (f1 - f0).norm() / delta.norm());
  }
  // (Vm + Fd)/M stays small for the default constants; 100 is generous
  CHECK(max_ratio < 100.0);
}

TEST_CASE("mass matrix is positive-definite over the joint range") {
  const TwoLinkParams prm;
  for (double q2 = -3.2; q2 <= 3.2; q2 += 0.05) {
    const Eigen::Matrix2d m = mass_matrix(prm, {0.0, q2});
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(m);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("effectiveness is the mass-matrix inverse") {
  const TwoLinkParams prm;
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Vector2d x(dist(gen), dist(gen));
    const Effectiveness eff = effectiveness_g(prm, x);
    CHECK((eff.g * eff.g_pinv - Eigen::Matrix2d::Identity()).norm() < 1e-10);
    CHECK((eff.g_pinv * eff.g - Eigen::Matrix2d::Identity()).norm() < 1e-10);
    CHECK((eff.g - eff.g.transpose()).norm() < 1e-14);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(eff.g);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }

  SUBCASE("value at the origin") {
    const Effectiveness eff = effectiveness_g(prm, {0.0, 0.0});
    Eigen::Matrix2d m0;
    m0 << prm.p1 + 2.0 * prm.p3, prm.p2 + prm.p3, prm.p2 + prm.p3, prm.p2;
    CHECK((eff.g_pinv - m0).norm() == 0.0);
    CHECK((eff.g - m0.inverse()).norm() < 1e-12);
  }
}

TEST_CASE("desired trajectory values at t = 0") {
  const Desired d = desired(0.0);
  CHECK(d.position(0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(d.position(1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(d.velocity(0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(d.velocity(1) == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("desired derivatives match finite differences over [0, 100]") {
  const double h = 1e-6;
  double max_vel_err = 0.0;
  double max_acc_err = 0.0;
  for (double t = h; t <= 100.0; t += 0.1) {
    const Desired mid = desired(t);
    const Desired hi = desired(t + h);
    const Desired lo = desired(t - h);
    const Eigen::Vector2d fd_vel = (hi.position - lo.position) / (2.0 * h);
    const Eigen::Vector2d fd_acc = (hi.velocity - lo.velocity) / (2.0 * h);
    max_vel_err = std::max(max_vel_err, (fd_vel - mid.velocity).norm());
    max_acc_err = std::max(max_acc_err, (fd_acc - mid.acceleration).norm());
  }
  CHECK(max_vel_err < 1e-6);
  CHECK(max_acc_err < 1e-6);
}

TEST_CASE("desired trajectory stays inside its analytic bounds") {
  double max_pos = 0.0;
  double max_vel = 0.0;
  for (double t = 0.0; t <= 100.0; t += 0.001) {
    const Desired d = desired(t);
    max_pos = std::max(max_pos, d.position.norm());
    max_vel = std::max(max_vel, d.velocity.norm());
  }
  CHECK(max_pos <= 0.25 * std::exp(1.0) + 1e-12);
  CHECK(max_vel < 2.0);  // finite velocity bound
}
