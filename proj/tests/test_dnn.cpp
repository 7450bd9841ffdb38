#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <vector>

#include "cadnn/dnn.hpp"
#include "cadnn/tensor_ops.hpp"

using namespace cadnn;

namespace {

DnnSpec paper_spec() {
  DnnSpec spec;
  spec.input_size = 4;
  spec.hidden_widths = {5, 5, 5, 5, 5};
  spec.output_size = 2;
  return spec;
}

DnnSpec tiny_spec() {
  DnnSpec spec;
  spec.input_size = 1;
  spec.hidden_widths = {1};
  spec.output_size = 1;
  return spec;
}

// Central finite differences of the forward map in theta; the oracle the
// analytic Jacobian is held against.
Eigen::MatrixXd fd_jacobian(const DnnSpec& spec, const Eigen::VectorXd& theta,
                            const Eigen::VectorXd& sigma, double step) {
  const int p = param_count(spec);
  Eigen::MatrixXd fd(spec.output_size, p);
  for (int i = 0; i < p; ++i) {
    Eigen::VectorXd hi = theta;
    Eigen::VectorXd lo = theta;
    hi(i) += step;
    lo(i) -= step;
    fd.col(i) = (forward(spec, hi, sigma) - forward(spec, lo, sigma)) /
                (2.0 * step);
  }
  return fd;
}

Eigen::VectorXd random_input(std::mt19937_64& gen, int n, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(gen);
  return v;
}

}  // namespace

TEST_CASE("param_count matches the augmented-bias layer shapes") {
  CHECK(param_count(paper_spec()) == 157);
  CHECK(param_count(tiny_spec()) == 4);

  DnnSpec mid;
  mid.input_size = 2;
  mid.hidden_widths = {3, 3};
  mid.output_size = 2;
  // counted layer by layer: 3*3 + 4*3 + 4*2
  CHECK(param_count(mid) == 29);

  const auto shapes = layer_shapes(paper_spec());
  REQUIRE(shapes.size() == 6);
  CHECK(shapes[0].rows == 5);
  CHECK(shapes[0].cols == 5);
  CHECK(shapes[5].rows == 6);
  CHECK(shapes[5].cols == 2);
  CHECK(shapes[5].offset + shapes[5].rows * shapes[5].cols == 157);
}

TEST_CASE("forward evaluation") {
  SUBCASE("zero weights give zero output") {
    const DnnSpec spec = paper_spec();
    const Eigen::VectorXd theta = Eigen::VectorXd::Zero(param_count(spec));
    Eigen::VectorXd sigma(4);
    sigma << 0.3, -0.8, 1.0, 0.1;
    CHECK(forward(spec, theta, sigma).norm() == 0.0);
  }

  SUBCASE("single hidden unit by hand") {
    const DnnSpec spec = tiny_spec();
    Eigen::VectorXd theta(4);
    theta << 1, 0, 1, 0;  // V0 = [1; 0], V1 = [1; 0]
    Eigen::VectorXd sigma(1);
    sigma << 0.5;
    const Eigen::VectorXd out = forward(spec, theta, sigma);
    CHECK(out(0) == doctest::Approx(std::tanh(0.5)).epsilon(1e-12));
  }

  SUBCASE("linear in the final-layer weights") {
    const DnnSpec spec = paper_spec();
    std::mt19937_64 gen(3);
    Eigen::VectorXd theta = random_weights(spec, 42);
    const Eigen::VectorXd sigma = random_input(gen, 4, 1.0);
    const auto shapes = layer_shapes(spec);
    const auto& last = shapes.back();

    const Eigen::VectorXd base = forward(spec, theta, sigma);
    theta.segment(last.offset, last.rows * last.cols) *= 3.0;
    const Eigen::VectorXd scaled = forward(spec, theta, sigma);
    CHECK((scaled - 3.0 * base).norm() < 1e-12);
  }

  SUBCASE("output bounded by final-layer column sums") {
    const DnnSpec spec = paper_spec();
    const Eigen::VectorXd theta = random_weights(spec, 2024);
    std::mt19937_64 gen(5);
    const Eigen::VectorXd sigma = random_input(gen, 4, 2.0);
    const Eigen::VectorXd out = forward(spec, theta, sigma);
    REQUIRE(out.size() == 2);
    CHECK(out.allFinite());

    // every entry of the last augmented activation lies in [-1, 1]
    const auto& last = layer_shapes(spec).back();
    const Eigen::Map<const Eigen::MatrixXd> vk(theta.data() + last.offset,
                                               last.rows, last.cols);
    for (int i = 0; i < last.cols; ++i) {
      CHECK(std::abs(out(i)) <= vk.col(i).cwiseAbs().sum() + 1e-12);
    }
  }

  SUBCASE("non-finite input is rejected") {
    const DnnSpec spec = tiny_spec();
    Eigen::VectorXd theta(4);
    theta << 1, 0, 1, 0;
    Eigen::VectorXd bad(1);
    bad << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(forward(spec, theta, bad), std::invalid_argument);
    Eigen::VectorXd sigma(1);
    sigma << 0.5;
    theta(2) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(forward(spec, theta, sigma), std::invalid_argument);
  }
}

TEST_CASE("analytic Jacobian equals central finite differences") {
  std::mt19937_64 gen(101);
  std::uniform_int_distribution<int> layer_dist(1, 6);
  std::uniform_int_distribution<int> width_dist(1, 6);
  std::uniform_int_distribution<int> io_dist(1, 4);

  for (int trial = 0; trial < 25; ++trial) {
    DnnSpec spec;
    spec.input_size = io_dist(gen);
    spec.output_size = io_dist(gen);
    const int layers = layer_dist(gen);
    for (int j = 0; j < layers; ++j) spec.hidden_widths.push_back(width_dist(gen));

    const Eigen::VectorXd theta =
        random_weights(spec, 1000 + static_cast<std::uint64_t>(trial));
    const Eigen::VectorXd sigma = random_input(gen, spec.input_size, 1.0);

    const Eigen::MatrixXd analytic = jacobian(spec, theta, sigma);
    REQUIRE(analytic.cols() == param_count(spec));
    const Eigen::MatrixXd fd = fd_jacobian(spec, theta, sigma, 1e-6);
    CHECK((analytic - fd).cwiseAbs().maxCoeff() < 1e-6);
  }

  SUBCASE("paper-size network") {
    const DnnSpec spec = paper_spec();
    const Eigen::VectorXd theta = random_weights(spec, 7);
    const Eigen::VectorXd sigma = random_input(gen, 4, 1.0);
    const Eigen::MatrixXd analytic = jacobian(spec, theta, sigma);
    const Eigen::MatrixXd fd = fd_jacobian(spec, theta, sigma, 1e-6);
    CHECK((analytic - fd).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("Jacobian structure at zero weights") {
  const DnnSpec spec = paper_spec();
  const int p = param_count(spec);
  const Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd sigma(4);
  sigma << 0.2, -0.4, 0.6, -0.8;
  const Eigen::MatrixXd jac = jacobian(spec, theta, sigma);

  const auto shapes = layer_shapes(spec);
  // every block upstream of the last layer vanishes with zero weights
  const auto& last = shapes.back();
  CHECK(jac.leftCols(last.offset).norm() == 0.0);

  // last block is I_2 kron [0 0 0 0 0 1]: tanh(0) = 0 at the five hidden
  // nodes and 1 at the bias entry
  Eigen::VectorXd aug = Eigen::VectorXd::Zero(6);
  aug(5) = 1.0;
  const Eigen::MatrixXd expected =
      kron(Eigen::MatrixXd::Identity(2, 2), aug.transpose());
  CHECK((jac.rightCols(last.rows * last.cols) - expected).norm() == 0.0);
}

TEST_CASE("Jacobian hand value for the scalar network") {
  const DnnSpec spec = tiny_spec();
  Eigen::VectorXd theta(4);
  theta << 1, 0, 1, 0;
  Eigen::VectorXd sigma(1);
  sigma << 0.5;
  const Eigen::MatrixXd jac = jacobian(spec, theta, sigma);
  REQUIRE(jac.rows() == 1);
  REQUIRE(jac.cols() == 4);
  // d(output)/d(output weight) is the hidden activation tanh(0.5)
  CHECK(jac(0, 2) == doctest::Approx(std::tanh(0.5)).epsilon(1e-12));
  // d(output)/d(output bias) is the appended constant 1
  CHECK(jac(0, 3) == doctest::Approx(1.0).epsilon(1e-12));
  const double dtanh = 1.0 - std::tanh(0.5) * std::tanh(0.5);
  CHECK(jac(0, 0) == doctest::Approx(dtanh * 0.5).epsilon(1e-12));
  CHECK(jac(0, 1) == doctest::Approx(dtanh).epsilon(1e-12));
}

TEST_CASE("Taylor remainder scales quadratically") {
  const DnnSpec spec = paper_spec();
  const int p = param_count(spec);
  const Eigen::VectorXd theta_b = random_weights(spec, 77);
  std::mt19937_64 gen(55);
  const Eigen::VectorXd sigma = random_input(gen, 4, 0.5);

  SUBCASE("zero at equal weights") {
    CHECK(taylor_residual(spec, theta_b, theta_b, sigma) == 0.0);
  }

  SUBCASE("halving the perturbation quarters the remainder") {
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd dir = random_input(gen, p, 1.0);
      dir.normalize();
      const double s = 1e-2;
      const double r1 = taylor_residual(spec, theta_b + s * dir, theta_b, sigma);
      const double r2 =
          taylor_residual(spec, theta_b + 0.5 * s * dir, theta_b, sigma);
      REQUIRE(r2 > 0.0);
      const double ratio = r1 / r2;
      CHECK(ratio > 3.5);
      CHECK(ratio < 4.5);
    }
  }

  SUBCASE("uniform quadratic bound across scales") {
    // residual / |delta|^2 should be scale-independent up to higher-order
    // terms; fit the constant at one scale and verify it at the others
    std::vector<double> ratios;
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd dir = random_input(gen, p, 1.0);
      dir.normalize();
      const double s = 1e-3 * std::pow(10.0, trial % 3);  // 1e-3..1e-1
      const double resid =
          taylor_residual(spec, theta_b + s * dir, theta_b, sigma);
      ratios.push_back(resid / (s * s));
    }
    const double hi = *std::max_element(ratios.begin(), ratios.end());
    const double lo = *std::min_element(ratios.begin(), ratios.end());
    CHECK(hi / lo < 10.0);
  }
}

TEST_CASE("weight initialization is reproducible and in range") {
  const DnnSpec spec = paper_spec();
  const Eigen::VectorXd a = random_weights(spec, 99);
  const Eigen::VectorXd b = random_weights(spec, 99);
  const Eigen::VectorXd c = random_weights(spec, 100);
  CHECK((a - b).norm() == 0.0);
  CHECK((a - c).norm() != 0.0);
  CHECK(a.minCoeff() >= -0.5);
  CHECK(a.maxCoeff() <= 0.5);
}

TEST_CASE("weight checkpoints round-trip") {
  const DnnSpec spec = paper_spec();
  const Eigen::VectorXd theta = random_weights(spec, 31);
  const auto dir = std::filesystem::temp_directory_path();

  const std::string json_path = (dir / "cadnn_w.json").string();
  save_weights(json_path, theta);
  CHECK((load_weights(json_path) - theta).norm() == 0.0);

  const std::string csv_path = (dir / "cadnn_w.csv").string();
  save_weights(csv_path, theta);
  CHECK((load_weights(csv_path) - theta).norm() == 0.0);

  std::filesystem::remove(json_path);
  std::filesystem::remove(csv_path);
}
