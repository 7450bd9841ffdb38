#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace cadnn {

enum class Activation { Tanh };

/// Parses "tanh"; throws std::invalid_argument for anything else.
Activation activation_from_name(const std::string& name);
std::string activation_name(Activation act);

/// Fully-connected feedforward architecture with bias augmentation: the
/// network input and every hidden-layer activation vector are appended with
/// a constant 1 before multiplying by the next weight matrix, so the bias
/// terms live inside the weight matrices themselves.
struct DnnSpec {
  int input_size = 0;
  std::vector<int> hidden_widths;  // one entry per hidden layer
  int output_size = 0;
  Activation activation = Activation::Tanh;

  int hidden_layers() const { return static_cast<int>(hidden_widths.size()); }
};

/// Shape and flat-parameter offset of one layer's weight matrix.
struct LayerShape {
  int rows = 0;
  int cols = 0;
  int offset = 0;  // start of vec(V_j) inside theta
};

/// Weight-matrix shapes in layer order. Layer 0 maps the augmented input
/// (input_size+1) to the first hidden width; layer j maps the augmented
/// hidden output (width_{j-1}+1) to width_j; the last layer maps
/// (width_{k-1}+1) to output_size.
std::vector<LayerShape> layer_shapes(const DnnSpec& spec);

/// Total number of weights p; theta is the concatenation of the
/// column-stacked layer matrices vec(V_0), ..., vec(V_k).
int param_count(const DnnSpec& spec);

/// i.i.d. U(-0.5, 0.5) weights from a seeded generator. The sampling is
/// bit-reproducible for a given seed.
Eigen::VectorXd random_weights(const DnnSpec& spec, std::uint64_t seed);

/// Network output for input sigma (length input_size). Throws
/// std::invalid_argument on non-finite inputs or a theta of the wrong size.
Eigen::VectorXd forward(const DnnSpec& spec, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& sigma);

struct DnnEval {
  Eigen::VectorXd output;    // output_size
  Eigen::MatrixXd jacobian;  // output_size x p, layer blocks in theta order
};

/// Output together with the analytic Jacobian d(output)/d(theta). The
/// Jacobian block for layer j is P_{j+1} * (I kron a_j^T) where a_j is the
/// augmented input of layer j and P_{j+1} is the product of the downstream
/// layer linearizations; the bias entry contributes a zero row to each
/// activation Jacobian.
DnnEval evaluate(const DnnSpec& spec, const Eigen::VectorXd& theta,
                 const Eigen::VectorXd& sigma);

Eigen::MatrixXd jacobian(const DnnSpec& spec, const Eigen::VectorXd& theta,
                         const Eigen::VectorXd& sigma);

/// || Phi(sigma, theta_a) - Phi(sigma, theta_b)
///    - Phi'(sigma, theta_b) (theta_a - theta_b) ||,
/// the realized second-order remainder of the first-order expansion about
/// theta_b.
double taylor_residual(const DnnSpec& spec, const Eigen::VectorXd& theta_a,
                       const Eigen::VectorXd& theta_b,
                       const Eigen::VectorXd& sigma);

/// Weight checkpointing. ".json" holds a flat array (layer order, columns
/// stacked within each layer); any other extension is treated as CSV with
/// one value per line. Values round-trip exactly.
void save_weights(const std::string& path, const Eigen::VectorXd& theta);
Eigen::VectorXd load_weights(const std::string& path);

}  // namespace cadnn
