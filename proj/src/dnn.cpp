#include "cadnn/dnn.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cadnn {

namespace {

double act_value(Activation act, double z) {
  switch (act) {
    case Activation::Tanh:
      return std::tanh(z);
  }
  return 0.0;
}

double act_derivative(Activation act, double z) {
  switch (act) {
    case Activation::Tanh: {
      const double th = std::tanh(z);
      return 1.0 - th * th;
    }
  }
  return 0.0;
}

void validate_spec(const DnnSpec& spec) {
  if (spec.input_size < 1 || spec.output_size < 1 || spec.hidden_layers() < 1) {
    throw std::invalid_argument("DnnSpec: sizes must be positive");
  }
  for (int w : spec.hidden_widths) {
    if (w < 1) throw std::invalid_argument("DnnSpec: widths must be >= 1");
  }
}

void validate_inputs(const DnnSpec& spec, const Eigen::VectorXd& theta,
                     const Eigen::VectorXd& sigma) {
  if (theta.size() != param_count(spec)) {
    throw std::invalid_argument("theta length does not match param_count");
  }
  if (sigma.size() != spec.input_size) {
    throw std::invalid_argument("sigma length does not match input_size");
  }
  if (!theta.allFinite() || !sigma.allFinite()) {
    throw std::invalid_argument("non-finite weights or input");
  }
}

// Portable uniform draw in [lo, hi) built from the top 53 bits of the
// generator output, reproducible independent of the standard library's
// distribution implementation.
double uniform_real(std::mt19937_64& gen, double lo, double hi) {
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

struct ForwardPass {
  // a[j] is the augmented input of layer j (j = 0 uses [sigma; 1]);
  // z[j] is the pre-activation output of layer j.
  std::vector<Eigen::VectorXd> a;
  std::vector<Eigen::VectorXd> z;
};

ForwardPass run_forward(const DnnSpec& spec, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& sigma,
                        const std::vector<LayerShape>& shapes) {
  const int k = spec.hidden_layers();
  ForwardPass fp;
  fp.a.resize(k + 1);
  fp.z.resize(k + 1);

  Eigen::VectorXd aug(spec.input_size + 1);
  aug.head(spec.input_size) = sigma;
  aug(spec.input_size) = 1.0;
  fp.a[0] = std::move(aug);

  for (int j = 0; j <= k; ++j) {
    const LayerShape& s = shapes[static_cast<size_t>(j)];
    const Eigen::Map<const Eigen::MatrixXd> vj(theta.data() + s.offset, s.rows,
                                               s.cols);
    fp.z[j] = vj.transpose() * fp.a[static_cast<size_t>(j)];
    if (j < k) {
      Eigen::VectorXd next(s.cols + 1);
      for (int i = 0; i < s.cols; ++i) {
        next(i) = act_value(spec.activation, fp.z[static_cast<size_t>(j)](i));
      }
      next(s.cols) = 1.0;
      fp.a[static_cast<size_t>(j + 1)] = std::move(next);
    }
  }
  return fp;
}

}  // namespace

Activation activation_from_name(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  throw std::invalid_argument("unknown activation: " + name);
}

std::string activation_name(Activation act) {
  switch (act) {
    case Activation::Tanh:
      return "tanh";
  }
  return "?";
}

std::vector<LayerShape> layer_shapes(const DnnSpec& spec) {
  validate_spec(spec);
  const int k = spec.hidden_layers();
  std::vector<LayerShape> shapes;
  shapes.reserve(static_cast<size_t>(k) + 1);
  int offset = 0;
  int in = spec.input_size + 1;
  for (int j = 0; j <= k; ++j) {
    const int out = (j < k) ? spec.hidden_widths[static_cast<size_t>(j)]
                            : spec.output_size;
    shapes.push_back({in, out, offset});
    offset += in * out;
    if (j < k) in = spec.hidden_widths[static_cast<size_t>(j)] + 1;
  }
  return shapes;
}

int param_count(const DnnSpec& spec) {
  int p = 0;
  for (const LayerShape& s : layer_shapes(spec)) p += s.rows * s.cols;
  return p;
}

Eigen::VectorXd random_weights(const DnnSpec& spec, std::uint64_t seed) {
  const int p = param_count(spec);
  std::mt19937_64 gen(seed);
  Eigen::VectorXd theta(p);
  for (int i = 0; i < p; ++i) theta(i) = uniform_real(gen, -0.5, 0.5);
  return theta;
}

Eigen::VectorXd forward(const DnnSpec& spec, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& sigma) {
  const auto shapes = layer_shapes(spec);
  validate_inputs(spec, theta, sigma);
  return run_forward(spec, theta, sigma, shapes).z.back();
}

DnnEval evaluate(const DnnSpec& spec, const Eigen::VectorXd& theta,
                 const Eigen::VectorXd& sigma) {
  const auto shapes = layer_shapes(spec);
  validate_inputs(spec, theta, sigma);
  const int k = spec.hidden_layers();
  const int p = param_count(spec);
  const int out = spec.output_size;

  const ForwardPass fp = run_forward(spec, theta, sigma, shapes);

  DnnEval eval;
  eval.output = fp.z.back();
  eval.jacobian.resize(out, p);

  // Walk the layers back to front. P holds d(output)/d(z_{j+1}); the block
  // for vec(V_j) is P * (I kron a_j^T), i.e. column c of P spread over the
  // c-th column of V_j.
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(out, out);
  for (int j = k; j >= 0; --j) {
    const LayerShape& s = shapes[static_cast<size_t>(j)];
    const Eigen::VectorXd& aj = fp.a[static_cast<size_t>(j)];
    for (int c = 0; c < s.cols; ++c) {
      eval.jacobian.block(0, s.offset + c * s.rows, out, s.rows).noalias() =
          P.col(c) * aj.transpose();
    }
    if (j > 0) {
      // Fold in V_j^T followed by the activation Jacobian of layer j-1's
      // output; the appended bias entry has derivative zero, which drops
      // the last column of V_j^T.
      const Eigen::Map<const Eigen::MatrixXd> vj(theta.data() + s.offset,
                                                 s.rows, s.cols);
      const Eigen::VectorXd& zprev = fp.z[static_cast<size_t>(j - 1)];
      Eigen::VectorXd dphi(zprev.size());
      for (Eigen::Index i = 0; i < zprev.size(); ++i) {
        dphi(i) = act_derivative(spec.activation, zprev(i));
      }
      Eigen::MatrixXd next(P.rows(), s.rows - 1);
      next.noalias() = P * vj.topRows(s.rows - 1).transpose();
      next = next * dphi.asDiagonal();
      P = std::move(next);
    }
  }
  return eval;
}

Eigen::MatrixXd jacobian(const DnnSpec& spec, const Eigen::VectorXd& theta,
                         const Eigen::VectorXd& sigma) {
  return evaluate(spec, theta, sigma).jacobian;
}

double taylor_residual(const DnnSpec& spec, const Eigen::VectorXd& theta_a,
                       const Eigen::VectorXd& theta_b,
                       const Eigen::VectorXd& sigma) {
  const DnnEval at_b = evaluate(spec, theta_b, sigma);
  const Eigen::VectorXd at_a = forward(spec, theta_a, sigma);
  return (at_a - at_b.output - at_b.jacobian * (theta_a - theta_b)).norm();
}

void save_weights(const std::string& path, const Eigen::VectorXd& theta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  char buf[64];
  const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  if (json) out << "[";
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", theta(i));
    if (json) {
      out << (i ? "," : "") << buf;
    } else {
      out << buf << "\n";
    }
  }
  if (json) out << "]\n";
}

Eigen::VectorXd load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> values;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    nlohmann::json doc = nlohmann::json::parse(in);
    if (doc.is_object() && doc.contains("theta")) doc = doc["theta"];
    if (!doc.is_array()) {
      throw std::runtime_error("weight file must hold a flat JSON array");
    }
    values.reserve(doc.size());
    for (const auto& v : doc) values.push_back(v.get<double>());
  } else {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      values.push_back(std::stod(line));
    }
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

}  // namespace cadnn
