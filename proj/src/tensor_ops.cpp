#include "cadnn/tensor_ops.hpp"

#include <stdexcept>

namespace cadnn {

Eigen::VectorXd vec(const Eigen::MatrixXd& a) {
  // Eigen stores column-major, so the raw buffer already is the
  // column-stacked vector.
  return Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double vec_product_identity_check(const Eigen::MatrixXd& a,
                                  const Eigen::MatrixXd& b,
                                  const Eigen::MatrixXd& c) {
  if (a.cols() != b.rows() || b.cols() != c.rows()) {
    throw std::invalid_argument(
        "vec_product_identity_check: non-conformable dimensions");
  }
  const Eigen::VectorXd lhs = vec(a * b * c);
  const Eigen::VectorXd rhs = kron(c.transpose(), a) * vec(b);
  return (lhs - rhs).norm();
}

}  // namespace cadnn
