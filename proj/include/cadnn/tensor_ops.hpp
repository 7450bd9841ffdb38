#pragma once

#include <Eigen/Core>

namespace cadnn {

/// Column-stacking vectorization: vec(A) stacks the columns of A top to
/// bottom, so vec(A)(j*rows + i) = A(i, j).
Eigen::VectorXd vec(const Eigen::MatrixXd& a);

/// Kronecker product. Block (i, j) of the result is a(i, j) * b, giving a
/// (rows_a*rows_b) x (cols_a*cols_b) matrix.
Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Residual ||vec(A*B*C) - (C^T kron A) vec(B)|| of the vectorization
/// identity for conformable A (p x a), B (a x r), C (r x s).
/// Throws std::invalid_argument when the dimensions do not conform.
double vec_product_identity_check(const Eigen::MatrixXd& a,
                                  const Eigen::MatrixXd& b,
                                  const Eigen::MatrixXd& c);

}  // namespace cadnn
