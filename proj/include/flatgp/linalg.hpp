#pragma once

#include <Eigen/Core>

namespace flatgp::linalg {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
};

// Eigendecomposition of the symmetric part of A.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& A);

// Orthonormal basis of the orthogonal complement of span(Q), for Q with orthonormal columns.
Eigen::MatrixXd orthonormal_complement(const Eigen::MatrixXd& Q);

// Orthonormal basis of span(A) from an SVD, dropping singular values below tol * max.
Eigen::MatrixXd orthonormal_range(const Eigen::MatrixXd& A, double tol = 1e-10);

// Smallest singular value over the largest; 0 for an empty or zero matrix.
double inverse_condition(const Eigen::MatrixXd& A);

double max_abs(const Eigen::MatrixXd& A);

}  // namespace flatgp::linalg
