#include "flatgp/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace flatgp::linalg {

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& A) {
  if (A.rows() == 0) return {Eigen::VectorXd(0), Eigen::MatrixXd(0, 0)};
  Eigen::MatrixXd S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::MatrixXd orthonormal_complement(const Eigen::MatrixXd& Q) {
  const Eigen::Index n = Q.rows(), m = Q.cols();
  if (m == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Q);
  Eigen::MatrixXd full = qr.householderQ();
  return full.rightCols(n - m);
}

Eigen::MatrixXd orthonormal_range(const Eigen::MatrixXd& A, double tol) {
  if (A.cols() == 0 || A.rows() == 0) return Eigen::MatrixXd(A.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

double inverse_condition(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return 0.0;
  if (s.size() < std::min(A.rows(), A.cols())) return 0.0;
  return s(s.size() - 1) / s(0);
}

double max_abs(const Eigen::MatrixXd& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace flatgp::linalg
