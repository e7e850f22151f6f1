#include "flatgp/gp.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "flatgp/error.hpp"
#include "flatgp/linalg.hpp"

namespace flatgp {

namespace {

Eigen::LLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& C, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(C);
  if (llt.info() != Eigen::Success) {
    auto eig = linalg::symmetric_eigen(C);
    throw IllConditionedError(what, eig.values(0));
  }
  return llt;
}

Eigen::MatrixXd covariance(const Kernel& kernel, const Design& X, double sigma2, double nugget) {
  Eigen::MatrixXd C = kernel_matrix(kernel, X);
  C.diagonal().array() += sigma2 + kernel.gain() * nugget;
  return C;
}

void check_response(const SmootherMatrix& M, const Eigen::VectorXd& y) {
  if (y.size() != M.size()) throw Error(ErrorCode::InvalidArgument, "response length mismatch");
}

// 1 - M_ii, rejecting interpolating rows.
Eigen::VectorXd leverage_complement(const SmootherMatrix& M) {
  Eigen::VectorXd h = 1.0 - M.matrix.diagonal().array();
  for (Eigen::Index i = 0; i < h.size(); ++i)
    if (h(i) <= 1e-10)
      throw Error(ErrorCode::InterpolatingSmoother, "M_ii = 1 at row " + std::to_string(i));
  return h;
}

}  // namespace

GpPosterior gp_posterior(const Kernel& kernel, const Design& X, const Eigen::VectorXd& y,
                         double sigma2, const Design& query, double nugget) {
  if (y.size() != X.size()) throw Error(ErrorCode::InvalidArgument, "response length mismatch");
  auto llt = factor(covariance(kernel, X, sigma2, nugget), "K + s2 I is not positive definite");
  Eigen::MatrixXd k = cross_kernel_matrix(kernel, X, query);
  GpPosterior post;
  post.mean = k.transpose() * llt.solve(y);
  Eigen::MatrixXd w = llt.matrixL().solve(k);
  post.var.resize(query.size());
  for (Eigen::Index j = 0; j < query.size(); ++j) {
    double prior = kernel(query.point(j), query.point(j));
    double v = prior - w.col(j).squaredNorm();
    if (v < -1e-8 * std::max(1.0, std::abs(prior)))
      throw Error(ErrorCode::NegativeVariance, "posterior variance " + std::to_string(v));
    post.var(j) = std::max(v, 0.0);
  }
  return post;
}

KernelSpectrum::KernelSpectrum(const Kernel& kernel, const Design& X) {
  auto eig = linalg::symmetric_eigen(kernel_matrix(kernel.with_gain(1.0), X));
  lambda_ = eig.values;
  U_ = eig.vectors;
  double top = lambda_.size() ? lambda_.cwiseAbs().maxCoeff() : 0.0;
  if (lambda_.size() && lambda_(0) < -1e-10 * top)
    throw IllConditionedError("kernel matrix is not positive semi-definite", lambda_(0));
}

Eigen::VectorXd KernelSpectrum::filter(double gamma, double sigma2, double nugget) const {
  const double shift = nugget + sigma2 / gamma;
  Eigen::VectorXd f(lambda_.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    double lam = std::max(lambda_(i), 0.0);
    f(i) = lam + shift > 0.0 ? lam / (lam + shift) : 0.0;
  }
  return f;
}

double KernelSpectrum::dof(double gamma, double sigma2, double nugget) const {
  return filter(gamma, sigma2, nugget).sum();
}

SmootherMatrix KernelSpectrum::smoother(double gamma, double sigma2, double nugget) const {
  SmootherMatrix M;
  M.filter = filter(gamma, sigma2, nugget);
  M.matrix = U_ * M.filter.asDiagonal() * U_.transpose();
  return M;
}

SmootherMatrix gp_smoother(const Kernel& kernel, const Design& X, double sigma2, double nugget) {
  return KernelSpectrum(kernel, X).smoother(kernel.gain(), sigma2, nugget);
}

double dof(const SmootherMatrix& M) { return M.filter.size() ? M.filter.sum() : M.trace(); }

double loo_mse(const SmootherMatrix& M, const Eigen::VectorXd& y) {
  check_response(M, y);
  Eigen::VectorXd h = leverage_complement(M);
  Eigen::VectorXd e = (y - M.matrix * y).cwiseQuotient(h);
  return e.squaredNorm() / static_cast<double>(y.size());
}

double loo_nll(const SmootherMatrix& M, const Eigen::VectorXd& y, double sigma2) {
  check_response(M, y);
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::DegenerateVariance, "LOO predictive variance is zero");
  Eigen::VectorXd h = leverage_complement(M);
  Eigen::VectorXd r = y - M.matrix * y;
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double v = sigma2 / h(i);
    double e = r(i) / h(i);
    total += 0.5 * std::log(2.0 * std::numbers::pi * v) + 0.5 * e * e / v;
  }
  return total / static_cast<double>(y.size());
}

double sure(const SmootherMatrix& M, const Eigen::VectorXd& y, double sigma2) {
  check_response(M, y);
  const double n = static_cast<double>(y.size());
  return -sigma2 + (y - M.matrix * y).squaredNorm() / n + 2.0 * sigma2 * M.trace() / n;
}

double nlml(const Kernel& kernel, const Design& X, const Eigen::VectorXd& y, double sigma2,
            double nugget) {
  if (y.size() != X.size()) throw Error(ErrorCode::InvalidArgument, "response length mismatch");
  auto llt = factor(covariance(kernel, X, sigma2, nugget), "K + s2 I is not positive definite");
  Eigen::VectorXd w = llt.matrixL().solve(y);
  double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double n = static_cast<double>(y.size());
  return 0.5 * w.squaredNorm() + 0.5 * logdet + 0.5 * n * std::log(2.0 * std::numbers::pi);
}

CriterionValues evaluate_criteria(const SmootherMatrix& M, const Eigen::VectorXd& y, double sigma2) {
  return {dof(M), loo_mse(M, y), loo_nll(M, y, sigma2), sure(M, y, sigma2)};
}

}  // namespace flatgp
