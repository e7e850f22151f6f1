#include "flatgp/spm.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "flatgp/error.hpp"
#include "flatgp/linalg.hpp"
#include "flatgp/polybasis.hpp"

namespace flatgp {

Basis Basis::monomials(int max_degree) {
  Basis b;
  b.max_degree_ = std::max(max_degree, -1);
  return b;
}

Basis Basis::functions(std::vector<std::function<double(Point)>> fns) {
  Basis b;
  b.monomial_ = false;
  b.fns_ = std::move(fns);
  return b;
}

Eigen::Index Basis::size(int d) const {
  return monomial_ ? count_poly_dim(max_degree_, d) : static_cast<Eigen::Index>(fns_.size());
}

Eigen::MatrixXd Basis::eval(const Design& X, const AffineMap& map) const {
  if (monomial_) return eval_monomials(X, enumerate_monomials(max_degree_, static_cast<int>(X.dim())), map);
  Eigen::MatrixXd V(X.size(), static_cast<Eigen::Index>(fns_.size()));
  for (Eigen::Index i = 0; i < X.size(); ++i)
    for (size_t j = 0; j < fns_.size(); ++j) V(i, j) = fns_[j](X.point(i));
  return V;
}

std::string SemiParametricModel::describe() const {
  std::string b = basis.is_monomial()
                      ? "monomials(deg<=" + std::to_string(basis.max_degree()) + ")"
                      : "functions(" + std::to_string(basis.size(1)) + ")";
  return "<" + kernel.describe() + ", " + b + ">";
}

SemiParametricModel polyharmonic_spm(int r, double gain) {
  return {Kernel::polyharmonic(r, gain), Basis::monomials(r - 1)};
}

SaddleSystem::SaddleSystem(const SemiParametricModel& model, const Design& X, double sigma2,
                           const FitOptions& opts)
    : model_(model), X_(X), sigma2_(sigma2) {
  if (sigma2 < 0.0) throw Error(ErrorCode::InvalidArgument, "noise variance must be >= 0");
  const Eigen::Index n = X.size();
  map_ = model.basis.is_monomial() ? AffineMap::bounding(X) : AffineMap::identity(X.dim());
  V_ = model.basis.eval(X, map_);
  const Eigen::Index m = V_.cols();
  if (m > n)
    throw Error(ErrorCode::NotUnisolvent,
                "basis has " + std::to_string(m) + " functions for " + std::to_string(n) + " points");
  if (m > 0) {
    if (linalg::inverse_condition(V_) <= opts.rank_tol)
      throw Error(ErrorCode::NotUnisolvent, "basis matrix is rank deficient on the design");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(V_);
    Eigen::MatrixXd full = qr.householderQ();
    Q1_ = full.leftCols(m);
    Z_ = full.rightCols(n - m);
    R_ = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  } else {
    Q1_ = Eigen::MatrixXd(n, 0);
    R_ = Eigen::MatrixXd(0, 0);
    Z_ = Eigen::MatrixXd::Identity(n, n);
  }
  L_ = kernel_matrix(model.kernel, X);
  auto eig = linalg::symmetric_eigen(Z_.transpose() * L_ * Z_);
  lambda_ = eig.values;
  U_ = eig.vectors;
  double scale = lambda_.size() ? lambda_.cwiseAbs().maxCoeff() : 0.0;
  // Projection leaves roundoff of the size of L itself, even when Z'LZ vanishes.
  double cpd_scale = std::max(scale, L_.size() ? L_.cwiseAbs().maxCoeff() : 0.0);
  if (opts.check_cpd && lambda_.size() && lambda_.minCoeff() < -opts.cpd_tol * cpd_scale)
    throw Error(ErrorCode::NotConditionallyPositiveDefinite,
                "projected kernel matrix has eigenvalue " + std::to_string(lambda_.minCoeff()));
  mu_ = lambda_.array() + sigma2;
  if (opts.check_singular && mu_.size()) {
    double floor = 1e-14 * std::max(scale, sigma2);
    if (!(mu_.cwiseAbs().minCoeff() > floor))
      throw Error(ErrorCode::SingularSystem, "bordered system is singular");
  }
}

void SaddleSystem::solve(const Eigen::MatrixXd& t, const Eigen::MatrixXd& u, Eigen::MatrixXd& a,
                         Eigen::MatrixXd& b) const {
  const Eigen::Index n = X_.size(), m = V_.cols();
  Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(n, t.cols());
  if (m > 0) a0 = Q1_ * R_.transpose().triangularView<Eigen::Lower>().solve(u);
  Eigen::MatrixXd w = t - L_ * a0 - sigma2_ * a0;
  Eigen::MatrixXd c = U_ * (mu_.cwiseInverse().asDiagonal() * (U_.transpose() * (Z_.transpose() * w)));
  a = a0 + Z_ * c;
  if (m > 0) {
    Eigen::MatrixXd rest = t - L_ * a - sigma2_ * a;
    b = R_.triangularView<Eigen::Upper>().solve(Q1_.transpose() * rest);
  } else {
    b = Eigen::MatrixXd(0, t.cols());
  }
}

Eigen::MatrixXd SaddleSystem::basis_at(const Design& query) const {
  return model_.basis.eval(query, map_);
}

Eigen::VectorXd SaddleSystem::posterior_var(const Design& query) const {
  Eigen::MatrixXd t = cross_kernel_matrix(model_.kernel, X_, query);
  Eigen::MatrixXd u = basis_at(query).transpose();
  Eigen::MatrixXd a, b;
  solve(t, u, a, b);
  Eigen::VectorXd out(query.size());
  for (Eigen::Index j = 0; j < query.size(); ++j) {
    double prior = model_.kernel(query.point(j), query.point(j));
    double quad = t.col(j).dot(a.col(j)) + (u.rows() ? u.col(j).dot(b.col(j)) : 0.0);
    double v = prior - quad;
    double scale = std::max({1.0, std::abs(prior), std::abs(quad)});
    if (v < -1e-8 * scale)
      throw Error(ErrorCode::NegativeVariance, "posterior variance " + std::to_string(v));
    out(j) = std::max(v, 0.0);
  }
  return out;
}

SmootherMatrix SaddleSystem::smoother() const {
  const Eigen::Index m = V_.cols();
  Eigen::VectorXd f(lambda_.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    double lam = std::max(lambda_(i), 0.0);
    f(i) = lam + sigma2_ > 0.0 ? lam / (lam + sigma2_) : 0.0;
  }
  Eigen::MatrixXd ZU = Z_ * U_;
  SmootherMatrix M;
  M.matrix = Q1_ * Q1_.transpose() + ZU * f.asDiagonal() * ZU.transpose();
  M.filter.resize(m + f.size());
  M.filter << Eigen::VectorXd::Ones(m), f;
  return M;
}

SpmFit::SpmFit(SaddleSystem system, const Eigen::VectorXd& y) : system_(std::move(system)) {
  if (y.size() != system_.design().size())
    throw Error(ErrorCode::InvalidArgument, "response length does not match the design");
  Eigen::MatrixXd a, b;
  system_.solve(y, Eigen::MatrixXd::Zero(system_.V().cols(), 1), a, b);
  alpha_ = a.col(0);
  beta_ = b.col(0);
}

Eigen::VectorXd SpmFit::mean(const Design& query) const {
  Eigen::VectorXd mu = cross_kernel_matrix(system_.model().kernel, query, system_.design()) * alpha_;
  if (beta_.size()) mu += system_.basis_at(query) * beta_;
  return mu;
}

SpmFit fit_spm(const SemiParametricModel& model, const Design& X, const Eigen::VectorXd& y,
               double sigma2, const FitOptions& opts) {
  return SpmFit(SaddleSystem(model, X, sigma2, opts), y);
}

Eigen::VectorXd spm_posterior_mean(const SemiParametricModel& model, const Design& X,
                                   const Eigen::VectorXd& y, double sigma2, const Design& query) {
  return fit_spm(model, X, y, sigma2).mean(query);
}

Eigen::VectorXd spm_posterior_var(const SemiParametricModel& model, const Design& X, double sigma2,
                                  const Design& query) {
  return SaddleSystem(model, X, sigma2).posterior_var(query);
}

SmootherMatrix spm_smoother(const SemiParametricModel& model, const Design& X, double sigma2) {
  return SaddleSystem(model, X, sigma2).smoother();
}

Eigen::MatrixXd project_out_basis(const Eigen::MatrixXd& L, const Eigen::MatrixXd& Q) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(L.rows(), L.cols()) - Q * Q.transpose();
  return P * L * P;
}

bool cpd_check(const SemiParametricModel& model, const Design& X, double tol) {
  FitOptions opts;
  opts.check_cpd = false;
  opts.check_singular = false;
  SaddleSystem sys(model, X, 0.0, opts);
  const auto& lam = sys.projected_eigenvalues();
  if (lam.size() == 0) return true;
  double scale = std::max(lam.cwiseAbs().maxCoeff(), sys.L().cwiseAbs().maxCoeff());
  return lam.minCoeff() >= -tol * std::max(scale, 1e-300);
}

Eigen::MatrixXd laurent_b0(const Eigen::MatrixXd& L, const Eigen::MatrixXd& V, double sigma2) {
  const Eigen::Index n = L.rows();
  if (V.cols() > 0 && linalg::inverse_condition(V) <= 1e-10)
    throw Error(ErrorCode::NotUnisolvent, "V must have full column rank");
  Eigen::MatrixXd Q = V.cols() ? Eigen::MatrixXd(Eigen::HouseholderQR<Eigen::MatrixXd>(V).householderQ() *
                                                 Eigen::MatrixXd::Identity(n, V.cols()))
                               : Eigen::MatrixXd(n, 0);
  Eigen::MatrixXd Z = linalg::orthonormal_complement(Q);
  Eigen::MatrixXd C = L + sigma2 * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd S = Z.transpose() * C * Z;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
  if (S.size() && !lu.isInvertible()) throw Error(ErrorCode::SingularSystem, "Z'(L + s2 I)Z is singular");
  return S.size() ? Eigen::MatrixXd(Z * lu.solve(Z.transpose())) : Eigen::MatrixXd::Zero(n, n);
}

SpmFit smoothing_spline_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int p, double eta) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "spline order must be >= 1");
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorCode::DegenerateDesign, "duplicate abscissae");
  if (x.size() <= p)
    throw Error(ErrorCode::NotUnisolvent, "spline of order p needs more than p points");
  return fit_spm(polyharmonic_spm(p), Design::from_vector(x), y, eta);
}

}  // namespace flatgp
