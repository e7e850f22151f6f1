#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "flatgp/design.hpp"
#include "flatgp/kernels.hpp"

namespace flatgp {

// Finite set of parametric basis functions v_1..v_m.
class Basis {
 public:
  static Basis none() { return Basis(); }
  // All monomials of degree <= max_degree; max_degree = -1 gives the empty basis.
  static Basis monomials(int max_degree);
  static Basis functions(std::vector<std::function<double(Point)>> fns);

  bool is_monomial() const { return monomial_; }
  int max_degree() const { return max_degree_; }
  Eigen::Index size(int d) const;

  // Monomial bases are evaluated at map(x); explicit functions ignore the map.
  Eigen::MatrixXd eval(const Design& X, const AffineMap& map) const;

 private:
  bool monomial_ = true;
  int max_degree_ = -1;
  std::vector<std::function<double(Point)>> fns_;
};

// Semi-parametric model <l, V>: f = g + sum_i beta_i v_i, g ~ GP(0, l), flat prior on beta.
struct SemiParametricModel {
  Kernel kernel;
  Basis basis;

  std::string describe() const;
};

// <(-1)^r |x - y|^(2r-1), monomials of degree < r>.
SemiParametricModel polyharmonic_spm(int r, double gain = 1.0);

// Linear smoother y_hat = M y, with filter factors when the decomposition is available.
struct SmootherMatrix {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd filter;  // eigenvalues of M; may be empty

  double trace() const { return matrix.trace(); }
  Eigen::Index size() const { return matrix.rows(); }
};

struct FitOptions {
  bool check_cpd = true;
  double cpd_tol = 1e-9;
  double rank_tol = 1e-10;
  // Off only for callers that need the spectrum and never solve.
  bool check_singular = true;
};

// Factorisation of the bordered system [[L + s2 I, V], [V', 0]] by block elimination:
// V = Q1 R, Z spans the complement of span(V), and Z'(L + s2 I)Z is eigendecomposed.
class SaddleSystem {
 public:
  SaddleSystem(const SemiParametricModel& model, const Design& X, double sigma2,
               const FitOptions& opts = {});

  // Solves the system for right-hand sides (t; u), column by column.
  void solve(const Eigen::MatrixXd& t, const Eigen::MatrixXd& u, Eigen::MatrixXd& a,
             Eigen::MatrixXd& b) const;

  Eigen::MatrixXd basis_at(const Design& query) const;
  Eigen::VectorXd posterior_var(const Design& query) const;
  SmootherMatrix smoother() const;

  const SemiParametricModel& model() const { return model_; }
  const Design& design() const { return X_; }
  double sigma2() const { return sigma2_; }
  const Eigen::MatrixXd& L() const { return L_; }
  const Eigen::MatrixXd& V() const { return V_; }
  const Eigen::MatrixXd& Q() const { return Q1_; }
  const Eigen::MatrixXd& complement() const { return Z_; }
  // Eigenvalues of Z' L Z, i.e. the non-null spectrum of the projected kernel matrix.
  const Eigen::VectorXd& projected_eigenvalues() const { return lambda_; }

 private:
  SemiParametricModel model_;
  Design X_;
  double sigma2_;
  AffineMap map_;
  Eigen::MatrixXd L_, V_, Q1_, R_, Z_, U_;
  Eigen::VectorXd lambda_, mu_;
};

class SpmFit {
 public:
  SpmFit(SaddleSystem system, const Eigen::VectorXd& y);

  Eigen::VectorXd mean(const Design& query) const;
  Eigen::VectorXd var(const Design& query) const { return system_.posterior_var(query); }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  const SaddleSystem& system() const { return system_; }

 private:
  SaddleSystem system_;
  Eigen::VectorXd alpha_, beta_;
};

SpmFit fit_spm(const SemiParametricModel& model, const Design& X, const Eigen::VectorXd& y,
               double sigma2, const FitOptions& opts = {});

Eigen::VectorXd spm_posterior_mean(const SemiParametricModel& model, const Design& X,
                                   const Eigen::VectorXd& y, double sigma2, const Design& query);
Eigen::VectorXd spm_posterior_var(const SemiParametricModel& model, const Design& X, double sigma2,
                                  const Design& query);

// M = Q Q' + L~ (L~ + s2 I)^{-1} with L~ = (I - QQ') L (I - QQ').
SmootherMatrix spm_smoother(const SemiParametricModel& model, const Design& X, double sigma2);

// (I - QQ') L (I - QQ') for Q with orthonormal columns.
Eigen::MatrixXd project_out_basis(const Eigen::MatrixXd& L, const Eigen::MatrixXd& Q);

// True when L~ is positive semi-definite up to tol relative to its largest eigenvalue.
bool cpd_check(const SemiParametricModel& model, const Design& X, double tol = 1e-9);

// Leading Laurent coefficient B0 of eps (V V' + eps (L + s2 I))^{-1} as eps -> 0.
Eigen::MatrixXd laurent_b0(const Eigen::MatrixXd& L, const Eigen::MatrixXd& V, double sigma2);

// Smoothing spline of order p on univariate x with penalty weight eta, solved as the
// polyharmonic semi-parametric model with noise eta.
SpmFit smoothing_spline_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int p, double eta);

}  // namespace flatgp
