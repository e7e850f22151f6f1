#pragma once

#include <Eigen/Core>

#include "flatgp/design.hpp"
#include "flatgp/kernels.hpp"
#include "flatgp/spm.hpp"

namespace flatgp {

struct GpPosterior {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;  // latent f(x), noise excluded
};

// Posterior of f ~ GP(0, kernel) given y = f(X) + noise. The kernel carries its own
// eps and gain gamma. A nugget nu adds gamma * nu to the diagonal of the inverted matrix.
// Throws IllConditioned when the Cholesky factorisation fails.
GpPosterior gp_posterior(const Kernel& kernel, const Design& X, const Eigen::VectorXd& y,
                         double sigma2, const Design& query, double nugget = 0.0);

// Eigendecomposition of the unit-gain kernel matrix at fixed eps, reused across gains.
//
// With gain gamma, noise s2 and nugget nu the smoother is
//   M = K (K + (nu + s2 / gamma) I)^{-1},
// so eigenvalue lambda is filtered by lambda / (lambda + nu + s2 / gamma).
class KernelSpectrum {
 public:
  KernelSpectrum(const Kernel& kernel, const Design& X);

  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  const Eigen::MatrixXd& eigenvectors() const { return U_; }
  Eigen::VectorXd filter(double gamma, double sigma2, double nugget = 0.0) const;
  double dof(double gamma, double sigma2, double nugget = 0.0) const;
  SmootherMatrix smoother(double gamma, double sigma2, double nugget = 0.0) const;

 private:
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd U_;
};

// Smoother of the GP whose gain is kernel.gain().
SmootherMatrix gp_smoother(const Kernel& kernel, const Design& X, double sigma2, double nugget = 0.0);

double dof(const SmootherMatrix& M);

// Fast leave-one-out criteria from the smoother. loo_nll uses the predictive variance
// of y_i given y_{-i}, which is s2 / (1 - M_ii), and averages over i.
double loo_mse(const SmootherMatrix& M, const Eigen::VectorXd& y);
double loo_nll(const SmootherMatrix& M, const Eigen::VectorXd& y, double sigma2);
double sure(const SmootherMatrix& M, const Eigen::VectorXd& y, double sigma2);

// Negative log marginal likelihood, 1/2 y'C^{-1}y + 1/2 log det(2 pi C),
// C = K + (s2 + gamma nu) I.
double nlml(const Kernel& kernel, const Design& X, const Eigen::VectorXd& y, double sigma2,
            double nugget = 0.0);

struct CriterionValues {
  double dof = 0.0;
  double loo_mse = 0.0;
  double loo_nll = 0.0;
  double sure = 0.0;
};

CriterionValues evaluate_criteria(const SmootherMatrix& M, const Eigen::VectorXd& y, double sigma2);

}  // namespace flatgp
