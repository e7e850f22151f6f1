#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "flatgp/design.hpp"
#include "flatgp/gp.hpp"
#include "flatgp/kernels.hpp"
#include "flatgp/spm.hpp"

namespace flatgp {

struct IsofreedomPoint {
  double eps = 0.0;
  double gamma = 0.0;
  double dof = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Gain gamma at which the GP smoother at kernel.epsilon() has trace m. Bisection on
// log gamma from [1e-12, 1e12], widened as needed, to |dof - m| <= 1e-10 n.
// Throws UnreachableDof when m is not attainable.
IsofreedomPoint isofreedom_gamma(const Kernel& kernel, const Design& X, double sigma2, double m);
IsofreedomPoint isofreedom_gamma(const KernelSpectrum& spectrum, double sigma2, double m);

struct IsofreedomCurve {
  double m = 0.0;
  std::vector<IsofreedomPoint> points;
  double slope = 0.0;  // d log gamma / d log eps over the last half of the grid
};

IsofreedomCurve isofreedom_curve(const Kernel& kernel, const Design& X, double sigma2, double m,
                                 const std::vector<double>& eps_grid);

// Smoothing spline of order p with penalty eta: p + sum_i l_i / (l_i + eta), where l_i are
// the eigenvalues of (-1)^p Z' D Z, D_ij = |x_i - x_j|^(2p-1) and Z spans the complement
// of polynomials of degree < p.
double spline_dof(const Design& X, int p, double eta);

struct MatchedApproximation {
  double source_dof = 0.0;
  std::string kind;  // "polynomial", "penalized_polynomial" or "spline"
  SemiParametricModel target;
  double target_gain = 0.0;
  double achieved_dof = 0.0;
};

// Flat-limit model with the same degrees of freedom as the GP (kernel carries eps and gain).
MatchedApproximation matched_approximation(const Kernel& kernel, const Design& X, double sigma2);

struct GridCell {
  double eps = 0.0;
  double gamma = 0.0;
  double dof = 0.0;
  CriterionValues criteria;
  bool ok = true;
  std::string error;
};

// dof (and criteria when y is non-empty) over an eps x gamma grid, eps-major.
// Each eps row shares one eigendecomposition; rows run in parallel.
std::vector<GridCell> evaluate_grid(const Kernel& kernel, const Design& X,
                                    const Eigen::VectorXd& y, double sigma2,
                                    const std::vector<double>& eps_grid,
                                    const std::vector<double>& gamma_grid, double nugget = 0.0);

namespace serial {
std::vector<GridCell> evaluate_grid(const Kernel& kernel, const Design& X,
                                    const Eigen::VectorXd& y, double sigma2,
                                    const std::vector<double>& eps_grid,
                                    const std::vector<double>& gamma_grid, double nugget = 0.0);
IsofreedomCurve isofreedom_curve(const Kernel& kernel, const Design& X, double sigma2, double m,
                                 const std::vector<double>& eps_grid);
}  // namespace serial

}  // namespace flatgp
