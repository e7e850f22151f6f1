#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "flatgp/design.hpp"
#include "flatgp/gp.hpp"
#include "flatgp/kernels.hpp"
#include "flatgp/spm.hpp"

namespace flatgp {

// Kernel gamma0 eps^{-p} kappa_eps, i.e. the base kernel at width eps with gain gamma0 eps^{-p}.
struct ScaledKernelFamily {
  Kernel base;
  int p = 0;
  double gamma0 = 1.0;

  Kernel at(double eps) const;
};

enum class LimitKind { PenalizedPolynomial, UnpenalizedPolynomial, Spline, Interpolation };

std::string to_string(LimitKind kind);

// Model that the scaled family approaches as eps -> 0.
struct LimitCase {
  LimitKind kind = LimitKind::Interpolation;
  int penalized_degree = -1;  // degree of the penalised block, or r for splines
  int basis_degree = -1;      // unpenalised monomials have degree <= basis_degree
  SemiParametricModel model;
  bool scale_free = false;    // model holds only up to a multiplicative constant on its kernel
};

// Classification from (r, p, d) alone. The penalised case uses (x'y)^m as its kernel,
// which is exact up to scale for Gaussian kernels and in one dimension.
LimitCase classify_limit(int r, int p, int d);

// Classification with the exact limiting kernel of `family`: gamma0 times the Wronskian
// Schur block for the penalised case and gamma0 f_{2r-1} |x - y|^{2r-1} for splines.
LimitCase equivalent_model(const ScaledKernelFamily& family, int d);

// M0 = A + B Gamma B' with Gamma_ii = gamma0 l_i / (gamma0 l_i + s2).
SmootherMatrix limiting_smoother(const ScaledKernelFamily& family, const Design& X, double sigma2);

// Predicted eps-valuations of the kernel eigenvalues in one dimension:
// 2(i-1) for i <= r, then 2r-1.
std::vector<int> eigenvalue_valuations(int r, int n);

struct EquivalenceCheck {
  bool equivalent = false;
  int trials = 0;
  double max_mean_dev = 0.0;
  double max_var_dev = 0.0;
  double max_smoother_dev = 0.0;
};

// Randomised check that two models give the same predictions: random noise levels,
// responses and query points, comparing means, variances and smoothers on X and X + {x}.
// Deviations are relative to max(1, |a|, |b|).
EquivalenceCheck check_pred_equiv(const SemiParametricModel& a, const SemiParametricModel& b,
                                  const Design& X, int trials = 5, double tol = 1e-8,
                                  std::uint64_t seed = 0);

// Gain alpha on base.kernel whose smoother has the trace of `target`.
double scale_by_trace(const SemiParametricModel& base, const SmootherMatrix& target,
                      const Design& X, double sigma2);

// As scale_by_trace, then requires max |M(alpha) - target| <= tol or throws NotProportional.
double match_scale(const SemiParametricModel& base, const SmootherMatrix& target, const Design& X,
                   double sigma2, double tol = 1e-6);
double match_scale(const SemiParametricModel& a, const SemiParametricModel& b, const Design& X,
                   double sigma2, double tol = 1e-6);

struct ConvergenceOptions {
  double sigma2 = 0.01;
  int data_vectors = 3;
  std::uint64_t seed = 0;
  std::vector<Eigen::VectorXd> responses;  // used instead of random data when non-empty
  std::optional<SemiParametricModel> target;
  bool match_scale = false;
  bool compare_variance = true;
  double min_slope = 0.8;
  double final_tol = 1e300;
};

struct ConvergenceRow {
  double eps = 0.0;
  double mean_dev = 0.0;
  double var_dev = 0.0;
  double smoother_dev = 0.0;
  double scale = 1.0;
  bool ok = true;
  std::string error;
};

struct EquivalenceReport {
  LimitCase limit;
  std::vector<ConvergenceRow> rows;
  double mean_slope = 0.0;
  double var_slope = 0.0;
  double smoother_slope = 0.0;
  bool pass = false;
  std::vector<std::string> warnings;
};

// Compares the GP of `family` at each eps with the limiting (or given) model.
// Grid points where the GP is ill-conditioned are dropped with a warning; fewer than
// three usable points throws InsufficientGrid.
EquivalenceReport convergence_study(const ScaledKernelFamily& family, const Design& X,
                                    const Design& query, const std::vector<double>& eps_grid,
                                    const ConvergenceOptions& opts = {});

struct CurvePoint {
  double gamma = 0.0;
  double pred_a = 0.0;
  double pred_b = 0.0;
  bool ok = true;
  std::string error;
};

// Joint GP posterior means at (xa, xb) as the gain runs over gamma_grid.
std::vector<CurvePoint> prediction_curve(const Kernel& kernel, const Design& X,
                                         const Eigen::VectorXd& y, double sigma2,
                                         const std::vector<double>& gamma_grid, Point xa, Point xb);

struct AnchorPoint {
  int degree = 0;
  double pred_a = 0.0;
  double pred_b = 0.0;
};

// Least-squares polynomial fits of degree 0..max_degree evaluated at (xa, xb).
std::vector<AnchorPoint> polynomial_anchors(const Design& X, const Eigen::VectorXd& y,
                                            int max_degree, Point xa, Point xb);

}  // namespace flatgp
