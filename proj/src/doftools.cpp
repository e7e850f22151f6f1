#include "flatgp/doftools.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "flatgp/error.hpp"
#include "flatgp/linalg.hpp"
#include "flatgp/numerics.hpp"
#include "flatgp/parallel.hpp"
#include "flatgp/polybasis.hpp"

namespace flatgp {

namespace {

double filtered_sum(const Eigen::VectorXd& lambda, double gain, double sigma2) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    double l = gain * std::max(lambda(i), 0.0);
    s += l / (l + sigma2);
  }
  return s;
}

Eigen::Index positive_count(const Eigen::VectorXd& lambda) {
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) > 0.0) ++k;
  return k;
}

// Gain on a semi-parametric base model whose smoother trace is m.
double tune_gain(const SemiParametricModel& base, const Design& X, double sigma2, double m,
                 double& achieved) {
  SaddleSystem sys(base, X, sigma2);
  const Eigen::VectorXd& lambda = sys.projected_eigenvalues();
  const double fixed = static_cast<double>(sys.V().cols());
  double top = lambda.size() ? lambda.maxCoeff() : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) > 1e-12 * top) ++rank;
  if (!(m > fixed) || !(m < fixed + static_cast<double>(rank)))
    throw Error(ErrorCode::UnreachableDof, "target model cannot reach dof " + std::to_string(m));
  auto f = [&](double g) { return fixed + filtered_sum(lambda, g, sigma2) - m; };
  auto res = bisect_log(f, 1e-12, 1e12, 1e-12 * static_cast<double>(X.size()), 24);
  achieved = m + res.f;
  return res.x;
}

IsofreedomCurve curve_from_points(double m, std::vector<IsofreedomPoint> pts) {
  IsofreedomCurve c;
  c.m = m;
  c.points = std::move(pts);
  std::vector<double> e, g;
  for (size_t i = c.points.size() / 2; i < c.points.size(); ++i) {
    e.push_back(c.points[i].eps);
    g.push_back(c.points[i].gamma);
  }
  c.slope = loglog_slope(e, g);
  return c;
}

void fill_row(const Kernel& kernel, const Design& X, const Eigen::VectorXd& y, double sigma2,
              double eps, const std::vector<double>& gamma_grid, double nugget, GridCell* row) {
  for (size_t j = 0; j < gamma_grid.size(); ++j) {
    row[j].eps = eps;
    row[j].gamma = gamma_grid[j];
  }
  try {
    KernelSpectrum spectrum(kernel.with_epsilon(eps), X);
    for (size_t j = 0; j < gamma_grid.size(); ++j) {
      GridCell& cell = row[j];
      try {
        SmootherMatrix M = spectrum.smoother(cell.gamma, sigma2, nugget);
        cell.dof = dof(M);
        cell.criteria.dof = cell.dof;
        if (y.size()) cell.criteria = evaluate_criteria(M, y, sigma2 + cell.gamma * nugget);
      } catch (const Error& e) {
        cell.ok = false;
        cell.error = e.what();
      }
    }
  } catch (const Error& e) {
    for (size_t j = 0; j < gamma_grid.size(); ++j) {
      row[j].ok = false;
      row[j].error = e.what();
    }
  }
}

}  // namespace

IsofreedomPoint isofreedom_gamma(const KernelSpectrum& spectrum, double sigma2, double m) {
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "isofreedom needs s2 > 0");
  const auto& lambda = spectrum.eigenvalues();
  const double n = static_cast<double>(lambda.size());
  if (!(m > 0.0) || !(m < static_cast<double>(positive_count(lambda))))
    throw Error(ErrorCode::UnreachableDof, "dof " + std::to_string(m) + " is not attainable");
  auto f = [&](double g) { return spectrum.dof(g, sigma2) - m; };
  auto res = bisect_log(f, 1e-12, 1e12, 1e-10 * n, 24);
  if (!res.bracketed)
    throw Error(ErrorCode::UnreachableDof, "could not bracket dof " + std::to_string(m));
  IsofreedomPoint pt;
  pt.gamma = res.x;
  pt.dof = m + res.f;
  pt.residual = std::abs(res.f);
  pt.iterations = res.iterations;
  return pt;
}

IsofreedomPoint isofreedom_gamma(const Kernel& kernel, const Design& X, double sigma2, double m) {
  IsofreedomPoint pt = isofreedom_gamma(KernelSpectrum(kernel, X), sigma2, m);
  pt.eps = kernel.epsilon();
  return pt;
}

IsofreedomCurve isofreedom_curve(const Kernel& kernel, const Design& X, double sigma2, double m,
                                 const std::vector<double>& eps_grid) {
  std::vector<IsofreedomPoint> pts(eps_grid.size());
  parallel_for(static_cast<std::ptrdiff_t>(eps_grid.size()), [&](std::ptrdiff_t i) {
    pts[i] = isofreedom_gamma(kernel.with_epsilon(eps_grid[i]), X, sigma2, m);
  });
  return curve_from_points(m, std::move(pts));
}

double spline_dof(const Design& X, int p, double eta) {
  const int d = static_cast<int>(X.dim());
  Eigen::MatrixXd V = eval_monomials(X, enumerate_monomials(p - 1, d), AffineMap::bounding(X));
  Eigen::MatrixXd Q = V.cols() ? Eigen::MatrixXd(Eigen::HouseholderQR<Eigen::MatrixXd>(V).householderQ() *
                                                 Eigen::MatrixXd::Identity(X.size(), V.cols()))
                               : Eigen::MatrixXd(X.size(), 0);
  Eigen::MatrixXd Z = linalg::orthonormal_complement(Q);
  Eigen::MatrixXd D = distance_power_matrix(X, 2 * p - 1);
  auto eig = linalg::symmetric_eigen((p % 2 ? -1.0 : 1.0) * Z.transpose() * D * Z);
  double s = static_cast<double>(V.cols());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    double l = std::max(eig.values(i), 0.0);
    s += l / (l + eta);
  }
  return s;
}

MatchedApproximation matched_approximation(const Kernel& kernel, const Design& X, double sigma2) {
  const int d = static_cast<int>(X.dim());
  const double n = static_cast<double>(X.size());
  MatchedApproximation out;
  out.source_dof = KernelSpectrum(kernel, X).dof(kernel.gain(), sigma2);
  const double m = out.source_dof;
  if (m >= n - 1e-9) throw Error(ErrorCode::UnreachableDof, "source smoother interpolates");
  const int r = regularity(kernel);

  if (r != kInfiniteRegularity && m > static_cast<double>(count_poly_dim(r - 1, d)) + 1e-9) {
    out.kind = "spline";
    SemiParametricModel base = polyharmonic_spm(r);
    out.target_gain = tune_gain(base, X, sigma2, m, out.achieved_dof);
    out.target = {base.kernel.with_gain(out.target_gain), base.basis};
    return out;
  }

  // A dof within the isofreedom tolerance of a polynomial dimension counts as that dimension.
  const double snap = 1e-9 * n;
  int q = 0;
  while (static_cast<double>(count_poly_dim(q, d)) <= m + snap) ++q;
  const double below = static_cast<double>(count_poly_dim(q - 1, d));
  if (std::abs(m - below) <= snap) {
    out.kind = "polynomial";
    out.target = {Kernel::zero(), Basis::monomials(q - 1)};
    out.achieved_dof = below;
    return out;
  }
  out.kind = "penalized_polynomial";
  Kernel unit = kernel.with_epsilon(1.0).with_gain(1.0);
  Eigen::MatrixXd Wbar = wronskian_schur(wronskian(unit, q, d), q);
  SemiParametricModel base{Kernel::finite_rank(q, d, Wbar), Basis::monomials(q - 1)};
  out.target_gain = tune_gain(base, X, sigma2, m, out.achieved_dof);
  out.target = {base.kernel.with_gain(out.target_gain), base.basis};
  return out;
}

std::vector<GridCell> evaluate_grid(const Kernel& kernel, const Design& X,
                                    const Eigen::VectorXd& y, double sigma2,
                                    const std::vector<double>& eps_grid,
                                    const std::vector<double>& gamma_grid, double nugget) {
  std::vector<GridCell> cells(eps_grid.size() * gamma_grid.size());
  parallel_for(static_cast<std::ptrdiff_t>(eps_grid.size()), [&](std::ptrdiff_t i) {
    fill_row(kernel, X, y, sigma2, eps_grid[i], gamma_grid, nugget, &cells[i * gamma_grid.size()]);
  });
  return cells;
}

namespace serial {

std::vector<GridCell> evaluate_grid(const Kernel& kernel, const Design& X,
                                    const Eigen::VectorXd& y, double sigma2,
                                    const std::vector<double>& eps_grid,
                                    const std::vector<double>& gamma_grid, double nugget) {
  std::vector<GridCell> cells(eps_grid.size() * gamma_grid.size());
  for (size_t i = 0; i < eps_grid.size(); ++i)
    fill_row(kernel, X, y, sigma2, eps_grid[i], gamma_grid, nugget, &cells[i * gamma_grid.size()]);
  return cells;
}

IsofreedomCurve isofreedom_curve(const Kernel& kernel, const Design& X, double sigma2, double m,
                                 const std::vector<double>& eps_grid) {
  std::vector<IsofreedomPoint> pts;
  for (double e : eps_grid) pts.push_back(isofreedom_gamma(kernel.with_epsilon(e), X, sigma2, m));
  return curve_from_points(m, std::move(pts));
}

}  // namespace serial

}  // namespace flatgp
