#include "flatgp/flatlimit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "flatgp/error.hpp"
#include "flatgp/linalg.hpp"
#include "flatgp/numerics.hpp"
#include "flatgp/parallel.hpp"
#include "flatgp/polybasis.hpp"

namespace flatgp {

namespace {

// 2r compared with p + 1 without overflowing the infinite sentinel.
int compare_regularity(int r, int p) {
  long long lhs = 2LL * r, rhs = p + 1LL;
  return lhs < rhs ? -1 : (lhs == rhs ? 0 : 1);
}

Design single_point(Point x) {
  PointMatrix m(1, static_cast<Eigen::Index>(x.size()));
  for (size_t j = 0; j < x.size(); ++j) m(0, j) = x[j];
  return Design(std::move(m));
}

double rel_dev(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

double rel_dev(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < A.size(); ++i) d = std::max(d, rel_dev(A.data()[i], B.data()[i]));
  return d;
}

Eigen::MatrixXd filtered(const Eigen::MatrixXd& vectors, const Eigen::VectorXd& f) {
  return vectors * f.asDiagonal() * vectors.transpose();
}

Eigen::VectorXd gain_filter(const Eigen::VectorXd& lambda, double gamma0, double sigma2) {
  Eigen::VectorXd g(lambda.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    double l = gamma0 * std::max(lambda(i), 0.0);
    g(i) = l + sigma2 > 0.0 ? l / (l + sigma2) : 0.0;
  }
  return g;
}

}  // namespace

Kernel ScaledKernelFamily::at(double eps) const {
  return base.with_epsilon(eps).with_gain(gamma0 * std::pow(eps, -p));
}

std::string to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::PenalizedPolynomial: return "penalized_polynomial";
    case LimitKind::UnpenalizedPolynomial: return "unpenalized_polynomial";
    case LimitKind::Spline: return "spline";
    case LimitKind::Interpolation: return "interpolation";
  }
  return "unknown";
}

LimitCase classify_limit(int r, int p, int d) {
  if (p < 0) throw Error(ErrorCode::InvalidArgument, "p must be >= 0");
  if (r < 1) throw Error(ErrorCode::InvalidArgument, "regularity must be >= 1");
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
  LimitCase lc;
  int cmp = compare_regularity(r, p);
  if (cmp < 0) {
    lc.kind = LimitKind::Interpolation;
    lc.model = r == kInfiniteRegularity ? SemiParametricModel{Kernel::zero(), Basis::none()}
                                        : polyharmonic_spm(r);
  } else if (cmp == 0) {
    lc.kind = LimitKind::Spline;
    lc.penalized_degree = r;
    lc.basis_degree = r - 1;
    lc.model = polyharmonic_spm(r);
    lc.scale_free = true;
  } else if (p % 2 == 0) {
    int m = p / 2;
    lc.kind = LimitKind::PenalizedPolynomial;
    lc.penalized_degree = m;
    lc.basis_degree = m - 1;
    lc.model = {Kernel::polynomial(m), Basis::monomials(m - 1)};
    lc.scale_free = true;
  } else {
    lc.kind = LimitKind::UnpenalizedPolynomial;
    lc.basis_degree = (p - 1) / 2;
    lc.model = {Kernel::zero(), Basis::monomials(lc.basis_degree)};
  }
  return lc;
}

LimitCase equivalent_model(const ScaledKernelFamily& family, int d) {
  const int r = regularity(family.base);
  LimitCase lc = classify_limit(r, family.p, d);
  Kernel unit = family.base.with_epsilon(1.0).with_gain(1.0);
  if (lc.kind == LimitKind::PenalizedPolynomial) {
    int m = lc.penalized_degree;
    Eigen::MatrixXd Wbar = wronskian_schur(wronskian(unit, m, d), m);
    lc.model.kernel = Kernel::finite_rank(m, d, Wbar, family.gamma0);
    lc.scale_free = false;
  } else if (lc.kind == LimitKind::Spline) {
    double f = radial_series(unit, 2 * r - 1).leading_odd();
    lc.model.kernel = Kernel::polyharmonic(r, family.gamma0 * f * (r % 2 ? -1.0 : 1.0));
    lc.scale_free = false;
  }
  return lc;
}

SmootherMatrix limiting_smoother(const ScaledKernelFamily& family, const Design& X, double sigma2) {
  const int r = regularity(family.base);
  const int p = family.p;
  const int d = static_cast<int>(X.dim());
  const Eigen::Index n = X.size();
  const int l = p % 2 == 0 ? p / 2 : (p + 1) / 2;
  const int cmp = compare_regularity(r, p);

  SmootherMatrix M;
  if (count_poly_dim(l - 1, d) >= n || cmp < 0) {
    M.matrix = Eigen::MatrixXd::Identity(n, n);
    M.filter = Eigen::VectorXd::Ones(n);
    return M;
  }

  // Unpenalised part: orthonormal basis of polynomials of degree < l (or < r for splines).
  const int below = cmp == 0 ? r : l;
  VandermondeBlocks vb = vandermonde(X, cmp == 0 ? r - 1 : l);
  const Eigen::Index k = count_poly_dim(below - 1, d);
  if (k > 0 && linalg::inverse_condition(vb.scaled.leftCols(k)) <= 1e-10)
    throw Error(ErrorCode::NotUnisolvent, "design is not unisolvent for the limiting basis");
  Eigen::MatrixXd Q = vb.orthonormal.leftCols(k);
  Eigen::MatrixXd A = Q * Q.transpose();
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - A;

  Eigen::MatrixXd penalised;
  Kernel unit = family.base.with_epsilon(1.0).with_gain(1.0);
  if (cmp == 0) {
    double f = radial_series(unit, 2 * r - 1).leading_odd();
    penalised = f * P * distance_power_matrix(X, 2 * r - 1) * P;
  } else if (p % 2 == 0) {
    Eigen::MatrixXd Wbar = wronskian_schur(wronskian(unit, l, d), l);
    // The rescaled degree-l block differs from the raw one by scale^{-l} plus lower terms.
    Eigen::MatrixXd Vl = P * vb.scaled.middleCols(vb.block_offset[l], count_monomials(l, d));
    penalised = std::pow(vb.map.scale, 2 * l) * Vl * Wbar * Vl.transpose();
  } else {
    M.matrix = A;
    M.filter = Eigen::VectorXd::Zero(n);
    M.filter.head(k).setOnes();
    return M;
  }

  auto eig = linalg::symmetric_eigen(penalised);
  Eigen::VectorXd gamma = gain_filter(eig.values, family.gamma0, sigma2);
  // Directions inside span(Q) carry numerically zero eigenvalues and are dropped.
  double top = eig.values.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < gamma.size(); ++i)
    if (eig.values(i) <= 1e-12 * top) gamma(i) = 0.0;
  M.matrix = A + filtered(eig.vectors, gamma);
  M.filter.resize(k + gamma.size());
  M.filter << Eigen::VectorXd::Ones(k), gamma;
  std::sort(M.filter.data(), M.filter.data() + M.filter.size(), std::greater<>());
  M.filter.conservativeResize(n);
  return M;
}

std::vector<int> eigenvalue_valuations(int r, int n) {
  std::vector<int> v(n);
  for (int i = 1; i <= n; ++i) v[i - 1] = (r == kInfiniteRegularity || i <= r) ? 2 * (i - 1) : 2 * r - 1;
  return v;
}

EquivalenceCheck check_pred_equiv(const SemiParametricModel& a, const SemiParametricModel& b,
                                  const Design& X, int trials, double tol, std::uint64_t seed) {
  const int d = static_cast<int>(X.dim());
  if (a.basis.size(d) != b.basis.size(d))
    throw Error(ErrorCode::IncomparableModels, "models have different parametric dimensions");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  Eigen::RowVectorXd lo = X.points().colwise().minCoeff();
  Eigen::RowVectorXd hi = X.points().colwise().maxCoeff();

  EquivalenceCheck res;
  res.trials = trials;
  for (int t = 0; t < trials; ++t) {
    double sigma2 = std::exp(std::log(1e-2) + unit(rng) * std::log(1e2));
    Eigen::VectorXd y(X.size());
    for (auto& v : y) v = normal(rng);
    std::vector<double> x(d);
    for (int j = 0; j < d; ++j) x[j] = lo(j) + (hi(j) - lo(j)) * (1.2 * unit(rng) - 0.1);
    Design q = single_point(x);

    SpmFit fa = fit_spm(a, X, y, sigma2);
    SpmFit fb = fit_spm(b, X, y, sigma2);
    res.max_mean_dev = std::max(res.max_mean_dev, rel_dev(fa.mean(q)(0), fb.mean(q)(0)));
    res.max_var_dev = std::max(res.max_var_dev, rel_dev(fa.var(q)(0), fb.var(q)(0)));
    res.max_smoother_dev = std::max(
        res.max_smoother_dev,
        rel_dev(fa.system().smoother().matrix, fb.system().smoother().matrix));
    Design Xq = X.with_point(x);
    res.max_smoother_dev = std::max(
        res.max_smoother_dev,
        rel_dev(spm_smoother(a, Xq, sigma2).matrix, spm_smoother(b, Xq, sigma2).matrix));
  }
  res.equivalent = res.max_mean_dev <= tol && res.max_var_dev <= tol && res.max_smoother_dev <= tol;
  return res;
}

double scale_by_trace(const SemiParametricModel& base, const SmootherMatrix& target,
                      const Design& X, double sigma2) {
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale matching needs s2 > 0");
  SaddleSystem sys(base, X, sigma2);
  const auto& lambda = sys.projected_eigenvalues();
  const double m = static_cast<double>(sys.V().cols());
  const double t = target.trace();
  Eigen::Index rank = 0;
  double top = lambda.size() ? lambda.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) > 1e-12 * top) ++rank;
  if (!(t > m) || !(t < m + static_cast<double>(rank)))
    throw Error(ErrorCode::NotProportional, "target trace " + std::to_string(t) +
                                                " is outside the range of the scaled family");
  auto excess = [&](double alpha) { return m + gain_filter(lambda, alpha, sigma2).sum() - t; };
  return bisect_log(excess, 1e-12, 1e12, 1e-13 * std::max(1.0, t)).x;
}

double match_scale(const SemiParametricModel& base, const SmootherMatrix& target, const Design& X,
                   double sigma2, double tol) {
  double alpha = scale_by_trace(base, target, X, sigma2);
  SemiParametricModel scaled{base.kernel.scaled(alpha), base.basis};
  double dev = linalg::max_abs(spm_smoother(scaled, X, sigma2).matrix - target.matrix);
  if (dev > tol)
    throw Error(ErrorCode::NotProportional,
                "no scale reproduces the target smoother (deviation " + std::to_string(dev) + ")");
  return alpha;
}

double match_scale(const SemiParametricModel& a, const SemiParametricModel& b, const Design& X,
                   double sigma2, double tol) {
  return match_scale(a, spm_smoother(b, X, sigma2), X, sigma2, tol);
}

EquivalenceReport convergence_study(const ScaledKernelFamily& family, const Design& X,
                                    const Design& query, const std::vector<double>& eps_grid,
                                    const ConvergenceOptions& opts) {
  EquivalenceReport rep;
  rep.limit = equivalent_model(family, static_cast<int>(X.dim()));
  const bool interpolation = rep.limit.kind == LimitKind::Interpolation;
  SemiParametricModel target = opts.target ? *opts.target : rep.limit.model;
  const bool rescale = opts.target ? opts.match_scale : rep.limit.scale_free;
  const bool with_var = opts.compare_variance && !interpolation;

  std::vector<Eigen::VectorXd> ys = opts.responses;
  if (ys.empty()) {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    for (int k = 0; k < opts.data_vectors; ++k) {
      Eigen::VectorXd y(X.size());
      for (auto& v : y) v = normal(rng);
      ys.push_back(y);
    }
  }

  rep.rows.resize(eps_grid.size());
  parallel_for(static_cast<std::ptrdiff_t>(eps_grid.size()), [&](std::ptrdiff_t i) {
    ConvergenceRow& row = rep.rows[i];
    row.eps = eps_grid[i];
    try {
      Kernel k = family.at(row.eps);
      SmootherMatrix Mgp = gp_smoother(k, X, opts.sigma2);
      if (interpolation) {
        row.smoother_dev =
            linalg::max_abs(Mgp.matrix - Eigen::MatrixXd::Identity(X.size(), X.size()));
        return;
      }
      SemiParametricModel t = target;
      if (rescale) {
        row.scale = scale_by_trace(target, Mgp, X, opts.sigma2);
        t.kernel = target.kernel.scaled(row.scale);
      }
      SaddleSystem sys(t, X, opts.sigma2);
      row.smoother_dev = linalg::max_abs(Mgp.matrix - sys.smoother().matrix);
      Eigen::VectorXd target_var;
      if (with_var) target_var = sys.posterior_var(query);
      for (const auto& y : ys) {
        GpPosterior post = gp_posterior(k, X, y, opts.sigma2, query);
        SpmFit fit(sys, y);
        row.mean_dev = std::max(row.mean_dev, (post.mean - fit.mean(query)).cwiseAbs().maxCoeff());
        if (with_var)
          row.var_dev = std::max(row.var_dev, (post.var - target_var).cwiseAbs().maxCoeff());
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::IllConditioned && e.code() != ErrorCode::NegativeVariance) throw;
      row.ok = false;
      row.error = e.what();
    }
  });

  std::vector<double> eps, mean, var, smooth;
  for (const auto& row : rep.rows) {
    if (!row.ok) {
      rep.warnings.push_back("dropped eps=" + std::to_string(row.eps) + ": " + row.error);
      continue;
    }
    eps.push_back(row.eps);
    mean.push_back(row.mean_dev);
    var.push_back(row.var_dev);
    smooth.push_back(row.smoother_dev);
  }
  if (eps.size() < 3)
    throw Error(ErrorCode::InsufficientGrid,
                std::to_string(eps.size()) + " usable grid points, need at least 3");

  rep.smoother_slope = loglog_slope(eps, smooth);
  rep.pass = rep.smoother_slope >= opts.min_slope;
  if (!interpolation) {
    rep.mean_slope = loglog_slope(eps, mean);
    rep.pass = rep.pass && rep.mean_slope >= opts.min_slope;
    // The last usable row is the smallest eps when the grid is decreasing.
    size_t last = std::min_element(eps.begin(), eps.end()) - eps.begin();
    rep.pass = rep.pass && mean[last] <= opts.final_tol;
  }
  if (with_var) {
    rep.var_slope = loglog_slope(eps, var);
    rep.pass = rep.pass && rep.var_slope >= opts.min_slope;
  }
  return rep;
}

std::vector<CurvePoint> prediction_curve(const Kernel& kernel, const Design& X,
                                         const Eigen::VectorXd& y, double sigma2,
                                         const std::vector<double>& gamma_grid, Point xa, Point xb) {
  Design q = single_point(xa).with_point(xb);
  std::vector<CurvePoint> out(gamma_grid.size());
  parallel_for(static_cast<std::ptrdiff_t>(gamma_grid.size()), [&](std::ptrdiff_t i) {
    out[i].gamma = gamma_grid[i];
    try {
      GpPosterior post = gp_posterior(kernel.with_gain(gamma_grid[i]), X, y, sigma2, q);
      out[i].pred_a = post.mean(0);
      out[i].pred_b = post.mean(1);
    } catch (const Error& e) {
      out[i].ok = false;
      out[i].error = e.what();
    }
  });
  return out;
}

std::vector<AnchorPoint> polynomial_anchors(const Design& X, const Eigen::VectorXd& y,
                                            int max_degree, Point xa, Point xb) {
  Design q = single_point(xa).with_point(xb);
  const int d = static_cast<int>(X.dim());
  std::vector<AnchorPoint> out;
  for (int k = 0; k <= max_degree && count_poly_dim(k, d) <= X.size(); ++k) {
    Eigen::VectorXd m = fit_spm({Kernel::zero(), Basis::monomials(k)}, X, y, 1.0).mean(q);
    out.push_back({k, m(0), m(1)});
  }
  return out;
}

}  // namespace flatgp
