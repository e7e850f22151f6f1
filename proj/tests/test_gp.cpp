#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "flatgp/error.hpp"
#include "flatgp/gp.hpp"
#include "oracles.hpp"

using namespace flatgp;
using Catch::Approx;

namespace {

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("posterior against the explicit inverse", "[gp]") {
  for (unsigned s = 0; s < 5; ++s) {
    Design X = oracle::uniform_design(12, 2, s);
    Design Q = oracle::uniform_design(5, 2, 50 + s);
    Eigen::VectorXd y = oracle::normal_vector(12, s);
    Kernel k = Kernel::matern(2.5, 3.0, 1.7);
    auto post = gp_posterior(k, X, y, 0.05, Q);
    auto ref = oracle::gp_direct(oracle::gram(k, X, X), 0.05, y, oracle::gram(k, X, Q),
                                 oracle::gram(k, Q, Q).diagonal());
    CHECK(oracle::max_abs(post.mean - ref.mean) < 1e-10);
    CHECK(oracle::max_abs(post.var - ref.var) < 1e-10);

    // Same formula through the semi-parametric path with an empty basis.
    SemiParametricModel m{k, Basis::none()};
    CHECK(oracle::max_abs(spm_posterior_mean(m, X, y, 0.05, Q) - post.mean) < 1e-10);
    CHECK(oracle::max_abs(spm_posterior_var(m, X, 0.05, Q) - post.var) < 1e-10);
  }
}

TEST_CASE("posterior limits", "[gp]") {
  Design X = oracle::uniform_design(8, 1, 3);
  Eigen::VectorXd y = oracle::normal_vector(8, 4);
  Kernel k = Kernel::gaussian(2.0, 1.5);
  Design Q = oracle::grid_1d(0.0, 1.0, 5);
  auto vague = gp_posterior(k, X, y, 1e12, Q);
  CHECK(oracle::max_abs(vague.mean) < 1e-10);
  CHECK(oracle::max_abs(vague.var.array() - 1.5) < 1e-10);

  Design far = Design::from_vector(Eigen::VectorXd::Constant(1, 12.0));
  auto p = gp_posterior(k, X, y, 0.01, far);
  CHECK(std::abs(p.var(0) - 1.5) < 1e-8);

  Design one = Design::from_vector(Eigen::VectorXd::Constant(1, 0.3));
  Eigen::VectorXd y1 = Eigen::VectorXd::Constant(1, 0.8);
  double g = 2.0, s2 = 0.5;
  double expected = 0.5 * std::log(2 * std::numbers::pi * (g + s2)) + 0.8 * 0.8 / (2 * (g + s2));
  CHECK(nlml(Kernel::gaussian(1.0, g), one, y1, s2) == Approx(expected).epsilon(1e-14));
}

TEST_CASE("marginal likelihood", "[gp]") {
  Design X = oracle::uniform_design(10, 2, 5);
  Eigen::VectorXd y = oracle::normal_vector(10, 6);
  Kernel k = Kernel::gaussian(1.5);
  Eigen::MatrixXd C = oracle::gram(k, X, X) + 0.1 * Eigen::MatrixXd::Identity(10, 10);
  double ref = 0.5 * y.dot(C.fullPivLu().solve(y)) + 0.5 * std::log((2 * std::numbers::pi * C).determinant());
  CHECK(nlml(k, X, y, 0.1) == Approx(ref).epsilon(1e-10));

  // Joint permutation of the rows.
  PointMatrix P = X.points().colwise().reverse();
  CHECK(nlml(k, Design(P), y.reverse(), 0.1) == Approx(ref).epsilon(1e-12));

  // Diverges along a flat-limit path gamma = eps^-2.
  Design X1 = oracle::uniform_design(8, 1, 7);
  Eigen::VectorXd y1 = oracle::normal_vector(8, 7);
  double prev = -1e300;
  for (double e : {0.8, 0.4, 0.2, 0.1, 0.05}) {
    double v = nlml(Kernel::gaussian(e, 1.0 / (e * e)), X1, y1, 0.01);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("smoother and degrees of freedom", "[gp]") {
  Design X = oracle::uniform_design(9, 1, 8);
  Kernel k = Kernel::gaussian(3.0);
  Eigen::MatrixXd K = oracle::gram(k, X, X);
  for (double gamma : {1e-3, 1.0, 1e3}) {
    double s2 = 0.01;
    SmootherMatrix M = gp_smoother(k.with_gain(gamma), X, s2);
    Eigen::MatrixXd ref = K * (K + (s2 / gamma) * Eigen::MatrixXd::Identity(9, 9)).inverse();
    CHECK(oracle::max_abs(M.matrix - ref) < 1e-8);
    Eigen::VectorXd lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K).eigenvalues();
    double tr = (lam.array() / (lam.array() + s2 / gamma)).sum();
    CHECK(dof(M) == Approx(tr).epsilon(1e-8));
  }
  CHECK(dof(gp_smoother(k.with_gain(1e12), X, 1e-6)) == Approx(9.0).epsilon(1e-6));
  CHECK(dof(gp_smoother(k.with_gain(1e-12), X, 1.0)) < 1e-10);
  SmootherMatrix I{Eigen::MatrixXd::Identity(4, 4), {}};
  CHECK(dof(I) == 4.0);

  // dof grows with the gain and with the nugget removed.
  KernelSpectrum spec(k, X);
  double prev = 0.0;
  for (double g : {1e-2, 1e-1, 1.0, 10.0, 100.0}) {
    double d = spec.dof(g, 0.01);
    CHECK(d > prev);
    CHECK(spec.dof(g, 0.01, 1e-3) < d);
    prev = d;
  }
}

TEST_CASE("nugget matches an explicit diagonal shift", "[gp]") {
  Design X = oracle::uniform_design(8, 1, 9);
  Eigen::VectorXd y = oracle::normal_vector(8, 9);
  Kernel k = Kernel::gaussian(0.5, 40.0);
  double nu = 1e-3, s2 = 0.01;
  Eigen::MatrixXd K = oracle::gram(k, X, X);
  auto ref = oracle::gp_direct(K, s2 + 40.0 * nu, y, K, K.diagonal());
  CHECK(oracle::max_abs(gp_posterior(k, X, y, s2, X, nu).mean - ref.mean) < 1e-8);
  SmootherMatrix M = gp_smoother(k, X, s2, nu);
  CHECK(oracle::max_abs(M.matrix * y - ref.mean) < 1e-8);
  // Plateau: the gain cannot push dof past sum l / (l + nu).
  KernelSpectrum spec(k.with_gain(1.0), X);
  Eigen::VectorXd lam = spec.eigenvalues().cwiseMax(0.0);
  double cap = (lam.array() / (lam.array() + nu)).sum();
  CHECK(spec.dof(1e14, s2, nu) == Approx(cap).epsilon(1e-9));
}

TEST_CASE("fast leave-one-out matches explicit refits", "[gp]") {
  for (unsigned s = 0; s < 20; ++s) {
    Design X = oracle::uniform_design(10, 1 + s % 2, 300 + s);
    Eigen::VectorXd y = oracle::normal_vector(10, 400 + s);
    Kernel k = Kernel::gaussian(1.0 + s % 3, 0.5 + s % 4);
    double s2 = 0.02 * (1 + s % 5);
    SmootherMatrix M = gp_smoother(k, X, s2);
    auto [mse, nll] = oracle::loo_refit(oracle::gram(k, X, X), s2, y);
    CHECK(loo_mse(M, y) == Approx(mse).epsilon(1e-8));
    CHECK(loo_nll(M, y, s2) == Approx(nll).epsilon(1e-8));
  }
}

TEST_CASE("criteria edge cases", "[gp]") {
  Eigen::VectorXd y = oracle::normal_vector(6, 1);
  SmootherMatrix zero{Eigen::MatrixXd::Zero(6, 6), {}};
  SmootherMatrix id{Eigen::MatrixXd::Identity(6, 6), {}};
  CHECK(loo_mse(zero, y) == Approx(y.squaredNorm() / 6));
  CHECK(sure(zero, y, 0.3) == Approx(-0.3 + y.squaredNorm() / 6));
  CHECK(sure(id, y, 0.3) == Approx(0.3));
  CHECK(error_of([&] { loo_mse(id, y); }) == ErrorCode::InterpolatingSmoother);
  CHECK(error_of([&] { loo_nll(zero, y, 0.0); }) == ErrorCode::DegenerateVariance);

  // Scaling noise by c and data by sqrt(c) shifts LOO-NLL by log(c) / 2.
  Design X = oracle::uniform_design(7, 1, 2);
  Eigen::VectorXd y7 = oracle::normal_vector(7, 2);
  Kernel k = Kernel::gaussian(2.0);
  for (double c : {0.1, 4.0}) {
    SmootherMatrix M = gp_smoother(k.with_gain(c), X, 0.05 * c);
    double base = loo_nll(gp_smoother(k, X, 0.05), y7, 0.05);
    CHECK(loo_nll(M, std::sqrt(c) * y7, 0.05 * c) == Approx(base + 0.5 * std::log(c)).epsilon(1e-10));
  }
}

TEST_CASE("ill-conditioned factorisation is reported", "[gp]") {
  Design X = oracle::grid_1d(0.0, 1.0, 20);
  Eigen::VectorXd y = oracle::normal_vector(20, 3);
  Kernel k = Kernel::gaussian(0.01, 1e20);
  try {
    gp_posterior(k, X, y, 1e-12, X);
    FAIL("expected IllConditioned");
  } catch (const IllConditionedError& e) {
    CHECK(e.code() == ErrorCode::IllConditioned);
  }
}
