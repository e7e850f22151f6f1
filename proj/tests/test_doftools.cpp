#include <catch2/catch_amalgamated.hpp>

#include "flatgp/doftools.hpp"
#include "flatgp/error.hpp"
#include "flatgp/flatlimit.hpp"
#include "flatgp/numerics.hpp"
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
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("numeric helpers", "[doftools]") {
  auto g = logspace(1e-2, 1e2, 5);
  REQUIRE(g.size() == 5);
  CHECK(g[0] == Approx(1e-2));
  CHECK(g[2] == Approx(1.0));
  CHECK(g[4] == Approx(1e2));
  CHECK(parse_log_grid("0.1:10:3") == logspace(0.1, 10, 3));
  CHECK_THROWS_AS(parse_log_grid("1:2"), Error);
  CHECK(loglog_slope({1, 2, 4}, {3, 12, 48}) == Approx(2.0));
  auto root = bisect_log([](double x) { return std::log(x) - 1.0; }, 1e-3, 1e3, 1e-14);
  CHECK(root.x == Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("isofreedom solve", "[doftools]") {
  // One point: gamma = s2 m / (lambda (1 - m)).
  Design one = Design::from_vector(Eigen::VectorXd::Constant(1, 0.4));
  double s2 = 0.3, m = 0.7;
  auto pt = isofreedom_gamma(Kernel::gaussian(), one, s2, m);
  // The solve stops at a dof residual of 1e-10, worth 1e-10 / (m (1 - m)) relative in gamma.
  CHECK(pt.residual <= 1e-10);
  CHECK(pt.gamma == Approx(s2 * m / (1.0 * (1 - m))).epsilon(1e-10 / (m * (1 - m))));

  for (unsigned s = 0; s < 10; ++s) {
    Design X = oracle::uniform_design(9, 1 + s % 2, 500 + s);
    Kernel k = s % 3 ? Kernel::gaussian(0.5 + s) : Kernel::matern(1.5, 2.0);
    double target = 1.0 + 0.7 * s;
    auto p = isofreedom_gamma(k, X, 0.01, target);
    CHECK(p.residual <= 1e-10 * 9);
    CHECK(KernelSpectrum(k, X).dof(p.gamma, 0.01) == Approx(target).margin(1e-8));
  }

  Design X = oracle::uniform_design(6, 1, 2);
  CHECK(error_of([&] { isofreedom_gamma(Kernel::gaussian(2.0), X, 0.01, 6.0); }) == ErrorCode::UnreachableDof);
  CHECK(error_of([&] { isofreedom_gamma(Kernel::gaussian(2.0), X, 0.01, 0.0); }) == ErrorCode::UnreachableDof);
  auto near = isofreedom_gamma(Kernel::gaussian(2.0), X, 0.01, 6.0 - 1e-6);
  CHECK(near.gamma > 1e3);
}

TEST_CASE("isofreedom curves have integer slopes", "[doftools]") {
  Design X = oracle::uniform_design(8, 1, 60);
  auto eps = logspace(0.4, 0.05, 8);
  for (double m : {1.5, 2.5, 3.5}) {
    auto c = isofreedom_curve(Kernel::gaussian(), X, 0.01, m, eps);
    int l = static_cast<int>(m);
    INFO("m = " << m << " slope " << c.slope);
    CHECK(std::abs(c.slope + 2 * l) <= 0.15);
    for (const auto& p : c.points) CHECK(p.dof == Approx(m).margin(1e-8));
    auto s = serial::isofreedom_curve(Kernel::gaussian(), X, 0.01, m, eps);
    for (size_t i = 0; i < eps.size(); ++i) CHECK(s.points[i].gamma == c.points[i].gamma);
  }
  auto e = isofreedom_curve(Kernel::exponential(), X, 0.01, 2.5, logspace(0.1, 0.005, 8));
  CHECK(std::abs(e.slope - std::round(e.slope)) <= 0.15);
}

TEST_CASE("spline degrees of freedom", "[doftools]") {
  Design X = oracle::uniform_design(12, 1, 61);
  for (int p = 1; p <= 3; ++p)
    for (double eta : {1e-3, 0.1, 10.0}) {
      SpmFit fit = smoothing_spline_fit(X.points().col(0), Eigen::VectorXd::Zero(12), p, eta);
      double tr = fit.system().smoother().trace();
      CHECK(spline_dof(X, p, eta) == Approx(tr).epsilon(1e-8));
      // Independent oracle: explicit smoother through the bordered solve.
      Eigen::MatrixXd D = distance_power_matrix(X, 2 * p - 1) * (p % 2 ? -1.0 : 1.0);
      Eigen::MatrixXd M = oracle::bordered_smoother(D, oracle::powers(X.points().col(0), p - 1), eta);
      CHECK(spline_dof(X, p, eta) == Approx(M.trace()).epsilon(1e-8));
    }
}

TEST_CASE("matched approximation", "[doftools]") {
  Design X = oracle::uniform_design(10, 1, 62);

  // Source with exactly 5 dof maps to a degree-4 polynomial.
  Kernel g = Kernel::gaussian(0.3);
  auto pt = isofreedom_gamma(g, X, 0.01, 5.0);
  Kernel at5 = g.with_gain(pt.gamma);
  auto ma = matched_approximation(at5, X, 0.01);
  CHECK(ma.kind == "polynomial");
  CHECK(ma.target.basis.max_degree() == 4);
  CHECK(ma.target.kernel.family() == KernelFamily::Zero);

  auto frac = matched_approximation(Kernel::gaussian(0.3, 5.0), X, 0.01);
  CHECK(frac.kind == "penalized_polynomial");
  CHECK(frac.achieved_dof == Approx(frac.source_dof).margin(1e-6));
  CHECK(frac.target.basis.max_degree() == static_cast<int>(frac.source_dof) - 1);

  for (double gain : {0.1, 1.0, 10.0, 100.0}) {
    auto mm = matched_approximation(Kernel::matern(1.5, 2.0, gain), X, 0.01);
    INFO("gain " << gain << " dof " << mm.source_dof);
    if (mm.source_dof > 2.0) CHECK(mm.kind == "spline");
    CHECK(mm.achieved_dof == Approx(mm.source_dof).margin(1e-6));
    CHECK(spm_smoother(mm.target, X, 0.01).trace() == Approx(mm.source_dof).margin(1e-6));
  }

  CHECK(error_of([&] { matched_approximation(Kernel::gaussian(3.0, 1e12), X, 1e-8); }) ==
        ErrorCode::UnreachableDof);
}

TEST_CASE("matched approximation becomes exact along the isofreedom curve", "[doftools]") {
  Design X = oracle::uniform_design(10, 1, 63);
  Design Q = oracle::grid_1d(0.0, 1.0, 15);
  Eigen::VectorXd y = oracle::normal_vector(10, 63);
  std::vector<double> devs;
  for (double e : {0.4, 0.2, 0.1}) {
    auto pt = isofreedom_gamma(Kernel::gaussian(e), X, 0.01, 3.5);
    Kernel k = Kernel::gaussian(e, pt.gamma);
    auto ma = matched_approximation(k, X, 0.01);
    Eigen::VectorXd a = gp_posterior(k, X, y, 0.01, Q).mean;
    Eigen::VectorXd b = fit_spm(ma.target, X, y, 0.01).mean(Q);
    devs.push_back(oracle::max_abs(a - b));
  }
  INFO(devs[0] << " " << devs[1] << " " << devs[2]);
  CHECK(devs[1] < devs[0]);
  CHECK(devs[2] < devs[1]);
}

TEST_CASE("grid evaluation", "[doftools]") {
  Design X = oracle::uniform_design(8, 1, 64);
  Eigen::VectorXd y = oracle::normal_vector(8, 64);
  auto eps = logspace(0.05, 5.0, 6);
  auto gam = logspace(1e-3, 1e5, 7);
  auto cells = evaluate_grid(Kernel::gaussian(), X, y, 0.01, eps, gam);
  REQUIRE(cells.size() == 42);
  for (size_t i = 0; i < eps.size(); ++i)
    for (size_t j = 0; j < gam.size(); ++j) {
      const auto& c = cells[i * gam.size() + j];
      CHECK(c.eps == eps[i]);
      CHECK(c.gamma == gam[j]);
      REQUIRE(c.ok);
      Kernel k = Kernel::gaussian(eps[i], gam[j]);
      SmootherMatrix M = gp_smoother(k, X, 0.01);
      CHECK(c.dof == Approx(dof(M)).epsilon(1e-12));
      CHECK(c.criteria.sure == Approx(sure(M, y, 0.01)).epsilon(1e-10));
      if (j) CHECK(c.dof > cells[i * gam.size() + j - 1].dof);
    }
  auto ref = serial::evaluate_grid(Kernel::gaussian(), X, y, 0.01, eps, gam);
  for (size_t i = 0; i < cells.size(); ++i) {
    CHECK(ref[i].dof == cells[i].dof);
    CHECK(ref[i].criteria.loo_nll == cells[i].criteria.loo_nll);
  }
}
