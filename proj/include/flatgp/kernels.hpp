#pragma once

#include <climits>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "flatgp/design.hpp"
#include "flatgp/polybasis.hpp"

namespace flatgp {

enum class KernelFamily {
  Gaussian,      // gain * exp(-(eps t)^2)
  Exponential,   // gain * exp(-eps t)
  Matern,        // half-integer nu in {1/2, 3/2, 5/2, 7/2}, closed form in sqrt(2 nu) eps t
  Polyharmonic,  // gain * (-1)^r (eps t)^(2r-1), conditionally positive definite of order r
  Polynomial,    // gain * (x'y)^m
  Zero,
  Radial,        // user radial profile psi(eps t) with an optional Taylor series in |t|
  FiniteRank,    // gain * sum_ab C_ab x^a y^b over the monomials of one degree block
  Callable,      // arbitrary symmetric function of (x, y)
};

// Regularity r: kernel is (r-1) times differentiable in x and in y.
inline constexpr int kInfiniteRegularity = INT_MAX;

class Kernel {
 public:
  static Kernel gaussian(double epsilon = 1.0, double gain = 1.0);
  static Kernel exponential(double epsilon = 1.0, double gain = 1.0);
  static Kernel matern(double nu, double epsilon = 1.0, double gain = 1.0);
  static Kernel polyharmonic(int r, double gain = 1.0);
  static Kernel polynomial(int m, double gain = 1.0);
  static Kernel zero();
  // taylor[j] is the coefficient of |t|^j of psi at unit scale.
  static Kernel radial(std::function<double(double)> psi, std::vector<double> taylor = {},
                       std::optional<int> regularity = std::nullopt, double epsilon = 1.0,
                       double gain = 1.0);
  // Degree-m block kernel on R^d in raw coordinates; coefficients are H_{m,d} x H_{m,d}.
  static Kernel finite_rank(int m, int d, Eigen::MatrixXd coefficients, double gain = 1.0);
  static Kernel callable(std::function<double(Point, Point)> fn, std::string name = "callable");

  KernelFamily family() const { return family_; }
  double epsilon() const { return epsilon_; }
  double gain() const { return gain_; }
  double nu() const { return nu_; }
  int order() const { return order_; }
  bool is_radial() const;
  const Eigen::MatrixXd& coefficients() const { return coefficients_; }
  const std::vector<double>& taylor() const { return taylor_; }
  std::optional<int> declared_regularity() const { return declared_regularity_; }

  Kernel with_epsilon(double epsilon) const;
  Kernel with_gain(double gain) const;
  Kernel scaled(double factor) const { return with_gain(gain_ * factor); }

  // psi at unit scale and unit gain, for radial families.
  double profile(double t) const;
  double operator()(Point x, Point y) const;

  std::string describe() const;

 private:
  KernelFamily family_ = KernelFamily::Zero;
  double epsilon_ = 1.0;
  double gain_ = 1.0;
  double nu_ = 0.0;
  int order_ = 0;
  std::function<double(double)> psi_;
  std::function<double(Point, Point)> fn_;
  std::vector<double> taylor_;
  std::optional<int> declared_regularity_;
  Eigen::MatrixXd coefficients_;
  std::vector<MultiIndex> block_;
  std::string name_;
};

// Throws UnknownRegularity when it cannot be determined.
int regularity(const Kernel& kernel);

// Taylor coefficients of the unit-scale radial profile in powers of |t|, up to `order`.
// For finite regularity r the even coefficients below 2r-1 and the leading odd one
// f_{2r-1} are exact; asking beyond 2r-1 throws SeriesTruncation.
struct RadialSeries {
  std::vector<double> coefficients;
  int regularity = kInfiniteRegularity;

  int order() const { return static_cast<int>(coefficients.size()) - 1; }
  double operator[](int j) const {
    return j >= 0 && j < static_cast<int>(coefficients.size()) ? coefficients[j] : 0.0;
  }
  // f_{2r-1}; zero for smooth kernels.
  double leading_odd() const;
};

RadialSeries radial_series(const Kernel& kernel, int order);

Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const Design& X);
Eigen::MatrixXd cross_kernel_matrix(const Kernel& kernel, const Design& A, const Design& B);
// D_ij = |x_i - x_j|^q, with 0^0 = 1.
Eigen::MatrixXd distance_power_matrix(const Design& X, int q);

// Single-threaded reference implementations of the assemblies above.
namespace serial {
Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const Design& X);
Eigen::MatrixXd cross_kernel_matrix(const Kernel& kernel, const Design& A, const Design& B);
Eigen::MatrixXd distance_power_matrix(const Design& X, int q);
}  // namespace serial

// W[a, b] = d^a_x d^b_y k(0, 0) / (a! b!) over all monomials of degree <= k.
struct WronskianMatrix {
  int max_degree = 0;
  int dim = 1;
  std::vector<MultiIndex> alphas;
  std::vector<Eigen::Index> block_offset;
  Eigen::MatrixXd values;

  Eigen::MatrixXd block(int i, int j) const;
  // Leading principal part W_{<=j}.
  Eigen::MatrixXd upto(int j) const;
};

// Requires a radial kernel with k < regularity. Includes the gain and eps^{|a|+|b|}.
WronskianMatrix wronskian(const Kernel& kernel, int k, int d);

// Schur complement W_ll - W_{l,<l} W_{<l}^{-1} W_{<l,l} of the degree-l block.
// Throws SingularWronskianBlock when W_{<l} has condition number above 1e12.
Eigen::MatrixXd wronskian_schur(const WronskianMatrix& W, int l);

}  // namespace flatgp
