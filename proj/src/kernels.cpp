#include "flatgp/kernels.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "flatgp/error.hpp"
#include "flatgp/parallel.hpp"

namespace flatgp {

namespace {

double distance(Point x, Point y) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double t = x[i] - y[i];
    s += t * t;
  }
  return std::sqrt(s);
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double double_factorial(int n) {
  double f = 1.0;
  for (int i = n; i > 1; i -= 2) f *= i;
  return f;
}

// Polynomial prefactor of the half-integer Matern profile in s = sqrt(2 nu) t.
std::vector<double> matern_prefactor(double nu) {
  if (nu == 0.5) return {1.0};
  if (nu == 1.5) return {1.0, 1.0};
  if (nu == 2.5) return {1.0, 1.0, 1.0 / 3.0};
  if (nu == 3.5) return {1.0, 1.0, 2.0 / 5.0, 1.0 / 15.0};
  throw Error(ErrorCode::InvalidArgument, "Matern nu must be one of 0.5, 1.5, 2.5, 3.5");
}

double ipow(double x, int p) {
  double v = 1.0;
  for (int i = 0; i < p; ++i) v *= x;
  return v;
}

}  // namespace

Kernel Kernel::gaussian(double epsilon, double gain) {
  Kernel k;
  k.family_ = KernelFamily::Gaussian;
  k.epsilon_ = epsilon;
  k.gain_ = gain;
  return k;
}

Kernel Kernel::exponential(double epsilon, double gain) {
  Kernel k;
  k.family_ = KernelFamily::Exponential;
  k.epsilon_ = epsilon;
  k.gain_ = gain;
  return k;
}

Kernel Kernel::matern(double nu, double epsilon, double gain) {
  matern_prefactor(nu);
  Kernel k;
  k.family_ = KernelFamily::Matern;
  k.nu_ = nu;
  k.epsilon_ = epsilon;
  k.gain_ = gain;
  return k;
}

Kernel Kernel::polyharmonic(int r, double gain) {
  if (r < 1) throw Error(ErrorCode::InvalidArgument, "polyharmonic order must be >= 1");
  Kernel k;
  k.family_ = KernelFamily::Polyharmonic;
  k.order_ = r;
  k.gain_ = gain;
  return k;
}

Kernel Kernel::polynomial(int m, double gain) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "polynomial kernel degree must be >= 0");
  Kernel k;
  k.family_ = KernelFamily::Polynomial;
  k.order_ = m;
  k.gain_ = gain;
  return k;
}

Kernel Kernel::zero() { return Kernel(); }

Kernel Kernel::radial(std::function<double(double)> psi, std::vector<double> taylor,
                      std::optional<int> regularity, double epsilon, double gain) {
  Kernel k;
  k.family_ = KernelFamily::Radial;
  k.psi_ = std::move(psi);
  k.taylor_ = std::move(taylor);
  k.declared_regularity_ = regularity;
  k.epsilon_ = epsilon;
  k.gain_ = gain;
  return k;
}

Kernel Kernel::finite_rank(int m, int d, Eigen::MatrixXd coefficients, double gain) {
  Kernel k;
  k.family_ = KernelFamily::FiniteRank;
  k.order_ = m;
  k.block_ = monomials_of_degree(m, d);
  auto h = static_cast<Eigen::Index>(k.block_.size());
  if (coefficients.rows() != h || coefficients.cols() != h)
    throw Error(ErrorCode::InvalidArgument, "finite-rank coefficients must be H_{m,d} square");
  k.coefficients_ = std::move(coefficients);
  k.gain_ = gain;
  return k;
}

Kernel Kernel::callable(std::function<double(Point, Point)> fn, std::string name) {
  Kernel k;
  k.family_ = KernelFamily::Callable;
  k.fn_ = std::move(fn);
  k.name_ = std::move(name);
  return k;
}

bool Kernel::is_radial() const {
  switch (family_) {
    case KernelFamily::Gaussian:
    case KernelFamily::Exponential:
    case KernelFamily::Matern:
    case KernelFamily::Polyharmonic:
    case KernelFamily::Radial:
      return true;
    default:
      return false;
  }
}

Kernel Kernel::with_epsilon(double epsilon) const {
  Kernel k = *this;
  k.epsilon_ = epsilon;
  return k;
}

Kernel Kernel::with_gain(double gain) const {
  Kernel k = *this;
  k.gain_ = gain;
  return k;
}

double Kernel::profile(double t) const {
  switch (family_) {
    case KernelFamily::Gaussian:
      return std::exp(-t * t);
    case KernelFamily::Exponential:
      return std::exp(-t);
    case KernelFamily::Matern: {
      double s = std::sqrt(2.0 * nu_) * t;
      auto c = matern_prefactor(nu_);
      double p = 0.0;
      for (size_t i = c.size(); i-- > 0;) p = p * s + c[i];
      return p * std::exp(-s);
    }
    case KernelFamily::Polyharmonic:
      return (order_ % 2 ? -1.0 : 1.0) * ipow(t, 2 * order_ - 1);
    case KernelFamily::Radial:
      return psi_(t);
    default:
      throw Error(ErrorCode::InvalidArgument, "profile() needs a radial kernel");
  }
}

double Kernel::operator()(Point x, Point y) const {
  switch (family_) {
    case KernelFamily::Zero:
      return 0.0;
    case KernelFamily::Polynomial: {
      double s = 0.0;
      for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
      return gain_ * ipow(s, order_);
    }
    case KernelFamily::FiniteRank: {
      const auto h = static_cast<Eigen::Index>(block_.size());
      Eigen::VectorXd vx(h), vy(h);
      for (Eigen::Index a = 0; a < h; ++a) {
        vx(a) = block_[a].eval(x.data());
        vy(a) = block_[a].eval(y.data());
      }
      return gain_ * vx.dot(coefficients_ * vy);
    }
    case KernelFamily::Callable:
      return gain_ * fn_(x, y);
    default:
      return gain_ * profile(epsilon_ * distance(x, y));
  }
}

std::string Kernel::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (family_) {
    case KernelFamily::Gaussian: os << "gaussian(eps=" << epsilon_; break;
    case KernelFamily::Exponential: os << "exponential(eps=" << epsilon_; break;
    case KernelFamily::Matern: os << "matern(nu=" << nu_ << ", eps=" << epsilon_; break;
    case KernelFamily::Polyharmonic: os << "polyharmonic(r=" << order_; break;
    case KernelFamily::Polynomial: os << "polynomial(m=" << order_; break;
    case KernelFamily::Zero: return "zero";
    case KernelFamily::Radial: os << "radial(eps=" << epsilon_; break;
    case KernelFamily::FiniteRank: os << "finite_rank(m=" << order_; break;
    case KernelFamily::Callable: os << name_ << "("; break;
  }
  os << ", gain=" << gain_ << ")";
  return os.str();
}

int regularity(const Kernel& kernel) {
  switch (kernel.family()) {
    case KernelFamily::Gaussian:
    case KernelFamily::Polynomial:
    case KernelFamily::FiniteRank:
    case KernelFamily::Zero:
      return kInfiniteRegularity;
    case KernelFamily::Exponential:
      return 1;
    case KernelFamily::Matern:
      return static_cast<int>(kernel.nu() + 0.5);
    case KernelFamily::Polyharmonic:
      return kernel.order();
    case KernelFamily::Radial: {
      if (kernel.declared_regularity()) return *kernel.declared_regularity();
      const auto& c = kernel.taylor();
      double scale = 0.0;
      for (double v : c) scale = std::max(scale, std::abs(v));
      for (size_t j = 1; j < c.size(); j += 2)
        if (std::abs(c[j]) > 1e-14 * scale) return static_cast<int>(j + 1) / 2;
      throw Error(ErrorCode::UnknownRegularity,
                  "radial kernel has no declared regularity and no odd term in its series");
    }
    case KernelFamily::Callable:
      throw Error(ErrorCode::UnknownRegularity, "callable kernels carry no regularity");
  }
  throw Error(ErrorCode::UnknownRegularity, "unhandled kernel family");
}

double RadialSeries::leading_odd() const {
  if (regularity == kInfiniteRegularity) return 0.0;
  return (*this)[2 * regularity - 1];
}

RadialSeries radial_series(const Kernel& kernel, int order) {
  if (!kernel.is_radial())
    throw Error(ErrorCode::InvalidArgument, "radial_series needs a radial kernel");
  RadialSeries s;
  s.regularity = regularity(kernel);
  if (s.regularity != kInfiniteRegularity && order > 2 * s.regularity - 1)
    throw Error(ErrorCode::SeriesTruncation,
                "order " + std::to_string(order) + " exceeds 2r-1 = " +
                    std::to_string(2 * s.regularity - 1));
  s.coefficients.assign(order + 1, 0.0);
  switch (kernel.family()) {
    case KernelFamily::Gaussian:
      for (int j = 0; 2 * j <= order; ++j) s.coefficients[2 * j] = (j % 2 ? -1.0 : 1.0) / factorial(j);
      break;
    case KernelFamily::Exponential:
      for (int j = 0; j <= order; ++j) s.coefficients[j] = (j % 2 ? -1.0 : 1.0) / factorial(j);
      break;
    case KernelFamily::Matern: {
      auto p = matern_prefactor(kernel.nu());
      double c = std::sqrt(2.0 * kernel.nu());
      for (int j = 0; j <= order; ++j) {
        double v = 0.0;
        for (int i = 0; i <= j && i < static_cast<int>(p.size()); ++i)
          v += p[i] * ((j - i) % 2 ? -1.0 : 1.0) / factorial(j - i);
        s.coefficients[j] = v * ipow(c, j);
      }
      break;
    }
    case KernelFamily::Polyharmonic: {
      int r = kernel.order();
      if (2 * r - 1 <= order) s.coefficients[2 * r - 1] = r % 2 ? -1.0 : 1.0;
      break;
    }
    case KernelFamily::Radial: {
      const auto& t = kernel.taylor();
      if (order >= static_cast<int>(t.size()))
        throw Error(ErrorCode::SeriesTruncation, "radial kernel series is shorter than requested");
      std::copy(t.begin(), t.begin() + order + 1, s.coefficients.begin());
      break;
    }
    default:
      break;
  }
  return s;
}

Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const Design& X) {
  const Eigen::Index n = X.size();
  Eigen::MatrixXd K(n, n);
  parallel_for(n, [&](std::ptrdiff_t i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double v = kernel(X.point(i), X.point(j));
      K(i, j) = v;
      K(j, i) = v;
    }
  });
  return K;
}

Eigen::MatrixXd cross_kernel_matrix(const Kernel& kernel, const Design& A, const Design& B) {
  Eigen::MatrixXd K(A.size(), B.size());
  parallel_for(A.size(), [&](std::ptrdiff_t i) {
    for (Eigen::Index j = 0; j < B.size(); ++j) K(i, j) = kernel(A.point(i), B.point(j));
  });
  return K;
}

Eigen::MatrixXd distance_power_matrix(const Design& X, int q) {
  const Eigen::Index n = X.size();
  Eigen::MatrixXd D(n, n);
  parallel_for(n, [&](std::ptrdiff_t i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double v = ipow(distance(X.point(i), X.point(j)), q);
      D(i, j) = v;
      D(j, i) = v;
    }
  });
  return D;
}

namespace serial {

Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const Design& X) {
  const Eigen::Index n = X.size();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) K(i, j) = K(j, i) = kernel(X.point(i), X.point(j));
  return K;
}

Eigen::MatrixXd cross_kernel_matrix(const Kernel& kernel, const Design& A, const Design& B) {
  Eigen::MatrixXd K(A.size(), B.size());
  for (Eigen::Index i = 0; i < A.size(); ++i)
    for (Eigen::Index j = 0; j < B.size(); ++j) K(i, j) = kernel(A.point(i), B.point(j));
  return K;
}

Eigen::MatrixXd distance_power_matrix(const Design& X, int q) {
  const Eigen::Index n = X.size();
  Eigen::MatrixXd D(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) D(i, j) = D(j, i) = ipow(distance(X.point(i), X.point(j)), q);
  return D;
}

}  // namespace serial

Eigen::MatrixXd WronskianMatrix::block(int i, int j) const {
  return values.block(block_offset[i], block_offset[j], block_offset[i + 1] - block_offset[i],
                      block_offset[j + 1] - block_offset[j]);
}

Eigen::MatrixXd WronskianMatrix::upto(int j) const {
  Eigen::Index m = block_offset[j + 1];
  return values.topLeftCorner(m, m);
}

WronskianMatrix wronskian(const Kernel& kernel, int k, int d) {
  if (!kernel.is_radial()) throw Error(ErrorCode::InvalidArgument, "wronskian needs a radial kernel");
  const int r = regularity(kernel);
  if (r != kInfiniteRegularity && k >= r)
    throw Error(ErrorCode::SeriesTruncation, "wronskian order must be below the regularity");

  WronskianMatrix W;
  W.max_degree = k;
  W.dim = d;
  W.alphas = enumerate_monomials(k, d);
  for (int j = 0; j <= k + 1; ++j) W.block_offset.push_back(count_poly_dim(j - 1, d));
  const auto P = static_cast<Eigen::Index>(W.alphas.size());
  W.values = Eigen::MatrixXd::Zero(P, P);

  const bool gaussian = kernel.family() == KernelFamily::Gaussian;
  RadialSeries series;
  if (!gaussian) series = radial_series(kernel, 2 * k);

  for (Eigen::Index a = 0; a < P; ++a) {
    for (Eigen::Index b = 0; b < P; ++b) {
      const auto& al = W.alphas[a].exponents;
      const auto& be = W.alphas[b].exponents;
      bool even = true;
      int total = 0;
      for (int i = 0; i < d; ++i) {
        even = even && (al[i] + be[i]) % 2 == 0;
        total += al[i] + be[i];
      }
      if (!even) continue;
      double v = 1.0;
      if (gaussian) {
        // Product of one-dimensional Gaussian derivatives at the origin.
        for (int i = 0; i < d; ++i) {
          int s = al[i] + be[i];
          v *= double_factorial(s - 1) * ipow(-2.0, s / 2) * (be[i] % 2 ? -1.0 : 1.0) /
               (factorial(al[i]) * factorial(be[i]));
        }
      } else {
        // Coefficient of x^a y^b in f_{2j} (sum_i (x_i - y_i)^2)^j.
        int j = total / 2;
        v = series[2 * j] * factorial(j);
        for (int i = 0; i < d; ++i) {
          int s = al[i] + be[i];
          v *= factorial(s) / (factorial(al[i]) * factorial(be[i])) / factorial(s / 2);
          if (be[i] % 2) v = -v;
        }
      }
      W.values(a, b) = kernel.gain() * ipow(kernel.epsilon(), total) * v;
    }
  }
  return W;
}

Eigen::MatrixXd wronskian_schur(const WronskianMatrix& W, int l) {
  if (l < 0 || l > W.max_degree) throw Error(ErrorCode::InvalidArgument, "Schur block out of range");
  Eigen::MatrixXd Wll = W.block(l, l);
  if (l == 0) return Wll;
  Eigen::MatrixXd lower = W.upto(l - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lower, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().cwiseAbs().minCoeff();
  double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12)
    throw Error(ErrorCode::SingularWronskianBlock,
                "W_{<" + std::to_string(l) + "} has condition number " + std::to_string(hi / lo));
  Eigen::Index lo_off = W.block_offset[l];
  Eigen::Index h = W.block_offset[l + 1] - lo_off;
  Eigen::MatrixXd upper = W.values.block(0, lo_off, lo_off, h);
  Eigen::MatrixXd left = W.values.block(lo_off, 0, h, lo_off);
  Eigen::MatrixXd S = Wll - left * lower.ldlt().solve(upper);
  return 0.5 * (S + S.transpose());
}

}  // namespace flatgp
