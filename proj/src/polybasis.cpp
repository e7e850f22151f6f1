#include "flatgp/polybasis.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include "flatgp/error.hpp"

namespace flatgp {

namespace {

Eigen::Index binomial(Eigen::Index n, Eigen::Index k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  Eigen::Index c = 1;
  for (Eigen::Index i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

void append_degree(int k, int d, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
  if (d == 1) {
    prefix.push_back(k);
    out.push_back({prefix});
    prefix.pop_back();
    return;
  }
  for (int a = k; a >= 0; --a) {
    prefix.push_back(a);
    append_degree(k - a, d - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

int MultiIndex::degree() const {
  int s = 0;
  for (int a : exponents) s += a;
  return s;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int a : exponents)
    for (int i = 2; i <= a; ++i) f *= i;
  return f;
}

double MultiIndex::eval(const double* x) const {
  double v = 1.0;
  for (size_t i = 0; i < exponents.size(); ++i)
    for (int p = 0; p < exponents[i]; ++p) v *= x[i];
  return v;
}

Eigen::Index count_monomials(int k, int d) {
  if (k < 0) return 0;
  return binomial(k + d - 1, d - 1);
}

Eigen::Index count_poly_dim(int k, int d) {
  if (k < 0) return 0;
  return binomial(k + d, d);
}

std::vector<MultiIndex> monomials_of_degree(int k, int d) {
  std::vector<MultiIndex> out;
  if (k < 0 || d < 1) return out;
  std::vector<int> prefix;
  append_degree(k, d, prefix, out);
  return out;
}

std::vector<MultiIndex> enumerate_monomials(int k, int d) {
  std::vector<MultiIndex> out;
  for (int j = 0; j <= k; ++j) {
    auto block = monomials_of_degree(j, d);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

Eigen::MatrixXd eval_monomials(const Design& X, const std::vector<MultiIndex>& alphas,
                               const AffineMap& map) {
  Eigen::MatrixXd V(X.size(), static_cast<Eigen::Index>(alphas.size()));
  std::vector<double> y(X.dim());
  for (Eigen::Index i = 0; i < X.size(); ++i) {
    map.apply(X.point(i), y.data());
    for (size_t j = 0; j < alphas.size(); ++j) V(i, j) = alphas[j].eval(y.data());
  }
  return V;
}

Eigen::MatrixXd VandermondeBlocks::orthonormal_below(int j) const {
  Eigen::Index cols = std::min(count_poly_dim(j - 1, static_cast<int>(map.center.size())),
                               orthonormal.cols());
  return orthonormal.leftCols(cols);
}

VandermondeBlocks vandermonde(const Design& X, int k) {
  const int d = static_cast<int>(X.dim());
  const Eigen::Index n = X.size();
  VandermondeBlocks vb;
  vb.max_degree = k;
  vb.alphas = enumerate_monomials(k, d);
  vb.map = AffineMap::bounding(X);
  vb.assembled = eval_monomials(X, vb.alphas, AffineMap::identity(d));
  vb.scaled = eval_monomials(X, vb.alphas, vb.map);
  for (int j = 0; j <= k + 1; ++j) vb.block_offset.push_back(count_poly_dim(j - 1, d));
  for (int j = 0; j <= k; ++j)
    vb.blocks.push_back(vb.assembled.middleCols(vb.block_offset[j], count_monomials(j, d)));

  const Eigen::Index P = vb.scaled.cols();
  const Eigen::Index cols = std::min(n, P);
  if (P == 0 || n == 0) {
    vb.orthonormal = Eigen::MatrixXd(n, 0);
    vb.triangular = Eigen::MatrixXd(0, 0);
    return vb;
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(vb.scaled);
  vb.orthonormal = qr.householderQ() * Eigen::MatrixXd::Identity(n, cols);
  vb.triangular = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  return vb;
}

UnisolvencyResult unisolvency_rank(const Design& X, int k, double tol) {
  const int d = static_cast<int>(X.dim());
  UnisolvencyResult res;
  res.dimension = count_poly_dim(k, d);
  if (res.dimension == 0) return res;
  Eigen::MatrixXd V = eval_monomials(X, enumerate_monomials(k, d), AffineMap::bounding(X));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(V);
  const auto& s = svd.singularValues();
  res.largest_singular_value = s(0);
  res.smallest_singular_value = s.size() == res.dimension ? s(s.size() - 1) : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++res.rank;
  return res;
}

}  // namespace flatgp
