#pragma once

#include <vector>

#include <Eigen/Core>

#include "flatgp/design.hpp"

namespace flatgp {

// Exponent vector of a monomial x^alpha.
struct MultiIndex {
  std::vector<int> exponents;

  int degree() const;
  double factorial() const;  // alpha! = prod alpha_i!
  double eval(const double* x) const;
  bool operator==(const MultiIndex&) const = default;
};

// H_{k,d}: number of monomials of degree exactly k in d variables.
Eigen::Index count_monomials(int k, int d);

// P_{k,d}: dimension of polynomials of degree <= k in d variables. P_{-1,d} = 0.
Eigen::Index count_poly_dim(int k, int d);

// Monomials of degree exactly k, lexicographic with x_1 leading: (2,0), (1,1), (0,2).
std::vector<MultiIndex> monomials_of_degree(int k, int d);

// All monomials of degree <= k, graded by degree then lexicographic.
std::vector<MultiIndex> enumerate_monomials(int k, int d);

// Rows are points, columns the given monomials evaluated at map(x).
Eigen::MatrixXd eval_monomials(const Design& X, const std::vector<MultiIndex>& alphas,
                               const AffineMap& map);

// Vandermonde matrix V_{<=k} split into degree blocks, with a nested orthonormal basis.
//
// `assembled` and `blocks` hold raw monomial values. The orthonormal factor is
// computed from the rescaled points (see AffineMap), which spans the same nested
// subspaces span(V_{<=j}) for every j since the map preserves polynomial degree.
struct VandermondeBlocks {
  int max_degree = -1;
  std::vector<MultiIndex> alphas;
  std::vector<Eigen::Index> block_offset;  // column where degree j starts; size max_degree+2
  std::vector<Eigen::MatrixXd> blocks;     // V_j, n x H_{j,d}
  Eigen::MatrixXd assembled;               // V_{<=k}, n x P_{k,d}
  AffineMap map;
  Eigen::MatrixXd scaled;        // V_{<=k} at rescaled points
  Eigen::MatrixXd orthonormal;   // Q, n x min(n, P_{k,d}); prefix columns span prefix blocks
  Eigen::MatrixXd triangular;    // R with scaled = Q R when n >= P_{k,d}

  // Columns of Q spanning polynomials of degree < j (clipped to n).
  Eigen::MatrixXd orthonormal_below(int j) const;
};

VandermondeBlocks vandermonde(const Design& X, int k);

struct UnisolvencyResult {
  Eigen::Index rank = 0;
  Eigen::Index dimension = 0;
  double smallest_singular_value = 0.0;
  double largest_singular_value = 0.0;
  bool unisolvent() const { return rank == dimension; }
};

// Numerical rank of V_{<=k} with relative singular value cut-off tol.
UnisolvencyResult unisolvency_rank(const Design& X, int k, double tol = 1e-10);

}  // namespace flatgp
