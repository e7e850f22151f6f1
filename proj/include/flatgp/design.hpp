#pragma once

#include <span>

#include <Eigen/Core>

namespace flatgp {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Point = std::span<const double>;

// n points in R^d, stored one per row.
class Design {
 public:
  Design() = default;
  explicit Design(PointMatrix points);

  // Univariate convenience constructor.
  static Design from_vector(const Eigen::VectorXd& x);

  Eigen::Index size() const { return points_.rows(); }
  Eigen::Index dim() const { return points_.cols(); }
  Point point(Eigen::Index i) const {
    return {points_.data() + i * points_.cols(), static_cast<size_t>(points_.cols())};
  }
  const PointMatrix& points() const { return points_; }

  Design without(Eigen::Index i) const;
  Design with_point(Point x) const;
  Design concat(const Design& other) const;

 private:
  PointMatrix points_;
};

// Isotropic affine map x -> (x - center) / scale taking the bounding box into [-1, 1]^d.
// A single scale keeps every homogeneous degree block closed under the map.
struct AffineMap {
  Eigen::RowVectorXd center;
  double scale = 1.0;

  static AffineMap identity(Eigen::Index d);
  static AffineMap bounding(const Design& X);

  void apply(Point x, double* out) const;
};

}  // namespace flatgp
