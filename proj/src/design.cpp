#include "flatgp/design.hpp"

#include <algorithm>
#include <cmath>

#include "flatgp/error.hpp"

namespace flatgp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownRegularity: return "UnknownRegularity";
    case ErrorCode::SeriesTruncation: return "SeriesTruncation";
    case ErrorCode::SingularWronskianBlock: return "SingularWronskianBlock";
    case ErrorCode::NotUnisolvent: return "NotUnisolvent";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NegativeVariance: return "NegativeVariance";
    case ErrorCode::NotConditionallyPositiveDefinite: return "NotConditionallyPositiveDefinite";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::InterpolatingSmoother: return "InterpolatingSmoother";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::IncomparableModels: return "IncomparableModels";
    case ErrorCode::NotProportional: return "NotProportional";
    case ErrorCode::InsufficientGrid: return "InsufficientGrid";
    case ErrorCode::UnreachableDof: return "UnreachableDof";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::NonFiniteCell: return "NonFiniteCell";
  }
  return "Unknown";
}

Design::Design(PointMatrix points) : points_(std::move(points)) {
  if (points_.cols() < 1) throw Error(ErrorCode::InvalidArgument, "design needs d >= 1");
  if (!points_.allFinite()) throw Error(ErrorCode::InvalidArgument, "design has non-finite entries");
}

Design Design::from_vector(const Eigen::VectorXd& x) {
  PointMatrix p(x.size(), 1);
  p.col(0) = x;
  return Design(std::move(p));
}

Design Design::without(Eigen::Index i) const {
  PointMatrix p(size() - 1, dim());
  for (Eigen::Index r = 0, o = 0; r < size(); ++r)
    if (r != i) p.row(o++) = points_.row(r);
  return Design(std::move(p));
}

Design Design::with_point(Point x) const {
  PointMatrix p(size() + 1, dim());
  p.topRows(size()) = points_;
  for (Eigen::Index j = 0; j < dim(); ++j) p(size(), j) = x[j];
  return Design(std::move(p));
}

Design Design::concat(const Design& other) const {
  PointMatrix p(size() + other.size(), dim());
  p.topRows(size()) = points_;
  p.bottomRows(other.size()) = other.points();
  return Design(std::move(p));
}

AffineMap AffineMap::identity(Eigen::Index d) {
  return {Eigen::RowVectorXd::Zero(d), 1.0};
}

AffineMap AffineMap::bounding(const Design& X) {
  AffineMap m;
  if (X.size() == 0) return identity(X.dim());
  Eigen::RowVectorXd lo = X.points().colwise().minCoeff();
  Eigen::RowVectorXd hi = X.points().colwise().maxCoeff();
  m.center = 0.5 * (lo + hi);
  double half = 0.5 * (hi - lo).maxCoeff();
  m.scale = half > 0.0 ? half : 1.0;
  return m;
}

void AffineMap::apply(Point x, double* out) const {
  for (size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - center(j)) / scale;
}

}  // namespace flatgp
