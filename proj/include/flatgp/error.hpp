#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flatgp {

enum class ErrorCode {
  InvalidArgument,
  UnknownRegularity,
  SeriesTruncation,
  SingularWronskianBlock,
  NotUnisolvent,
  SingularSystem,
  NegativeVariance,
  NotConditionallyPositiveDefinite,
  DegenerateDesign,
  IllConditioned,
  InterpolatingSmoother,
  DegenerateVariance,
  IncomparableModels,
  NotProportional,
  InsufficientGrid,
  UnreachableDof,
  EmptyDataset,
  MissingFile,
  RaggedRow,
  NonNumericCell,
  NonFiniteCell,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Thrown when a matrix that should be positive definite is numerically not.
class IllConditionedError : public Error {
 public:
  IllConditionedError(const std::string& what, double min_eigenvalue)
      : Error(ErrorCode::IllConditioned,
              what + " (smallest eigenvalue " + std::to_string(min_eigenvalue) + ")"),
        min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

// Thrown by the dataset parser; row and column are 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& what, int row, int column)
      : Error(code, what + " (row " + std::to_string(row) + ", column " +
                        std::to_string(column) + ")"),
        row_(row),
        column_(column) {}

  int row() const { return row_; }
  int column() const { return column_; }

 private:
  int row_;
  int column_;
};

}  // namespace flatgp
