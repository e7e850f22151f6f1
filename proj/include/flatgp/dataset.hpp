#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "flatgp/design.hpp"

namespace flatgp {

struct Dataset {
  std::vector<std::string> feature_names;
  std::string target_name;
  Design X;
  Eigen::VectorXd y;
};

// CSV with a header row: feature columns then the target. `target` selects the target
// column by name; empty means the last column. Errors carry 1-based row and column,
// counting the header as row 1.
Dataset parse_dataset(const std::string& path, const std::string& target = "");
Dataset parse_dataset_text(std::string_view text, const std::string& target = "");

// Shortest text with 17 significant digits, independent of locale.
std::string format_double(double v);

}  // namespace flatgp
