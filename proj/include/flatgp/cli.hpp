#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace flatgp::cli {

enum ExitCode { Success = 0, Usage = 1, NumericalFailure = 2 };

struct ExperimentConfig {
  std::string command;
  std::string data;
  std::string target;
  std::string kernel = "gaussian";
  double nu = 1.5;
  double eps = 1.0;
  std::string eps_grid;
  double gamma = 1.0;
  std::string gamma_grid;
  int p = 0;
  double gamma0 = 1.0;
  double sigma2 = 0.01;
  double nugget = 0.0;
  std::string dof;  // comma-separated targets
  std::string query;
  std::string xa;
  std::string xb;
  std::string model_a;
  std::string model_b;
  int trials = 5;
  int n = 8;
  int dim = 1;
  std::string out;
  std::uint64_t seed = 0;
  std::string format = "json";
};

// Parses argv and runs the selected command. JSON goes to `<out>.json` and CSV rows to
// `<out>.csv` when --out is set; otherwise --format picks which one is printed.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace flatgp::cli
