#pragma once

#include <functional>
#include <string>
#include <vector>

namespace flatgp {

// Least-squares slope of log y against log x. Non-positive entries are skipped.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// k log-spaced values from a to b inclusive; a and b must be positive.
std::vector<double> logspace(double a, double b, int k);

// Parses "a:b:k" into logspace(a, b, k).
std::vector<double> parse_log_grid(const std::string& spec);

// Root of a monotone function of log x on [lo, hi], widening the bracket by factors of
// 10 up to `max_expand` times. Stops when |f| <= ftol or the bracket width in log x
// reaches machine resolution.
struct BisectionResult {
  double x = 0.0;
  double f = 0.0;
  int iterations = 0;
  bool bracketed = false;
};
BisectionResult bisect_log(const std::function<double(double)>& f, double lo, double hi,
                           double ftol, int max_expand = 12);

}  // namespace flatgp
