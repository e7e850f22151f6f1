#include "flatgp/numerics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "flatgp/error.hpp"

namespace flatgp {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    ++k;
  }
  if (k < 2) return std::nan("");
  double den = k * sxx - sx * sx;
  return den != 0.0 ? (k * sxy - sx * sy) / den : std::nan("");
}

std::vector<double> logspace(double a, double b, int k) {
  if (!(a > 0.0) || !(b > 0.0) || k < 1)
    throw Error(ErrorCode::InvalidArgument, "log grid needs positive bounds and k >= 1");
  std::vector<double> out(k);
  if (k == 1) {
    out[0] = a;
    return out;
  }
  double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < k; ++i) out[i] = std::exp(la + (lb - la) * i / (k - 1));
  out.front() = a;
  out.back() = b;
  return out;
}

std::vector<double> parse_log_grid(const std::string& spec) {
  auto c1 = spec.find(':');
  auto c2 = c1 == std::string::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw Error(ErrorCode::InvalidArgument, "grid must look like a:b:k, got '" + spec + "'");
  double a = 0, b = 0;
  int k = 0;
  auto parse = [&](std::string_view s, auto& v) {
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
      throw Error(ErrorCode::InvalidArgument, "bad grid component '" + std::string(s) + "'");
  };
  std::string_view sv(spec);
  parse(sv.substr(0, c1), a);
  parse(sv.substr(c1 + 1, c2 - c1 - 1), b);
  parse(sv.substr(c2 + 1), k);
  return logspace(a, b, k);
}

BisectionResult bisect_log(const std::function<double(double)>& f, double lo, double hi,
                           double ftol, int max_expand) {
  BisectionResult res;
  double flo = f(lo), fhi = f(hi);
  for (int e = 0; e < max_expand && flo * fhi > 0.0; ++e) {
    if (std::abs(flo) < std::abs(fhi)) {
      lo /= 10.0;
      flo = f(lo);
    } else {
      hi *= 10.0;
      fhi = f(hi);
    }
  }
  if (flo == 0.0) return {lo, 0.0, 0, true};
  if (fhi == 0.0) return {hi, 0.0, 0, true};
  if (flo * fhi > 0.0) {
    res.x = std::abs(flo) < std::abs(fhi) ? lo : hi;
    res.f = std::min(std::abs(flo), std::abs(fhi));
    return res;
  }
  res.bracketed = true;
  double a = std::log(lo), b = std::log(hi);
  for (int it = 0; it < 400; ++it) {
    double m = 0.5 * (a + b);
    double fm = f(std::exp(m));
    res.x = std::exp(m);
    res.f = fm;
    res.iterations = it + 1;
    if (std::abs(fm) <= ftol || b - a <= 4e-16 * std::max(1.0, std::abs(m))) break;
    if ((fm < 0.0) == (flo < 0.0)) {
      a = m;
      flo = fm;
    } else {
      b = m;
    }
  }
  return res;
}

}  // namespace flatgp
