#include "flatgp/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "flatgp/error.hpp"

namespace flatgp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (;;) {
    size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

Dataset parse_dataset(const std::string& path, const std::string& target) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ErrorCode::MissingFile, "cannot open '" + path + "'", 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset_text(ss.str(), target);
}

Dataset parse_dataset_text(std::string_view text, const std::string& target) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError(ErrorCode::EmptyDataset, "no header row", 1, 0);

  auto header = split(lines[0]);
  const int cols = static_cast<int>(header.size());
  if (cols < 2) throw ParseError(ErrorCode::RaggedRow, "need at least one feature and a target", 1, cols);
  int target_col = cols - 1;
  if (!target.empty()) {
    target_col = -1;
    for (int j = 0; j < cols; ++j)
      if (header[j] == target) target_col = j;
    if (target_col < 0) throw Error(ErrorCode::InvalidArgument, "no column named '" + target + "'");
  }

  std::vector<std::vector<double>> rows;
  for (size_t i = 1; i < lines.size(); ++i) {
    const int row = static_cast<int>(i) + 1;
    if (trim(lines[i]).empty()) continue;
    auto cells = split(lines[i]);
    if (static_cast<int>(cells.size()) != cols)
      throw ParseError(ErrorCode::RaggedRow,
                       "expected " + std::to_string(cols) + " cells, found " + std::to_string(cells.size()),
                       row, static_cast<int>(cells.size()));
    std::vector<double> vals(cols);
    for (int j = 0; j < cols; ++j) {
      auto c = cells[j];
      if (!c.empty() && c.front() == '+') c.remove_prefix(1);
      auto r = std::from_chars(c.data(), c.data() + c.size(), vals[j]);
      if (c.empty() || r.ec != std::errc() || r.ptr != c.data() + c.size())
        throw ParseError(ErrorCode::NonNumericCell, "cannot parse '" + std::string(cells[j]) + "'", row, j + 1);
      if (!std::isfinite(vals[j]))
        throw ParseError(ErrorCode::NonFiniteCell, "non-finite value '" + std::string(cells[j]) + "'", row, j + 1);
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw ParseError(ErrorCode::EmptyDataset, "header without data rows", 1, 0);

  Dataset ds;
  PointMatrix P(static_cast<Eigen::Index>(rows.size()), cols - 1);
  ds.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (int j = 0; j < cols; ++j) {
    if (j == target_col) ds.target_name = std::string(header[j]);
    else ds.feature_names.emplace_back(header[j]);
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0, f = 0; j < cols; ++j) {
      if (j == target_col) ds.y(i) = rows[i][j];
      else P(i, f++) = rows[i][j];
    }
  }
  ds.X = Design(std::move(P));
  return ds;
}

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

}  // namespace flatgp
