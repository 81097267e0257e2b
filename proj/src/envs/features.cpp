#include "dgrl/envs/features.hpp"

#include "dgrl/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace dgrl {

namespace {

std::vector<double> row_of(const Mat& m, Eigen::Index r) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(c)] = m(r, c);
  return out;
}

bool is_separator(char c) { return c == ',' || c == ';' || c == '\t' || c == ' ' || c == '\r'; }

}  // namespace

Mat build_similarity(const Mat& features) {
  if (features.rows() == 0) throw DataError("similarity: empty feature matrix");
  const Vec norms = features.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (!(norms(i) > 0.0)) throw DataError("similarity: row " + std::to_string(i) + " has zero norm");
  }
  const Mat unit = norms.cwiseInverse().asDiagonal() * features;
  Mat s = unit * unit.transpose();
  s.diagonal().setOnes();
  return s;
}

Mat unique_rows(const Mat& features) {
  std::set<std::vector<double>> seen;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    if (seen.insert(row_of(features, r)).second) keep.push_back(r);
  }
  Mat out(static_cast<Eigen::Index>(keep.size()), features.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = features.row(keep[i]);
  return out;
}

Mat load_feature_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open feature file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && is_separator(line[pos])) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && !is_separator(line[end])) ++end;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
      if (ec != std::errc() || ptr != line.data() + end) {
        throw FormatError(path + ":" + std::to_string(line_no) + ": not a number: " +
                          line.substr(pos, end - pos));
      }
      if (!(v >= 0.0)) {
        throw FormatError(path + ":" + std::to_string(line_no) + ": negative feature value");
      }
      row.push_back(v);
      pos = end;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(rows.front().size()) + " columns, got " +
                        std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError(path + ": no feature rows");
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    if (std::all_of(rows[r].begin(), rows[r].end(), [](double v) { return v == 0.0; })) {
      throw DataError(path + ": row " + std::to_string(r + 1) + " is all zeros");
    }
  }
  return unique_rows(m);
}

Mat synth_feature_matrix(int rows, int cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw ParameterError("synthetic features need rows, cols >= 1");
  Rng rng(seed);
  std::uniform_int_distribution<int> active(1, std::min(3, cols));
  std::uniform_int_distribution<int> column(0, cols - 1);
  std::uniform_real_distribution<double> weight(0.2, 1.0);
  std::set<std::vector<double>> seen;
  Mat m = Mat::Zero(rows, cols);
  for (int r = 0; r < rows;) {
    std::vector<double> row(static_cast<std::size_t>(cols), 0.0);
    const int k = active(rng);
    for (int i = 0; i < k; ++i) row[static_cast<std::size_t>(column(rng))] = weight(rng);
    if (!seen.insert(row).second) continue;
    for (int c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
    ++r;
  }
  return m;
}

void save_feature_matrix(const std::string& path, const Mat& features) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write feature file " + path);
  char buf[32];
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
      const auto res = std::to_chars(buf, buf + sizeof buf, features(r, c));
      if (c > 0) out << ',';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw FormatError("failed writing feature file " + path);
}

}  // namespace dgrl
