#include "glqr/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "glqr/errors.hpp"

namespace glqr {

namespace {

std::vector<double> parse_row(const std::string& line, const std::string& path) {
  std::vector<double> row;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t next = line.find(',', pos);
    if (next == std::string::npos) next = line.size();
    std::string field = line.substr(pos, next - pos);
    const auto l = field.find_first_not_of(" \t\r");
    const auto r = field.find_last_not_of(" \t\r");
    if (l == std::string::npos)
      throw ConstructionError("csv: empty field in " + path);
    field = field.substr(l, r - l + 1);
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
      throw ConstructionError("csv: bad number '" + field + "' in " + path);
    row.push_back(value);
    pos = next + 1;
    if (next == line.size()) break;
  }
  return row;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConstructionError("csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(parse_row(line, path));
    if (rows.back().size() != rows.front().size())
      throw ConstructionError("csv: ragged rows in " + path);
  }
  if (rows.empty()) throw ConstructionError("csv: empty file " + path);
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw ConstructionError("csv: cannot write " + path);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<double>& time_grid,
                          const std::vector<GridFunction>& values) {
  if (time_grid.size() != values.size())
    throw DimensionError("csv: trajectory lengths mismatch");
  std::ofstream out(path);
  if (!out) throw ConstructionError("csv: cannot write " + path);
  for (std::size_t k = 0; k < time_grid.size(); ++k) {
    out << format_double(time_grid[k]);
    const Eigen::VectorXd v = values[k].stacked();
    for (long i = 0; i < v.size(); ++i) out << ',' << format_double(v[i]);
    out << '\n';
  }
}

TrajectoryData read_trajectory_csv(const std::string& path, int dim) {
  const Eigen::MatrixXd raw = read_matrix_csv(path);
  if ((raw.cols() - 1) % dim != 0)
    throw DimensionError("csv: trajectory width incompatible with dimension " +
                         std::to_string(dim));
  const int N = static_cast<int>(raw.cols() - 1) / dim;
  TrajectoryData out;
  for (int k = 0; k < raw.rows(); ++k) {
    out.time_grid.push_back(raw(k, 0));
    out.values.push_back(GridFunction::from_stacked(
        raw.row(k).segment(1, raw.cols() - 1).transpose(), N, dim));
  }
  return out;
}

void write_riccati_csv(const std::string& path, const RiccatiTrajectory& traj) {
  write_matrix_series_csv(path, traj.matrices());
}

void write_matrix_series_csv(const std::string& path,
                             const std::vector<Eigen::MatrixXd>& series) {
  std::ofstream out(path);
  if (!out) throw ConstructionError("csv: cannot write " + path);
  for (const Eigen::MatrixXd& m : series) {
    bool first = true;
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) {
        if (!first) out << ',';
        out << format_double(m(i, j));
        first = false;
      }
    }
    out << '\n';
  }
}

}  // namespace glqr
