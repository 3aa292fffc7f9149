#include "uio/datamat.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace uio {

const char* to_string(AssumptionVerdict v) {
  switch (v) {
    case AssumptionVerdict::kHolds: return "holds";
    case AssumptionVerdict::kFails: return "fails";
    case AssumptionVerdict::kUnverifiable: return "unverifiable";
  }
  return "?";
}

void Trajectory::validate() const {
  const Eigen::Index T = x.cols();
  if (T < 2) {
    throw Error(ErrorKind::kPrecondition, "trajectory: horizon T must be >= 2");
  }
  if (y.cols() != T) {
    throw Error(ErrorKind::kDimensionMismatch,
                "trajectory: y must have T samples");
  }
  if (u.cols() != T - 1) {
    throw Error(ErrorKind::kDimensionMismatch,
                "trajectory: u must have T-1 samples");
  }
  if (d && d->cols() != T - 1) {
    throw Error(ErrorKind::kDimensionMismatch,
                "trajectory: d must have T-1 samples");
  }
  numkit::require_finite(u, "trajectory u");
  numkit::require_finite(y, "trajectory y");
  numkit::require_finite(x, "trajectory x");
  if (d) numkit::require_finite(*d, "trajectory d");
}

namespace datamat {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_error(std::size_t row, std::size_t col,
                              const std::string& msg) {
  std::ostringstream os;
  os << "trajectory csv: row " << row << ", column " << col << ": " << msg;
  throw Error(ErrorKind::kParse, os.str());
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string cell = trim(raw);
  if (cell.empty()) parse_error(row, col, "empty cell");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || errno == ERANGE) {
    parse_error(row, col, "not a number: '" + cell + "'");
  }
  if (!std::isfinite(v)) parse_error(row, col, "non-finite value '" + cell + "'");
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

DataMatrices build_data_matrices(const Trajectory& traj, std::size_t r) {
  traj.validate();
  if (r < 1) {
    throw Error(ErrorKind::kPrecondition,
                "build_data_matrices: disturbance dimension r must be >= 1");
  }
  if (traj.d && static_cast<std::size_t>(traj.d->rows()) != r) {
    throw Error(ErrorKind::kDimensionMismatch,
                "build_data_matrices: d rows differ from declared r");
  }
  const Eigen::Index T = traj.x.cols();
  DataMatrices dm;
  dm.U_p = traj.u;
  dm.X_p = traj.x.leftCols(T - 1);
  dm.X_f = traj.x.rightCols(T - 1);
  dm.Y_p = traj.y.leftCols(T - 1);
  dm.Y_f = traj.y.rightCols(T - 1);
  if (traj.d) dm.D_p = *traj.d;
  dm.dims = {static_cast<std::size_t>(traj.x.rows()),
             static_cast<std::size_t>(traj.u.rows()),
             static_cast<std::size_t>(traj.y.rows()), r,
             static_cast<std::size_t>(T)};
  return dm;
}

CsvSchema parse_header(const std::string& header_line) {
  const auto cells = split_csv_line(header_line);
  if (cells.empty() || trim(cells[0]) != "t") {
    parse_error(1, 1, "header must start with 't'");
  }
  CsvSchema schema;
  // Column groups must appear in the order u, y, x, d with indices 1..k.
  const std::string order = "uyxd";
  std::size_t group = 0;
  std::size_t* counts[] = {&schema.m, &schema.p, &schema.n, &schema.r};
  for (std::size_t c = 1; c < cells.size(); ++c) {
    const std::string name = trim(cells[c]);
    if (name.size() < 2) parse_error(1, c + 1, "bad column name '" + name + "'");
    const auto g = order.find(name[0]);
    if (g == std::string::npos || g < group) {
      parse_error(1, c + 1, "unexpected column '" + name + "'");
    }
    group = g;
    const std::string idx = name.substr(1);
    if (idx.find_first_not_of("0123456789") != std::string::npos ||
        std::stoul(idx) != *counts[g] + 1) {
      parse_error(1, c + 1, "column '" + name + "' out of sequence");
    }
    ++*counts[g];
  }
  if (schema.n == 0 || schema.p == 0) {
    parse_error(1, 1, "header needs at least one y and one x column");
  }
  return schema;
}

Trajectory read_trajectory(std::istream& in,
                           const std::optional<CsvSchema>& expected) {
  std::string line;
  if (!std::getline(in, line)) parse_error(1, 1, "missing header");
  const CsvSchema s = parse_header(line);
  if (expected && !(*expected == s)) {
    parse_error(1, 1, "header does not match the expected column schema");
  }
  const std::size_t width = 1 + s.m + s.p + s.n + s.r;

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != width) {
      std::ostringstream os;
      os << "expected " << width << " cells, found " << cells.size();
      parse_error(rows.size() + 2, 1, os.str());
    }
    rows.push_back(std::move(cells));
  }
  const auto T = static_cast<Eigen::Index>(rows.size());
  if (T < 2) parse_error(rows.size() + 1, 1, "need at least two time steps");

  Trajectory traj;
  traj.u.resize(s.m, T - 1);
  traj.y.resize(s.p, T);
  traj.x.resize(s.n, T);
  if (s.r > 0) traj.d = Matrix(s.r, T - 1);

  double prev_t = -INFINITY;
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto& cells = rows[t];
    const std::size_t row = static_cast<std::size_t>(t) + 2;
    const double tv = parse_cell(cells[0], row, 1);
    if (!(tv > prev_t)) parse_error(row, 1, "time column must increase");
    prev_t = tv;
    std::size_t c = 1;
    const bool last = t == T - 1;
    // u and d are undefined at the final time step; cells may be empty.
    for (std::size_t i = 0; i < s.m; ++i, ++c) {
      if (!last) traj.u(i, t) = parse_cell(cells[c], row, c + 1);
      else if (!trim(cells[c]).empty()) parse_cell(cells[c], row, c + 1);
    }
    for (std::size_t i = 0; i < s.p; ++i, ++c) {
      traj.y(i, t) = parse_cell(cells[c], row, c + 1);
    }
    for (std::size_t i = 0; i < s.n; ++i, ++c) {
      traj.x(i, t) = parse_cell(cells[c], row, c + 1);
    }
    for (std::size_t i = 0; i < s.r; ++i, ++c) {
      if (!last) (*traj.d)(i, t) = parse_cell(cells[c], row, c + 1);
      else if (!trim(cells[c]).empty()) parse_cell(cells[c], row, c + 1);
    }
  }
  traj.validate();
  return traj;
}

Trajectory read_trajectory(const std::filesystem::path& path,
                           const std::optional<CsvSchema>& expected) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kParse, "cannot open " + path.string());
  }
  return read_trajectory(in, expected);
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  traj.validate();
  const Eigen::Index T = traj.x.cols();
  out << "t";
  for (Eigen::Index i = 0; i < traj.u.rows(); ++i) out << ",u" << i + 1;
  for (Eigen::Index i = 0; i < traj.y.rows(); ++i) out << ",y" << i + 1;
  for (Eigen::Index i = 0; i < traj.x.rows(); ++i) out << ",x" << i + 1;
  if (traj.d) {
    for (Eigen::Index i = 0; i < traj.d->rows(); ++i) out << ",d" << i + 1;
  }
  out << '\n';
  for (Eigen::Index t = 0; t < T; ++t) {
    const bool last = t == T - 1;
    out << t;
    for (Eigen::Index i = 0; i < traj.u.rows(); ++i) {
      out << ',' << (last ? "" : format_double(traj.u(i, t)));
    }
    for (Eigen::Index i = 0; i < traj.y.rows(); ++i) {
      out << ',' << format_double(traj.y(i, t));
    }
    for (Eigen::Index i = 0; i < traj.x.rows(); ++i) {
      out << ',' << format_double(traj.x(i, t));
    }
    if (traj.d) {
      for (Eigen::Index i = 0; i < traj.d->rows(); ++i) {
        out << ',' << (last ? "" : format_double((*traj.d)(i, t)));
      }
    }
    out << '\n';
  }
}

void write_trajectory(const std::filesystem::path& path,
                      const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kParse, "cannot write " + path.string());
  write_trajectory(out, traj);
}

AssumptionReport check_assumption(const DataMatrices& dm,
                                  const numkit::Tolerance& tol) {
  AssumptionReport rep;
  const auto& d = dm.dims;
  rep.surrogate_expected = d.m + d.n;
  rep.surrogate_rank = numkit::rank_of(numkit::vstack({dm.U_p, dm.X_p}), tol);
  if (!dm.D_p) {
    rep.verdict = AssumptionVerdict::kUnverifiable;
    return rep;
  }
  rep.expected_rank = d.m + d.r + d.n;
  rep.rank = numkit::rank_of(numkit::vstack({dm.U_p, *dm.D_p, dm.X_p}), tol);
  rep.verdict = rep.rank == rep.expected_rank ? AssumptionVerdict::kHolds
                                              : AssumptionVerdict::kFails;
  return rep;
}

DisturbanceRankEvidence disturbance_rank_evidence(
    const DataMatrices& dm, const numkit::Tolerance& tol) {
  DisturbanceRankEvidence ev;
  ev.rank_u_x = numkit::rank_of(numkit::vstack({dm.U_p, dm.X_p}), tol);
  ev.rank_u_x_xf =
      numkit::rank_of(numkit::vstack({dm.U_p, dm.X_p, dm.X_f}), tol);
  ev.implied_r = ev.rank_u_x_xf - ev.rank_u_x;
  return ev;
}

}  // namespace datamat
}  // namespace uio
