#include "uio/sim.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace uio::sim {

ObserverRun run_observer(const UioRealization& U, const Matrix& y,
                         const Matrix& u, const Vector& z0) {
  U.validate();
  const Eigen::Index T = y.cols();
  const Eigen::Index n = U.A_uio.rows();
  if (y.rows() != U.D.cols() || z0.size() != n || u.rows() != U.B_u.cols() ||
      (u.cols() != T - 1 && u.cols() != T) || T < 1) {
    throw Error(ErrorKind::kDimensionMismatch,
                "run_observer: y, u or z0 does not fit the observer");
  }
  ObserverRun run;
  run.z.resize(n, T);
  run.z.col(0) = z0;
  for (Eigen::Index t = 0; t + 1 < T; ++t) {
    run.z.col(t + 1) =
        U.A_uio * run.z.col(t) + U.B_u * u.col(t) + U.B_y * y.col(t);
  }
  run.xhat = run.z + U.D * y;
  return run;
}

ErrorExperiment error_experiment(const SystemModel& S,
                                 const UioRealization& U, const Vector& x0,
                                 const Vector& z0, const Matrix& d,
                                 const Matrix& u, std::size_t T,
                                 const numkit::Tolerance& tol) {
  const auto check = oracle::check_uio_conditions(S, U, tol);
  if (!check.pass) {
    std::ostringstream os;
    os << "error_experiment: observer is not valid for this system "
       << "(schur " << (check.schur ? "yes" : "no") << ", residuals "
       << check.decoupling << ", " << check.input << ", " << check.dynamics
       << ")";
    throw Error(ErrorKind::kInvalidUio, os.str());
  }
  ErrorExperiment out;
  out.plant = oracle::simulate_system(S, x0, u, d, T);
  out.observer = run_observer(U, out.plant.y, out.plant.u, z0);
  out.error = out.plant.x - out.observer.xhat;
  return out;
}

namespace {

Matrix read_disturbance_file(const std::filesystem::path& path, std::size_t r,
                             std::size_t steps) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::kParse, path.string() + ": empty disturbance file");
  }
  // Header is "d1,...,dr" with an optional leading "t" column.
  std::vector<std::string> names;
  {
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) names.push_back(cell);
  }
  const std::size_t skip = (!names.empty() && names[0] == "t") ? 1 : 0;
  if (names.size() - skip != r) {
    throw Error(ErrorKind::kParse,
                path.string() + ": header does not declare r columns");
  }
  Matrix d(r, steps);
  std::size_t row = 0;
  while (row < steps && std::getline(in, line)) {
    std::istringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= skip && col - skip < r) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || !std::isfinite(v)) {
          throw Error(ErrorKind::kParse,
                      path.string() + ": bad value at row " +
                          std::to_string(row + 2) + ", column " +
                          std::to_string(col + 1));
        }
        d(static_cast<Eigen::Index>(col - skip), static_cast<Eigen::Index>(row)) = v;
      }
      ++col;
    }
    if (col != r + skip) {
      throw Error(ErrorKind::kParse, path.string() + ": ragged row " +
                                         std::to_string(row + 2));
    }
    ++row;
  }
  if (row < steps) {
    throw Error(ErrorKind::kParse,
                path.string() + ": fewer rows than the requested horizon");
  }
  return d;
}

}  // namespace

Matrix disturbance_gen(const DisturbanceSpec& spec, std::size_t r,
                       std::size_t steps, std::uint64_t seed) {
  const auto R = static_cast<Eigen::Index>(r);
  const auto S = static_cast<Eigen::Index>(steps);
  switch (spec.kind) {
    case DisturbanceSpec::Kind::kZero:
      return Matrix::Zero(R, S);
    case DisturbanceSpec::Kind::kUniform: {
      if (!(spec.lo < spec.hi) || !std::isfinite(spec.lo) ||
          !std::isfinite(spec.hi)) {
        throw Error(ErrorKind::kPrecondition,
                    "disturbance_gen: uniform range needs lo < hi");
      }
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> dist(spec.lo, spec.hi);
      Matrix d(R, S);
      for (Eigen::Index t = 0; t < S; ++t) {
        for (Eigen::Index i = 0; i < R; ++i) {
          double v = dist(rng);
          while (v <= spec.lo) v = dist(rng);  // keep samples in the open interval
          d(i, t) = v;
        }
      }
      return d;
    }
    case DisturbanceSpec::Kind::kFile:
      return read_disturbance_file(spec.file, r, steps);
  }
  return Matrix::Zero(R, S);
}

void write_error_csv(std::ostream& out, const Matrix& e) {
  out << "t";
  for (Eigen::Index i = 0; i < e.rows(); ++i) out << ",e" << i + 1;
  out << '\n';
  char buf[32];
  for (Eigen::Index t = 0; t < e.cols(); ++t) {
    out << t;
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12g", e(i, t));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace uio::sim
