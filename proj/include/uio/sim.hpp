#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "uio/oracle.hpp"

namespace uio {

struct ObserverRun {
  Matrix z;     // n x T
  Matrix xhat;  // n x T
};

struct DisturbanceSpec {
  enum class Kind { kZero, kUniform, kFile };
  Kind kind = Kind::kZero;
  double lo = 0.0;
  double hi = 0.0;
  std::filesystem::path file;

  static DisturbanceSpec zero() { return {}; }
  static DisturbanceSpec uniform(double lo, double hi) {
    return {Kind::kUniform, lo, hi, {}};
  }
  static DisturbanceSpec from_file(std::filesystem::path path) {
    return {Kind::kFile, 0.0, 0.0, std::move(path)};
  }
};

struct ErrorExperiment {
  Trajectory plant;
  ObserverRun observer;
  Matrix error;  // n x T, e(t) = x(t) - xhat(t)
};

namespace sim {

/// Runs the observer over y (p x T) and u (m x (T-1), or m x T).
ObserverRun run_observer(const UioRealization& U, const Matrix& y,
                         const Matrix& u, const Vector& z0);

/// Simulates plant and observer side by side. Refuses observers that do not
/// satisfy the decoupling conditions for `S`.
ErrorExperiment error_experiment(const SystemModel& S,
                                 const UioRealization& U, const Vector& x0,
                                 const Vector& z0, const Matrix& d,
                                 const Matrix& u, std::size_t T,
                                 const numkit::Tolerance& tol = {});

/// r x steps disturbance samples, reproducible for a fixed seed.
Matrix disturbance_gen(const DisturbanceSpec& spec, std::size_t r,
                       std::size_t steps, std::uint64_t seed);

/// CSV with header "t,e1..en", 12 significant digits.
void write_error_csv(std::ostream& out, const Matrix& e);

}  // namespace sim
}  // namespace uio
