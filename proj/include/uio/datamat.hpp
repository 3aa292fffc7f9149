#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "uio/numkit.hpp"

namespace uio {

/// One historical experiment. Samples are stored column-wise: column t of
/// `x` is x(t). `u` and `d` cover t = 0..T-2, `x` and `y` cover t = 0..T-1.
struct Trajectory {
  Matrix u;
  Matrix y;
  Matrix x;
  std::optional<Matrix> d;

  std::size_t horizon() const { return static_cast<std::size_t>(x.cols()); }
  /// Throws on length mismatch, T < 2 or non-finite values.
  void validate() const;
};

struct DataDims {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t p = 0;
  std::size_t r = 0;
  std::size_t T = 0;
};

/// Past/future blocks; every block has T-1 columns.
struct DataMatrices {
  Matrix U_p;
  Matrix X_p;
  Matrix X_f;
  Matrix Y_p;
  Matrix Y_f;
  std::optional<Matrix> D_p;
  DataDims dims;
};

/// Column counts declared by a trajectory CSV header.
struct CsvSchema {
  std::size_t m = 0;
  std::size_t p = 0;
  std::size_t n = 0;
  std::size_t r = 0;  // 0 when the file carries no disturbance columns

  bool operator==(const CsvSchema&) const = default;
};

enum class AssumptionVerdict { kHolds, kFails, kUnverifiable };

const char* to_string(AssumptionVerdict v);

struct AssumptionReport {
  AssumptionVerdict verdict = AssumptionVerdict::kUnverifiable;
  // rank([U_p; D_p; X_p]) against m + r + n; only meaningful with D_p.
  std::size_t rank = 0;
  std::size_t expected_rank = 0;
  // Necessary condition rank([U_p; X_p]) = m + n, always reported.
  std::size_t surrogate_rank = 0;
  std::size_t surrogate_expected = 0;
};

/// Rank evidence from which the disturbance dimension can be read off by
/// hand: under the data assumption rank([U_p; X_p; X_f]) = m + n + r.
struct DisturbanceRankEvidence {
  std::size_t rank_u_x = 0;       // rank([U_p; X_p])
  std::size_t rank_u_x_xf = 0;    // rank([U_p; X_p; X_f])
  std::size_t implied_r = 0;      // rank_u_x_xf - rank_u_x
};

namespace datamat {

DataMatrices build_data_matrices(const Trajectory& traj, std::size_t r);

CsvSchema parse_header(const std::string& header_line);

/// Reads a trajectory CSV. When `expected` is set the header must match it.
Trajectory read_trajectory(std::istream& in,
                           const std::optional<CsvSchema>& expected = {});
Trajectory read_trajectory(const std::filesystem::path& path,
                           const std::optional<CsvSchema>& expected = {});

void write_trajectory(std::ostream& out, const Trajectory& traj);
void write_trajectory(const std::filesystem::path& path,
                      const Trajectory& traj);

AssumptionReport check_assumption(const DataMatrices& dm,
                                  const numkit::Tolerance& tol = {});

DisturbanceRankEvidence disturbance_rank_evidence(
    const DataMatrices& dm, const numkit::Tolerance& tol = {});

}  // namespace datamat
}  // namespace uio
