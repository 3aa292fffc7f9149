#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uio/datamat.hpp"
#include "uio/numkit.hpp"

namespace uio {

/// x(t+1) = A x(t) + B u(t) + E d(t),  y(t) = C x(t).
struct SystemModel {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix E;
  // How a generated system was built ("random", "ce_rank_drop",
  // "planted_zero", ...). Informational only.
  std::string construction;

  std::size_t n() const { return static_cast<std::size_t>(A.rows()); }
  std::size_t m() const { return static_cast<std::size_t>(B.cols()); }
  std::size_t p() const { return static_cast<std::size_t>(C.rows()); }
  std::size_t r() const { return static_cast<std::size_t>(E.cols()); }

  /// Dimension and finiteness checks. Full column rank of E is checked
  /// separately by require_full_column_rank_E since it needs a tolerance.
  void validate() const;
  void require_full_column_rank_E(const numkit::Tolerance& tol = {}) const;
};

/// z(t+1) = A_uio z(t) + B_u u(t) + B_y y(t),  xhat(t) = z(t) + D y(t).
struct UioRealization {
  Matrix A_uio;
  Matrix B_u;
  Matrix B_y;
  Matrix D;

  std::size_t n() const { return static_cast<std::size_t>(A_uio.rows()); }
  void validate() const;
};

/// Verdict on UIO existence with the numbers behind it. The same shape is
/// produced by the model-based test and by the data-only test; in the data
/// case `rank_ce_ok` is decided through the kernel-inclusion condition and
/// `rosenbrock_ok` through the data pencil [z X_p - X_f; U_p; Y_p].
struct ExistenceReport {
  enum class Source { kModel, kData };
  Source source = Source::kModel;

  bool rank_ce_ok = false;
  bool rosenbrock_ok = false;
  bool strong_star_detectable = false;

  // rank(CE), rank(E) and r (model); unused for data.
  std::size_t rank_ce = 0;
  std::size_t rank_e = 0;
  std::size_t r = 0;
  // Kernel inclusion residual ||X_f N|| and its threshold (data only).
  double kernel_residual = 0.0;
  double kernel_threshold = 0.0;
  // Pencil evidence.
  std::size_t normal_rank = 0;
  std::size_t expected_normal_rank = 0;
  std::vector<Complex> drop_points;
  std::vector<Complex> unstable_drop_points;
  // Set when a decision sits within two decades of its threshold.
  bool marginal = false;
};

struct UioConditionReport {
  bool schur = false;           // A_uio Schur stable
  double spectral_radius = 0.0;
  double decoupling = 0.0;      // ||D C E - E||
  double input = 0.0;           // ||(I - D C) B - B_u||
  double dynamics = 0.0;        // ||A_uio (I - D C) + B_y C - (I - D C) A||
  bool pass = false;
};

/// All D with D C E = E:  D = particular + Z * projector, Z free.
struct GainFamily {
  Matrix particular;  // E (CE)^+
  Matrix projector;   // I - (CE)(CE)^+
};

namespace oracle {

struct NormalizedE {
  Matrix E;
  Matrix T_reduce;
};

NormalizedE normalize_E(const Matrix& E_raw, const numkit::Tolerance& tol = {});

UioConditionReport check_uio_conditions(const SystemModel& S,
                                        const UioRealization& U,
                                        const numkit::Tolerance& tol = {});

ExistenceReport existence_model_based(const SystemModel& S,
                                      const numkit::Tolerance& tol = {});

GainFamily decoupling_gain_family(const SystemModel& S,
                                  const numkit::Tolerance& tol = {});

/// Designs a model-based UIO. Empty `desired_poles` means deadbeat.
/// D is searched as the particular solution first, then up to
/// `draw_budget` random members of the decoupling family.
UioRealization design_model_based(const SystemModel& S,
                                  const std::vector<Complex>& desired_poles,
                                  const numkit::Tolerance& tol = {},
                                  int draw_budget = 64,
                                  std::uint64_t seed = 1);

/// Random system whose model-based verdict equals `want_strong_star`, with
/// (A, [B E]) reachable and spectral radius of A at most 1.5.
SystemModel random_system(std::size_t n, std::size_t m, std::size_t p,
                          std::size_t r, bool want_strong_star,
                          std::uint64_t seed,
                          const numkit::Tolerance& tol = {});

/// Exact recursion. `u` is m x (T-1) and `d` is r x (T-1).
Trajectory simulate_system(const SystemModel& S, const Vector& x0,
                           const Matrix& u, const Matrix& d, std::size_t T);

/// The numerical example from the literature this library is validated on
/// (n = 3, p = 2, r = 1, no known input).
SystemModel example_system();

}  // namespace oracle
}  // namespace uio
