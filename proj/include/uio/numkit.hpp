#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "uio/error.hpp"

namespace uio {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

namespace numkit {

/// Numerical thresholds shared by every rank, residual and stability
/// decision in the library.
///
/// `rank_tol` is relative to the largest singular value of the matrix being
/// tested, `residual_tol` is an absolute cutoff on residual norms, and
/// `stability_margin` is the slack subtracted from the unit circle when
/// deciding Schur stability or the |z| >= 1 region of a rank test.
struct Tolerance {
  double rank_tol = 1e-9;
  double residual_tol = 1e-8;
  double stability_margin = 1e-8;

  /// Throws kPrecondition unless all fields are >= 0 and rank_tol < 1.
  void validate() const;
};

struct SpectrumReport {
  std::vector<Complex> eigenvalues;
  double spectral_radius = 0.0;
  bool is_schur = false;
  // True when ||M^n|| fell below residual_tol * max(1, ||M||);
  // the matrix is then treated as nilpotent and its eigenvalues as zero.
  bool nilpotent = false;
};

struct DetectabilityReport {
  bool detectable = false;
  std::vector<Complex> offending;
};

struct PencilDrops {
  std::size_t normal_rank = 0;
  std::vector<Complex> drop_points;
};

/// Orthogonal staircase split of (A, B) into controllable and
/// uncontrollable parts: Q^T A Q = [Ac *; 0 Au], Q^T B = [Bc; 0] with Ac of
/// size `controllable_dim`.
struct Staircase {
  Matrix Q;
  std::size_t controllable_dim = 0;
};

bool all_finite(const Matrix& m);
void require_finite(const Matrix& m, const char* what);

std::size_t rank_of(const Matrix& m, const Tolerance& tol = {});
std::size_t rank_of(const ComplexMatrix& m, const Tolerance& tol = {});
/// Rank with the cutoff rank_tol * max(sigma_max, scale). Use for products
/// such as C*E whose rank must be judged against the size of the factors:
/// a product that is pure roundoff would otherwise count as full rank.
std::size_t rank_of(const Matrix& m, const Tolerance& tol, double scale);

/// Orthonormal basis of the right null space; cols = cols(m) - rank_of(m).
Matrix kernel_basis(const Matrix& m, const Tolerance& tol = {});

/// Moore-Penrose inverse, singular values below rank_tol * sigma_max are
/// treated as zero.
Matrix pinv(const Matrix& m, const Tolerance& tol = {});

SpectrumReport spectrum(const Matrix& m, const Tolerance& tol = {});

/// PBH test on every eigenvalue with |lambda| >= 1 - stability_margin.
DetectabilityReport pbh_detectable(const Matrix& F, const Matrix& C,
                                   const Tolerance& tol = {});

Staircase controllable_staircase(const Matrix& A, const Matrix& B,
                                 const Tolerance& tol = {});

/// Dimension of the observable subspace of (F, C).
std::size_t observable_dimension(const Matrix& F, const Matrix& C,
                                 const Tolerance& tol = {});

/// Output-injection gain L with spec(F - L C) = desired ∪ unobservable
/// eigenvalues of (F, C). `desired` must be closed under conjugation and
/// have exactly observable_dimension(F, C) entries.
Matrix place_output_injection(const Matrix& F, const Matrix& C,
                              const std::vector<Complex>& desired,
                              const Tolerance& tol = {});

/// Normal rank of z*M1 - M0 and the finite points where the rank drops
/// below it.
PencilDrops pencil_rank_drop(const Matrix& M0, const Matrix& M1,
                             const Tolerance& tol = {});

// Small helpers used across modules.
/// Stacks blocks vertically; every block must have the same column count
/// (0-row blocks are allowed and contribute nothing).
Matrix vstack(std::initializer_list<Matrix> blocks);
double norm2(const Matrix& m);
bool conjugate_closed(const std::vector<Complex>& poles, double tol);

}  // namespace numkit
}  // namespace uio
