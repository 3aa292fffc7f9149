// Output-injection pole placement by duality with state feedback.
//
// The observable part of (F, C) is isolated with an orthogonal staircase on
// (F^T, C^T). On that block the multi-output problem is reduced to a
// single-output one (a random output combination, plus a random pre-gain
// when the combination alone is not controllable), and the single-input
// gain is computed in controller-Hessenberg coordinates, where the
// controllability matrix is upper triangular and Ackermann's formula needs
// only the last row of p(H). Several reductions are tried and the accepted
// gain with the smallest closed-loop norm wins.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "uio/numkit.hpp"

namespace uio::numkit {
namespace {

constexpr int kMaxAttempts = 24;
constexpr std::uint64_t kPlacementSeed = 0x5eedb10c;

// Row vector r * p(H) for the monic polynomial with the given roots.
Eigen::RowVectorXd apply_char_poly(Eigen::RowVectorXd r, const Matrix& H,
                                   const std::vector<Complex>& roots,
                                   double imag_tol) {
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    const Complex z = roots[i];
    if (std::abs(z.imag()) <= imag_tol) {
      r = r * H - z.real() * r;
      continue;
    }
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (!used[j] && std::abs(roots[j] - std::conj(z)) <= imag_tol) {
        used[j] = true;
        break;
      }
    }
    const Eigen::RowVectorXd rh = r * H;
    r = rh * H - 2.0 * z.real() * rh + std::norm(z) * r;
  }
  return r;
}

Matrix char_poly_of(const Matrix& M, const std::vector<Complex>& roots,
                    double imag_tol) {
  const Eigen::Index n = M.rows();
  Matrix acc(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Unit(n, i);
    acc.row(i) = apply_char_poly(row, M, roots, imag_tol);
  }
  return acc;
}

// Single-input placement: returns k with spec(A - b k^T) = roots, or an
// empty vector if (A, b) is numerically uncontrollable.
std::optional<Vector> place_single_input(const Matrix& A, const Vector& b,
                                         const std::vector<Complex>& roots,
                                         double cutoff, double imag_tol) {
  const Eigen::Index n = A.rows();
  const double beta_abs = b.norm();
  if (beta_abs <= cutoff) return std::nullopt;

  // Householder reflector Q1 with Q1 b = beta e1.
  Vector v = b;
  const double beta = b(0) >= 0.0 ? -beta_abs : beta_abs;
  v(0) -= beta;
  Matrix Q1 = Matrix::Identity(n, n);
  if (v.squaredNorm() > 0.0) {
    Q1 -= 2.0 * v * v.transpose() / v.squaredNorm();
  }
  const Matrix A2 = Q1 * A * Q1;
  // Hessenberg reduction leaves e1 fixed, so Q^T b = beta e1 for Q = Q1 Qh.
  Matrix H;
  Matrix Q;
  if (n > 2) {
    Eigen::HessenbergDecomposition<Matrix> hd(A2);
    H = hd.matrixH();
    Q = Q1 * Matrix(hd.matrixQ());
  } else {
    H = A2;
    Q = Q1;
  }

  double lead = beta;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double h = H(i + 1, i);
    if (std::abs(h) <= cutoff) return std::nullopt;
    lead *= h;
  }
  const Eigen::RowVectorXd last =
      apply_char_poly(Eigen::RowVectorXd::Unit(n, n - 1), H, roots, imag_tol);
  const Eigen::RowVectorXd k_hess = last / lead;
  return Vector((k_hess * Q.transpose()).transpose());
}

}  // namespace

Matrix place_output_injection(const Matrix& F, const Matrix& C,
                              const std::vector<Complex>& desired,
                              const Tolerance& tol) {
  const Eigen::Index n = F.rows();
  if (F.cols() != n || C.cols() != n) {
    throw Error(ErrorKind::kDimensionMismatch,
                "place_output_injection: F must be n x n and C p x n");
  }
  require_finite(F, "place_output_injection F");
  require_finite(C, "place_output_injection C");
  for (const auto& z : desired) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorKind::kPoleSpec, "desired pole is not finite");
    }
  }
  const double imag_tol = 1e-12 * std::max(1.0, [&] {
    double m = 0.0;
    for (const auto& z : desired) m = std::max(m, std::abs(z));
    return m;
  }());
  if (!conjugate_closed(desired, imag_tol)) {
    throw Error(ErrorKind::kPoleSpec,
                "desired poles are not closed under complex conjugation");
  }

  // Dual problem: state feedback on (F^T, C^T).
  const Matrix A = F.transpose();
  const Matrix B = C.transpose();
  const Staircase st = controllable_staircase(A, B, tol);
  const auto k = static_cast<Eigen::Index>(st.controllable_dim);
  const Matrix Qc = st.Q.leftCols(k);
  const Matrix Qu = st.Q.rightCols(n - k);

  if (k < n) {
    const Matrix Au = Qu.transpose() * A * Qu;
    const SpectrumReport unobs = spectrum(Au, tol);
    if (!unobs.is_schur) {
      std::ostringstream os;
      os << "place_output_injection: unobservable modes are not Schur "
            "(spectral radius "
         << unobs.spectral_radius << ")";
      throw Error(ErrorKind::kNotDetectable, os.str());
    }
  }
  if (desired.size() != static_cast<std::size_t>(k)) {
    std::ostringstream os;
    os << "place_output_injection: " << desired.size()
       << " poles given but the pair has " << k << " observable modes";
    throw Error(ErrorKind::kPoleSpec, os.str());
  }
  if (k == 0) return Matrix::Zero(n, C.rows());

  const Matrix Ac = Qc.transpose() * A * Qc;
  const Matrix Bc = Qc.transpose() * B;
  const double scale = std::max({1.0, norm2(Ac), norm2(Bc)});
  const double cutoff = std::max(tol.rank_tol, 1e-12) * scale;
  const bool deadbeat = std::all_of(desired.begin(), desired.end(),
                                    [](Complex z) { return z == 0.0; });
  const double open_scale = std::pow(std::max(1.0, norm2(Ac)),
                                     static_cast<double>(k));

  std::mt19937_64 rng(kPlacementSeed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::Index p = Bc.cols();
  Matrix best_gain;
  double best_residual = std::numeric_limits<double>::infinity();
  double best_size = std::numeric_limits<double>::infinity();

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Vector mix(p);
    for (Eigen::Index i = 0; i < p; ++i) mix(i) = gauss(rng);
    if (p == 1) mix(0) = 1.0;
    mix.normalize();
    Matrix pre = Matrix::Zero(p, k);
    if (attempt > 0) {
      const double g = norm2(Ac) / std::max(norm2(Bc), 1e-300);
      for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) pre(i, j) = g * gauss(rng);
      }
    }
    const Matrix A1 = Ac - Bc * pre;
    const Vector b = Bc * mix;
    const auto gain = place_single_input(A1, b, desired, cutoff, imag_tol);
    if (!gain) continue;
    const Matrix Kc = pre + mix * gain->transpose();
    const Matrix closed = Ac - Bc * Kc;
    // Residual of Cayley-Hamilton for the requested polynomial, relative to
    // the acceptance threshold for this attempt.
    const double accept =
        deadbeat ? tol.residual_tol * open_scale
                 : 1e-7 * std::pow(std::max(1.0, norm2(closed)),
                                   static_cast<double>(k));
    const double residual =
        norm2(char_poly_of(closed, desired, imag_tol)) / accept;
    // Among accepted gains keep the one with the smallest closed loop: a
    // less non-normal observer amplifies roundoff less.
    const double size = norm2(closed);
    const bool accepted = residual <= 1.0;
    if ((accepted && (best_residual > 1.0 || size < best_size)) ||
        (!accepted && best_residual > 1.0 && residual < best_residual)) {
      best_residual = residual;
      best_size = size;
      best_gain = Kc;
    }
  }

  if (!(best_residual <= 1.0)) {
    std::ostringstream os;
    os << "place_output_injection: placement residual is " << best_residual
       << " times the acceptance threshold";
    throw Error(ErrorKind::kPoleSpec, os.str());
  }
  // K = [Kc 0] Q^T, and L = K^T.
  return (best_gain * Qc.transpose()).transpose();
}

}  // namespace uio::numkit
