// Finite rank-drop points of a rectangular pencil z*M1 - M0.
//
// The pencil is squared up to its normal rank with random two-sided
// projections; the finite generalized eigenvalues of the projected pencil
// (from QZ and from a shift-and-invert standard eigenproblem) are the
// candidates. A candidate is kept only if the original pencil,
// normalized by |z| ||M1|| + ||M0||, is numerically rank deficient there
// and markedly less so than on a ring around it. The ring test discards
// perturbed infinite eigenvalues: near infinity z*M1 - M0 looks rank
// deficient in every direction, while a genuine drop point is isolated.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "uio/numkit.hpp"

namespace uio::numkit {
namespace {

constexpr std::uint64_t kPencilSeed = 0x9e3779b97f4a7c15ULL;
constexpr int kNormalRankSamples = 4;

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = g(rng);
  }
  return m;
}

constexpr double kIsolationFactor = 1e-3;
constexpr double kRingRadius = 0.1;
constexpr int kRingPoints = 6;

ComplexMatrix evaluate(const Matrix& M0, const Matrix& M1, Complex z) {
  return z * M1.cast<Complex>() - M0.cast<Complex>();
}

// nr-th singular value of the normalized pencil at z.
double drop_score(const Matrix& M0, const Matrix& M1, double n0, double n1,
                  Eigen::Index nr, Complex z) {
  Eigen::JacobiSVD<ComplexMatrix> svd(evaluate(M0, M1, z));
  const auto& sv = svd.singularValues();
  if (sv.size() < nr) return 0.0;
  return sv(nr - 1) / (std::abs(z) * n1 + n0);
}

std::vector<Complex> projected_candidates(const Matrix& M0, const Matrix& M1,
                                          Eigen::Index nr, double z_cap,
                                          std::mt19937_64& rng) {
  // Orthonormal projections keep the squared-up pencil well conditioned.
  const Matrix P = Eigen::HouseholderQR<Matrix>(gaussian(M0.rows(), nr, rng))
                       .householderQ() *
                   Matrix::Identity(M0.rows(), nr);
  const Matrix Pt = P.transpose();
  const Matrix Q = Eigen::HouseholderQR<Matrix>(gaussian(M0.cols(), nr, rng))
                       .householderQ() *
                   Matrix::Identity(M0.cols(), nr);
  const Matrix A = Pt * M0 * Q;
  const Matrix B = Pt * M1 * Q;
  std::vector<Complex> out;
  auto keep = [&](Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return;
    if (std::abs(z) > z_cap) return;
    out.push_back(z);
  };
  Eigen::GeneralizedEigenSolver<Matrix> ges(A, B, false);
  if (ges.info() == Eigen::Success) {
    const auto alphas = ges.alphas();
    const auto betas = ges.betas();
    for (Eigen::Index i = 0; i < alphas.size(); ++i) {
      if (betas(i) != 0.0) keep(alphas(i) / betas(i));
    }
  }
  // QZ is unreliable when B is singular, so also shift and invert:
  // mu = 1 / (z - sigma) are eigenvalues of (A - sigma B)^-1 B, infinite z
  // map to mu = 0.
  const double scale = std::max(1.0, A.norm() / std::max(B.norm(), 1e-300));
  std::normal_distribution<double> g(0.0, 1.0);
  for (int attempt = 0; attempt < 3; ++attempt) {
    const double sigma = scale * g(rng);
    const Eigen::FullPivLU<Matrix> lu(A - sigma * B);
    if (lu.rcond() < 1e-12) continue;
    Eigen::EigenSolver<Matrix> es(lu.solve(B), false);
    if (es.info() != Eigen::Success) continue;
    for (const auto mu : es.eigenvalues()) {
      if (std::abs(mu) * z_cap > 1.0) keep(sigma + 1.0 / mu);
    }
    break;
  }
  return out;
}

// Newton steps on f(z) = u^H (z M1 - M0) v with (u, v) the nr-th singular
// pair at the current z; projected candidates are only approximate.
Complex refine(const Matrix& M0, const Matrix& M1, Eigen::Index nr, Complex z) {
  const ComplexMatrix C1 = M1.cast<Complex>();
  for (int it = 0; it < 30; ++it) {
    Eigen::JacobiSVD<ComplexMatrix> svd(evaluate(M0, M1, z),
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto u = svd.matrixU().col(nr - 1);
    const auto v = svd.matrixV().col(nr - 1);
    const Complex slope = u.dot(C1 * v);  // u^H M1 v
    if (std::abs(slope) == 0.0) break;
    const Complex step = svd.singularValues()(nr - 1) / slope;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
    z -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

}  // namespace

PencilDrops pencil_rank_drop(const Matrix& M0, const Matrix& M1,
                             const Tolerance& tol) {
  if (M0.rows() != M1.rows() || M0.cols() != M1.cols()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "pencil_rank_drop: M0 and M1 must have the same shape");
  }
  require_finite(M0, "pencil_rank_drop M0");
  require_finite(M1, "pencil_rank_drop M1");

  PencilDrops out;
  if (M0.size() == 0) return out;

  const double n0 = norm2(M0);
  const double n1 = norm2(M1);
  const double z_scale = (n1 > 0.0 && n0 > 0.0) ? n0 / n1 : 1.0;

  std::mt19937_64 rng(kPencilSeed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int s = 0; s < kNormalRankSamples; ++s) {
    const Complex z = z_scale * Complex(g(rng), g(rng));
    out.normal_rank = std::max(out.normal_rank, rank_of(evaluate(M0, M1, z), tol));
  }
  const auto nr = static_cast<Eigen::Index>(out.normal_rank);
  if (nr == 0 || n1 == 0.0) return out;

  // Points beyond this modulus are numerically infinite eigenvalues.
  const double z_cap = 1e10 * std::max(1.0, z_scale);
  const auto primary = projected_candidates(M0, M1, nr, z_cap, rng);

  const double floor = std::max(tol.rank_tol, std::sqrt(tol.rank_tol));
  for (Complex z : primary) {
    z = refine(M0, M1, nr, z);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
        std::abs(z) > z_cap) {
      continue;
    }
    const double score = drop_score(M0, M1, n0, n1, nr, z);
    if (score > floor) continue;
    const double radius = kRingRadius * std::max(1.0, std::abs(z));
    double ring = 0.0;
    for (int k = 0; k < kRingPoints; ++k) {
      const Complex w = z + std::polar(radius, (2.0 * M_PI * k) / kRingPoints + 0.3);
      ring = std::max(ring, drop_score(M0, M1, n0, n1, nr, w));
    }
    if (score > kIsolationFactor * ring) continue;
    // Two candidates may refine onto the same point; report it once.
    const bool seen = std::any_of(
        out.drop_points.begin(), out.drop_points.end(), [&](Complex w) {
          return std::abs(w - z) <= 1e-8 * std::max(1.0, std::abs(z));
        });
    if (!seen) out.drop_points.push_back(z);
  }
  std::sort(out.drop_points.begin(), out.drop_points.end(),
            [](Complex a, Complex b) {
              return a.real() != b.real() ? a.real() < b.real()
                                          : a.imag() < b.imag();
            });
  return out;
}

}  // namespace uio::numkit
