#include "uio/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace uio {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNonFinite: return "non-finite value";
    case ErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ErrorKind::kPrecondition: return "precondition violated";
    case ErrorKind::kNotDetectable: return "pair not detectable";
    case ErrorKind::kPoleSpec: return "invalid pole specification";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kBudgetExhausted: return "search budget exhausted";
    case ErrorKind::kConditionViolated: return "existence condition violated";
    case ErrorKind::kInvalidUio: return "invalid observer";
  }
  return "unknown error";
}

namespace numkit {

void Tolerance::validate() const {
  if (!(rank_tol >= 0.0) || !(rank_tol < 1.0) || !(residual_tol >= 0.0) ||
      !(stability_margin >= 0.0)) {
    throw Error(ErrorKind::kPrecondition,
                "tolerances must be >= 0 with rank_tol < 1");
  }
}

bool all_finite(const Matrix& m) { return m.size() == 0 || m.allFinite(); }

void require_finite(const Matrix& m, const char* what) {
  if (all_finite(m)) return;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j))) {
        std::ostringstream os;
        os << what << ": non-finite entry at (" << i << ", " << j << ")";
        throw Error(ErrorKind::kNonFinite, os.str());
      }
    }
  }
}

namespace {

template <typename Derived>
std::size_t rank_from_singular_values(const Eigen::MatrixBase<Derived>& sv,
                                       double rank_tol, double scale = 0.0) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cutoff = rank_tol * std::max(sv(0), scale);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++r;
  }
  return r;
}

}  // namespace

std::size_t rank_of(const Matrix& m, const Tolerance& tol) {
  require_finite(m, "rank_of");
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return rank_from_singular_values(svd.singularValues(), tol.rank_tol);
}

std::size_t rank_of(const Matrix& m, const Tolerance& tol, double scale) {
  require_finite(m, "rank_of");
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return rank_from_singular_values(svd.singularValues(), tol.rank_tol, scale);
}

std::size_t rank_of(const ComplexMatrix& m, const Tolerance& tol) {
  if (m.size() == 0) return 0;
  if (!m.allFinite()) {
    throw Error(ErrorKind::kNonFinite, "rank_of: non-finite entry");
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return rank_from_singular_values(svd.singularValues(), tol.rank_tol);
}

Matrix kernel_basis(const Matrix& m, const Tolerance& tol) {
  require_finite(m, "kernel_basis");
  const Eigen::Index cols = m.cols();
  if (m.rows() == 0) return Matrix::Identity(cols, cols);
  if (cols == 0) return Matrix(0, 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto r = static_cast<Eigen::Index>(
      rank_from_singular_values(svd.singularValues(), tol.rank_tol));
  return svd.matrixV().rightCols(cols - r);
}

Matrix pinv(const Matrix& m, const Tolerance& tol) {
  require_finite(m, "pinv");
  if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const auto r = static_cast<Eigen::Index>(
      rank_from_singular_values(sv, tol.rank_tol));
  if (r == 0) return Matrix::Zero(m.cols(), m.rows());
  const Vector inv = sv.head(r).cwiseInverse();
  return svd.matrixV().leftCols(r) * inv.asDiagonal() *
         svd.matrixU().leftCols(r).transpose();
}

double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Matrix vstack(std::initializer_list<Matrix> blocks) {
  Eigen::Index rows = 0;
  Eigen::Index cols = -1;
  for (const auto& b : blocks) {
    if (cols < 0) cols = b.cols();
    if (b.cols() != cols) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "vstack: blocks have different column counts");
    }
    rows += b.rows();
  }
  Matrix out(rows, std::max<Eigen::Index>(cols, 0));
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    if (b.rows() > 0) out.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return out;
}

bool conjugate_closed(const std::vector<Complex>& poles, double tol) {
  std::vector<bool> used(poles.size(), false);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    if (std::abs(poles[i].imag()) <= tol) continue;
    bool matched = false;
    for (std::size_t j = i + 1; j < poles.size(); ++j) {
      if (!used[j] && std::abs(poles[j] - std::conj(poles[i])) <= tol) {
        used[j] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

SpectrumReport spectrum(const Matrix& m, const Tolerance& tol) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "spectrum: matrix not square");
  }
  require_finite(m, "spectrum");
  SpectrumReport rep;
  const Eigen::Index n = m.rows();
  if (n == 0) {
    rep.is_schur = true;
    return rep;
  }

  Matrix power = m;
  for (Eigen::Index k = 1; k < n; ++k) power = power * m;
  // Scaling by ||M||^n instead would let strongly non-normal matrices with
  // eigenvalues far from zero pass; rho(M) <= ||M^n||^(1/n) bounds the error.
  if (norm2(power) <= tol.residual_tol * std::max(1.0, norm2(m))) {
    rep.nilpotent = true;
    rep.eigenvalues.assign(static_cast<std::size_t>(n), Complex(0.0, 0.0));
  } else {
    Eigen::EigenSolver<Matrix> es(m, false);
    if (es.info() != Eigen::Success) {
      throw Error(ErrorKind::kPrecondition, "spectrum: eigen solver failed");
    }
    const auto& ev = es.eigenvalues();
    rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    for (const auto& z : rep.eigenvalues) {
      rep.spectral_radius = std::max(rep.spectral_radius, std::abs(z));
    }
  }
  rep.is_schur = rep.spectral_radius < 1.0 - tol.stability_margin;
  return rep;
}

DetectabilityReport pbh_detectable(const Matrix& F, const Matrix& C,
                                   const Tolerance& tol) {
  const Eigen::Index n = F.rows();
  if (F.cols() != n || C.cols() != n) {
    throw Error(ErrorKind::kDimensionMismatch,
                "pbh_detectable: F must be n x n and C p x n");
  }
  require_finite(F, "pbh_detectable F");
  require_finite(C, "pbh_detectable C");
  DetectabilityReport rep;
  rep.detectable = true;
  if (n == 0) return rep;

  Eigen::EigenSolver<Matrix> es(F, false);
  const ComplexMatrix Fc = F.cast<Complex>();
  const ComplexMatrix Cc = C.cast<Complex>();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Complex lambda = es.eigenvalues()(i);
    if (std::abs(lambda) < 1.0 - tol.stability_margin) continue;
    ComplexMatrix test(n + C.rows(), n);
    test.topRows(n) = lambda * ComplexMatrix::Identity(n, n) - Fc;
    if (C.rows() > 0) test.bottomRows(C.rows()) = Cc;
    if (rank_of(test, tol) < static_cast<std::size_t>(n)) {
      rep.detectable = false;
      rep.offending.push_back(lambda);
    }
  }
  return rep;
}

Staircase controllable_staircase(const Matrix& A, const Matrix& B,
                                 const Tolerance& tol) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n) {
    throw Error(ErrorKind::kDimensionMismatch,
                "controllable_staircase: A must be n x n and B n x m");
  }
  require_finite(A, "controllable_staircase A");
  require_finite(B, "controllable_staircase B");

  Staircase out;
  const double scale = std::max(norm2(A), norm2(B));
  const double cutoff = tol.rank_tol * scale;
  Matrix basis(n, 0);
  Matrix frontier = B;
  while (basis.cols() < n && frontier.cols() > 0 && scale > 0.0) {
    for (int pass = 0; pass < 2; ++pass) {
      if (basis.cols() > 0) {
        frontier -= basis * (basis.transpose() * frontier);
      }
    }
    Eigen::JacobiSVD<Matrix> svd(frontier, Eigen::ComputeFullU);
    Eigen::Index k = 0;
    const auto& sv = svd.singularValues();
    while (k < sv.size() && sv(k) > cutoff) ++k;
    k = std::min(k, n - basis.cols());
    if (k == 0) break;
    Matrix grown(n, basis.cols() + k);
    grown << basis, svd.matrixU().leftCols(k);
    basis = std::move(grown);
    frontier = A * basis.rightCols(k);
  }

  out.controllable_dim = static_cast<std::size_t>(basis.cols());
  out.Q.resize(n, n);
  out.Q.leftCols(basis.cols()) = basis;
  if (basis.cols() < n) {
    out.Q.rightCols(n - basis.cols()) =
        kernel_basis(basis.transpose(), Tolerance{});
  }
  return out;
}

std::size_t observable_dimension(const Matrix& F, const Matrix& C,
                                 const Tolerance& tol) {
  if (C.cols() != F.rows()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "observable_dimension: C must have n columns");
  }
  return controllable_staircase(F.transpose(), C.transpose(), tol)
      .controllable_dim;
}

}  // namespace numkit
}  // namespace uio
