#include "uio/ddsynth.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "uio/ddcheck.hpp"

namespace uio {

ReducedSolution SolutionFamily::member(const Matrix& W) const {
  const Matrix block = particular + W * projector;
  const auto mm = static_cast<Eigen::Index>(m);
  const auto pp = static_cast<Eigen::Index>(p);
  const auto nn = static_cast<Eigen::Index>(n);
  return {block.leftCols(mm), block.middleCols(mm, pp),
          block.rightCols(nn)};
}

ReducedSolution SolutionFamily::particular_member() const {
  return member(Matrix::Zero(particular.rows(), projector.rows()));
}

namespace ddsynth {
namespace {

std::string format_points(const std::vector<Complex>& zs) {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (i) os << ", ";
    os << zs[i].real();
    if (zs[i].imag() != 0.0) {
      os << (zs[i].imag() < 0 ? " - " : " + ") << std::abs(zs[i].imag()) << "i";
    }
  }
  return os.str();
}

}  // namespace

SolutionFamily solve_family(const DataMatrices& dm, const Matrix& C,
                            const numkit::Tolerance& tol) {
  const auto& d = dm.dims;
  if (static_cast<std::size_t>(C.rows()) != d.p ||
      static_cast<std::size_t>(C.cols()) != d.n) {
    throw Error(ErrorKind::kDimensionMismatch, "solve_family: C must be p x n");
  }
  const Matrix M = numkit::vstack({dm.U_p, dm.Y_f, dm.X_p});
  const Matrix M_pinv = numkit::pinv(M, tol);
  SolutionFamily fam;
  fam.m = d.m;
  fam.p = d.p;
  fam.n = d.n;
  fam.particular = dm.X_f * M_pinv;
  fam.projector = Matrix::Identity(M.rows(), M.rows()) - M * M_pinv;
  fam.residual = numkit::norm2(dm.X_f - fam.particular * M);
  const double threshold =
      tol.residual_tol * std::max(1.0, numkit::norm2(dm.X_f));
  if (fam.residual > threshold) {
    std::ostringstream os;
    os << "solve_family: X_f = [T1 | T3 | T*][U_p; Y_f; X_p] has no exact "
          "solution (residual "
       << fam.residual << " > " << threshold
       << "); the kernel inclusion condition is violated";
    throw Error(ErrorKind::kConditionViolated, os.str());
  }
  return fam;
}

ReducedSolution select_detectable(const SolutionFamily& family,
                                  const Matrix& C, int budget,
                                  std::uint64_t seed,
                                  const numkit::Tolerance& tol) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const double scale = std::max(1.0, numkit::norm2(family.particular));
  const bool single_point = numkit::norm2(family.projector) <= tol.rank_tol;

  std::vector<Complex> best_offending;
  bool have_best = false;
  for (int draw = 0; draw <= budget; ++draw) {
    ReducedSolution cand;
    if (draw == 0) {
      cand = family.particular_member();
    } else {
      if (single_point) break;
      Matrix W(family.particular.rows(), family.projector.rows());
      for (Eigen::Index i = 0; i < W.rows(); ++i) {
        for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = scale * g(rng);
      }
      cand = family.member(W);
    }
    const auto det = numkit::pbh_detectable(cand.Tstar, C, tol);
    if (det.detectable) return cand;
    if (!have_best || det.offending.size() < best_offending.size()) {
      best_offending = det.offending;
      have_best = true;
    }
  }
  throw Error(ErrorKind::kBudgetExhausted,
              "select_detectable: no member with (T*, C) detectable found; "
              "best candidate fails PBH at " +
                  format_points(best_offending));
}

T2Design design_T2(const Matrix& Tstar, const Matrix& C,
                   const std::vector<Complex>& desired_poles,
                   const numkit::Tolerance& tol) {
  std::vector<Complex> poles = desired_poles;
  if (poles.empty()) {
    poles.assign(numkit::observable_dimension(Tstar, C, tol), Complex(0.0));
  }
  T2Design out;
  out.T2 = numkit::place_output_injection(Tstar, C, poles, tol);
  out.T4 = Tstar - out.T2 * C;
  if (!numkit::spectrum(out.T4, tol).is_schur) {
    throw Error(ErrorKind::kPoleSpec,
                "design_T2: T4 = T* - T2 C is not Schur stable (requested "
                "poles outside the unit disc?)");
  }
  return out;
}

UioRealization assemble_uio(const TSolution& sol,
                            const numkit::Tolerance& tol) {
  const auto spec = numkit::spectrum(sol.T4, tol);
  if (!spec.is_schur) {
    std::ostringstream os;
    os << "assemble_uio: T4 is not Schur stable (spectral radius "
       << spec.spectral_radius << ")";
    throw Error(ErrorKind::kInvalidUio, os.str());
  }
  UioRealization U;
  U.A_uio = sol.T4;
  U.B_u = sol.T1;
  U.B_y = sol.T2 + sol.T4 * sol.T3;
  U.D = sol.T3;
  return U;
}

TSolution uio_to_T(const UioRealization& U, const Matrix& C) {
  U.validate();
  if (C.cols() != U.A_uio.rows() || C.rows() != U.D.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "uio_to_T: C must be p x n");
  }
  TSolution sol;
  sol.T1 = U.B_u;
  sol.T2 = U.B_y - U.A_uio * U.D;
  sol.T3 = U.D;
  sol.T4 = U.A_uio;
  sol.Tstar = sol.T4 + sol.T2 * C;
  return sol;
}

double design_equation_residual(const DataMatrices& dm, const TSolution& sol) {
  const Matrix M = numkit::vstack({dm.U_p, dm.Y_p, dm.Y_f, dm.X_p});
  Matrix T(sol.T4.rows(), M.rows());
  T << sol.T1, sol.T2, sol.T3, sol.T4;
  return numkit::norm2(dm.X_f - T * M);
}

SynthesisResult synthesize(const DataMatrices& dm, std::size_t r,
                           const std::vector<Complex>& desired_poles,
                           const numkit::Tolerance& tol, int budget,
                           std::uint64_t seed) {
  SynthesisResult out;
  out.report = ddcheck::existence_data_driven(dm, r, tol);
  if (!out.report.rank_ce_ok) {
    std::ostringstream os;
    os << "kernel inclusion ker(X_f) >= ker([U_p; Y_p; Y_f; X_p]) fails "
          "(residual "
       << out.report.kernel_residual << " > " << out.report.kernel_threshold
       << "); equivalently rank(CE) = rank(E) = r fails";
    out.failure = os.str();
  }
  if (!out.report.rosenbrock_ok) {
    std::ostringstream os;
    if (!out.failure.empty()) os << "; ";
    os << "rank([z X_p - X_f; U_p; Y_p]) = n + m + r fails ";
    if (out.report.normal_rank != out.report.expected_normal_rank) {
      os << "(normal rank " << out.report.normal_rank << " < "
         << out.report.expected_normal_rank << ")";
    } else {
      os << "at z = " << format_points(out.report.unstable_drop_points);
    }
    out.failure += os.str();
  }
  if (!out.report.strong_star_detectable) return out;

  const Matrix C = ddcheck::recover_C(dm, tol);
  out.C = C;
  const SolutionFamily family = solve_family(dm, C, tol);
  ReducedSolution reduced;
  try {
    reduced = select_detectable(family, C, budget, seed, tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kBudgetExhausted) throw;
    out.failure = e.what();
    return out;
  }
  const T2Design t2 = design_T2(reduced.Tstar, C, desired_poles, tol);
  TSolution sol{reduced.T1, t2.T2, reduced.T3, t2.T4, reduced.Tstar};
  out.uio = assemble_uio(sol, tol);
  out.solution = std::move(sol);
  return out;
}

BaselineResult synthesize_baseline(const DataMatrices& dm,
                                   const numkit::Tolerance& tol) {
  const Matrix C = ddcheck::recover_C(dm, tol);
  const Matrix M = numkit::vstack({dm.U_p, dm.Y_p, dm.Y_f, dm.X_p});
  const Matrix T = dm.X_f * numkit::pinv(M, tol);
  const auto m = dm.U_p.rows();
  const auto p = dm.Y_p.rows();
  const auto n = dm.X_p.rows();
  BaselineResult out;
  out.solution.T1 = T.leftCols(m);
  out.solution.T2 = T.middleCols(m, p);
  out.solution.T3 = T.middleCols(m + p, p);
  out.solution.T4 = T.rightCols(n);
  out.solution.Tstar = out.solution.T4 + out.solution.T2 * C;
  out.uio.A_uio = out.solution.T4;
  out.uio.B_u = out.solution.T1;
  out.uio.B_y = out.solution.T2 + out.solution.T4 * out.solution.T3;
  out.uio.D = out.solution.T3;
  out.spectrum = numkit::spectrum(out.uio.A_uio, tol);
  return out;
}

}  // namespace ddsynth
}  // namespace uio
