#include "uio/ddcheck.hpp"

#include <cmath>
#include <sstream>

namespace uio::ddcheck {
namespace {

// Decisions closer than this factor to their threshold are flagged.
constexpr double kMarginalBand = 100.0;

}  // namespace

Matrix recover_C(const DataMatrices& dm, const numkit::Tolerance& tol) {
  const std::size_t rank = numkit::rank_of(dm.X_p, tol);
  if (rank != dm.dims.n) {
    std::ostringstream os;
    os << "recover_C: X_p has rank " << rank << " < n = " << dm.dims.n
       << "; the data are not rich enough to identify C";
    throw Error(ErrorKind::kPrecondition, os.str());
  }
  return dm.Y_p * numkit::pinv(dm.X_p, tol);
}

KernelInclusion kernel_inclusion(const DataMatrices& dm,
                                 const numkit::Tolerance& tol) {
  KernelInclusion out;
  const Matrix stacked = numkit::vstack({dm.U_p, dm.Y_p, dm.Y_f, dm.X_p});
  const Matrix N = numkit::kernel_basis(stacked, tol);
  out.kernel_dim = static_cast<std::size_t>(N.cols());
  out.threshold = tol.residual_tol * std::max(1.0, numkit::norm2(dm.X_f));
  out.residual = N.cols() == 0 ? 0.0 : numkit::norm2(dm.X_f * N);
  out.holds = out.residual <= out.threshold;
  out.marginal = out.residual > out.threshold / kMarginalBand &&
                 out.residual < out.threshold * kMarginalBand;
  return out;
}

RankCondition dd_rank_condition(const DataMatrices& dm, std::size_t r,
                                const numkit::Tolerance& tol) {
  if (r < 1) {
    throw Error(ErrorKind::kPrecondition, "dd_rank_condition: r must be >= 1");
  }
  const auto n = dm.X_p.rows();
  const auto m = dm.U_p.rows();
  const auto p = dm.Y_p.rows();
  const auto cols = dm.X_p.cols();
  // z*M1 - M0 = [z X_p - X_f; U_p; Y_p]
  const Matrix M1 = numkit::vstack(
      {dm.X_p, Matrix::Zero(m, cols), Matrix::Zero(p, cols)});
  const Matrix M0 = numkit::vstack({dm.X_f, -dm.U_p, -dm.Y_p});
  const auto drops = numkit::pencil_rank_drop(M0, M1, tol);

  RankCondition out;
  out.normal_rank = drops.normal_rank;
  out.expected = static_cast<std::size_t>(n + m) + r;
  out.drop_points = drops.drop_points;
  for (const auto z : drops.drop_points) {
    if (std::abs(z) >= 1.0 - tol.stability_margin) out.offending.push_back(z);
  }
  out.holds = out.normal_rank == out.expected && out.offending.empty();
  return out;
}

ExistenceReport existence_data_driven(const DataMatrices& dm, std::size_t r,
                                      const numkit::Tolerance& tol) {
  const KernelInclusion ki = kernel_inclusion(dm, tol);
  const RankCondition rc = dd_rank_condition(dm, r, tol);
  ExistenceReport rep;
  rep.source = ExistenceReport::Source::kData;
  rep.r = r;
  rep.rank_ce_ok = ki.holds;
  rep.kernel_residual = ki.residual;
  rep.kernel_threshold = ki.threshold;
  rep.marginal = ki.marginal;
  rep.rosenbrock_ok = rc.holds;
  rep.normal_rank = rc.normal_rank;
  rep.expected_normal_rank = rc.expected;
  rep.drop_points = rc.drop_points;
  rep.unstable_drop_points = rc.offending;
  rep.strong_star_detectable = ki.holds && rc.holds;
  return rep;
}

}  // namespace uio::ddcheck
