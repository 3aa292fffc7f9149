#pragma once

#include <vector>

#include "uio/datamat.hpp"
#include "uio/oracle.hpp"

namespace uio::ddcheck {

struct KernelInclusion {
  bool holds = false;
  double residual = 0.0;   // ||X_f N|| for N spanning ker([U_p; Y_p; Y_f; X_p])
  double threshold = 0.0;  // residual_tol * max(1, ||X_f||)
  std::size_t kernel_dim = 0;
  bool marginal = false;
};

struct RankCondition {
  bool holds = false;
  std::size_t normal_rank = 0;
  std::size_t expected = 0;  // n + m + r
  std::vector<Complex> drop_points;
  std::vector<Complex> offending;  // drop points with |z| >= 1 - margin
};

/// C = Y_p X_p^+. Throws kPrecondition when X_p lacks full row rank.
Matrix recover_C(const DataMatrices& dm, const numkit::Tolerance& tol = {});

KernelInclusion kernel_inclusion(const DataMatrices& dm,
                                 const numkit::Tolerance& tol = {});

/// rank([z X_p - X_f; U_p; Y_p]) = n + m + r for every |z| >= 1.
RankCondition dd_rank_condition(const DataMatrices& dm, std::size_t r,
                                const numkit::Tolerance& tol = {});

ExistenceReport existence_data_driven(const DataMatrices& dm, std::size_t r,
                                      const numkit::Tolerance& tol = {});

}  // namespace uio::ddcheck
