#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uio/datamat.hpp"
#include "uio/oracle.hpp"

namespace uio {

/// Solution of X_f = [T1 | T2 | T3 | T4] [U_p; Y_p; Y_f; X_p] together with
/// the reduced matrix Tstar = T4 + T2 C.
struct TSolution {
  Matrix T1;  // n x m
  Matrix T2;  // n x p
  Matrix T3;  // n x p
  Matrix T4;  // n x n
  Matrix Tstar;
};

/// Reduced triple (T1, T3, Tstar) solving X_f = [T1 | T3 | Tstar] [U_p; Y_f; X_p].
struct ReducedSolution {
  Matrix T1;
  Matrix T3;
  Matrix Tstar;
};

/// Every solution of the reduced equation is particular + W * projector.
struct SolutionFamily {
  Matrix particular;  // n x (m + p + n), minimum-norm solution
  Matrix projector;   // I - M M^+ for M = [U_p; Y_f; X_p]
  double residual = 0.0;
  std::size_t m = 0;
  std::size_t p = 0;
  std::size_t n = 0;

  ReducedSolution member(const Matrix& W) const;
  ReducedSolution particular_member() const;
};

struct SynthesisResult {
  ExistenceReport report;
  std::optional<Matrix> C;
  std::optional<TSolution> solution;
  std::optional<UioRealization> uio;
  // Empty on success; otherwise names the violated condition or the stage
  // that failed.
  std::string failure;
};

struct BaselineResult {
  TSolution solution;
  UioRealization uio;
  numkit::SpectrumReport spectrum;
};

namespace ddsynth {

SolutionFamily solve_family(const DataMatrices& dm, const Matrix& C,
                            const numkit::Tolerance& tol = {});

/// Particular solution first, then up to `budget` random members, until
/// (Tstar, C) is detectable.
ReducedSolution select_detectable(const SolutionFamily& family,
                                  const Matrix& C, int budget,
                                  std::uint64_t seed,
                                  const numkit::Tolerance& tol = {});

struct T2Design {
  Matrix T2;
  Matrix T4;
};

/// Empty `desired_poles` requests a deadbeat design.
T2Design design_T2(const Matrix& Tstar, const Matrix& C,
                   const std::vector<Complex>& desired_poles,
                   const numkit::Tolerance& tol = {});

UioRealization assemble_uio(const TSolution& sol,
                            const numkit::Tolerance& tol = {});

TSolution uio_to_T(const UioRealization& U, const Matrix& C);

SynthesisResult synthesize(const DataMatrices& dm, std::size_t r,
                           const std::vector<Complex>& desired_poles,
                           const numkit::Tolerance& tol = {}, int budget = 64,
                           std::uint64_t seed = 1);

/// Observer from the minimum-norm solution of the full four-block equation
/// with no pole assignment; its stability can only be checked afterwards.
BaselineResult synthesize_baseline(const DataMatrices& dm,
                                   const numkit::Tolerance& tol = {});

/// Residual ||X_f - [T1 T2 T3 T4][U_p; Y_p; Y_f; X_p]||.
double design_equation_residual(const DataMatrices& dm, const TSolution& sol);

}  // namespace ddsynth
}  // namespace uio
