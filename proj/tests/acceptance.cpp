// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "test_support.hpp"
#include "uio/ddcheck.hpp"
#include "uio/ddsynth.hpp"
#include "uio/oracle.hpp"
#include "uio/sim.hpp"

namespace {

using namespace uio;
using testing::uniform;

// Pinned tolerances.
constexpr double kC1Seconds = 1.0;
constexpr double kC2Seconds = 5.0;
constexpr double kC3Seconds = 60.0;
constexpr double kRecoverTol = 1e-8;
constexpr double kDeadbeatRadius = 1e-8;
constexpr double kDeadbeatError = 1e-9;
constexpr double kBijectionRel = 1e-12;
constexpr double kResidualTol = 1e-8;
constexpr double kInvarianceTol = 1e-9;
constexpr double kAcceptorTol = 1e-9;
constexpr double kRatioLo = 0.15;
constexpr double kRatioHi = 0.25;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double max_col_norm(const Matrix& m) {
  return m.cols() == 0 ? 0.0 : m.colwise().norm().maxCoeff();
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome example_model_based() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto S = oracle::example_system();
  const auto rep = oracle::existence_model_based(S);
  Outcome o;
  if (!rep.strong_star_detectable || !rep.unstable_drop_points.empty()) {
    return {false, "example not reported strong* detectable"};
  }
  // D = [[1, a], [0, b], [0, c]] for every member of the family.
  const auto fam = oracle::decoupling_gain_family(S);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const Matrix D = fam.particular + testing::gaussian(3, 2, rng) * fam.projector;
    if (std::abs(D(0, 0) - 1.0) > 1e-12 || std::abs(D(1, 0)) > 1e-12 ||
        std::abs(D(2, 0)) > 1e-12) {
      return {false, "D-family first column is not [1, 0, 0]"};
    }
  }
  const Matrix D = (Matrix(3, 2) << 1, 0, 0, 0, 0, 1).finished();
  const Matrix F = (Matrix::Identity(3, 3) - D * S.C) * S.A;
  const Matrix expected = (Matrix(3, 3) << 0, 0, 0, -1, 0, 0, 0, 0, 0).finished();
  if (F != expected) return {false, "(I - DC)A differs from [[0,0,0],[-1,0,0],[0,0,0]]"};
  const double secs = seconds_since(t0);
  o.pass = secs < kC1Seconds;
  o.detail = fmt("strong* detectable, D-family shape ok, (I-DC)A exact; %.3f s", secs);
  return o;
}

Outcome example_data_driven() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto S = oracle::example_system();
  const auto dm = testing::example_data();
  const Matrix C = ddcheck::recover_C(dm);
  const double c_err = (C - S.C).cwiseAbs().maxCoeff();
  if (c_err > kRecoverTol) return {false, fmt("recover_C error %.3e", c_err)};
  if (!ddcheck::existence_data_driven(dm, 1).strong_star_detectable) {
    return {false, "data-driven existence returned false"};
  }
  const auto res = ddsynth::synthesize(dm, 1, {});
  if (!res.uio) return {false, "synthesis failed: " + res.failure};
  const double radius = numkit::spectrum(res.uio->A_uio).spectral_radius;
  if (radius > kDeadbeatRadius) return {false, fmt("A_UIO spectral radius %.3e", radius)};
  // Short horizon: the example plant itself is unstable.
  double worst = 0.0;
  std::mt19937_64 rng(2);
  for (int run = 0; run < 10; ++run) {
    const Vector x0 = uniform(3, 1, -1, 1, rng);
    const Vector z0 = uniform(3, 1, -1, 1, rng);
    const Matrix d = sim::disturbance_gen(DisturbanceSpec::uniform(-2, 2), 1, 9, run);
    const auto ex = sim::error_experiment(S, *res.uio, x0, z0, d, Matrix(0, 9), 10);
    worst = std::max(worst, max_col_norm(ex.error.rightCols(7)));
  }
  if (worst > kDeadbeatError) return {false, fmt("error after 3 steps %.3e", worst)};
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = secs < kC2Seconds;
  o.detail = fmt("C error %.1e, radius %.1e", c_err, radius) +
             fmt(", error from t=3 %.1e; %.3f s", worst, secs);
  return o;
}

Outcome equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  numkit::Tolerance tol;
  tol.rank_tol = 1e-9;
  int agree = 0;
  int detectable = 0;
  for (std::uint64_t k = 1; k <= 100; ++k) {
    const bool want = k % 2 == 0;
    const std::size_t n = 2 + k % 4;
    const std::size_t m = k % 3;
    const std::size_t r = 1 + k % 2;
    const std::size_t p = want ? std::min(n, r + k % 2) : 1 + k % n;
    const auto S = oracle::random_system(n, m, p, r, want, 5000 + k, tol);
    const auto dm = testing::experiment_data(S, testing::rich_horizon(S), k);
    if (datamat::check_assumption(dm, tol).verdict != AssumptionVerdict::kHolds) {
      return {false, "data assumption not verified for trial " + std::to_string(k)};
    }
    const bool model = oracle::existence_model_based(S, tol).strong_star_detectable;
    const bool data = ddcheck::existence_data_driven(dm, r, tol).strong_star_detectable;
    if (model) ++detectable;
    if (model == data && model == want) ++agree;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = agree == 100 && detectable == 50 && secs < kC3Seconds;
  o.detail = fmt("agreement %.0f/100 (%.0f detectable)", agree, detectable) +
             fmt("; %.3f s", secs);
  return o;
}

Outcome bijection() {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 4;
    const int m = trial % 3;
    const int p = 1 + trial % 3;
    TSolution sol;
    sol.T1 = testing::gaussian(n, m, rng);
    sol.T2 = testing::gaussian(n, p, rng);
    sol.T3 = testing::gaussian(n, p, rng);
    const Matrix T4 = testing::gaussian(n, n, rng);
    sol.T4 = 0.5 * T4 / numkit::spectrum(T4).spectral_radius;
    const Matrix C = testing::gaussian(p, n, rng);
    sol.Tstar = sol.T4 + sol.T2 * C;
    const auto U = ddsynth::assemble_uio(sol);
    const auto back = ddsynth::uio_to_T(U, C);
    const auto U2 = ddsynth::assemble_uio(back);
    auto rel = [](const Matrix& a, const Matrix& b) {
      return a.size() == 0 ? 0.0 : (a - b).norm() / std::max(1.0, b.norm());
    };
    worst = std::max({worst, rel(back.T1, sol.T1), rel(back.T3, sol.T3),
                      rel(back.T4, sol.T4),
                      (back.T2 - sol.T2).norm() /
                          std::max({1.0, sol.T2.norm(), sol.T4.norm() * sol.T3.norm()}),
                      rel(U2.A_uio, U.A_uio), rel(U2.B_u, U.B_u), rel(U2.B_y, U.B_y),
                      rel(U2.D, U.D)});
  }
  return {worst <= kBijectionRel, fmt("200 round trips, worst relative error %.2e", worst)};
}

Outcome soundness() {
  double worst = 0.0;
  int designs = 0;
  for (std::uint64_t k = 1; k <= 50; ++k) {
    const std::size_t n = 2 + k % 4;
    const std::size_t r = 1 + k % 2;
    const std::size_t p = std::min<std::size_t>(n, r + 1 + k % 2);
    const auto S = oracle::random_system(n, k % 3, p, r, true, 7000 + k);
    const auto dm = testing::experiment_data(S, testing::rich_horizon(S), k);
    const auto res = ddsynth::synthesize(dm, r, {});
    if (!res.uio) return {false, "data-driven synthesis failed: " + res.failure};
    for (const auto& U : {oracle::design_model_based(S, {}), *res.uio}) {
      const auto rep = oracle::check_uio_conditions(S, U);
      if (!rep.schur) return {false, "non-Schur A_UIO for system " + std::to_string(k)};
      worst = std::max({worst, rep.decoupling, rep.input, rep.dynamics});
      ++designs;
    }
  }
  return {worst <= kResidualTol,
          fmt("%.0f designs Schur, worst residual %.2e", designs, worst)};
}

Outcome disturbance_invariance() {
  double worst = 0.0;
  const auto spec = DisturbanceSpec::uniform(-10, 10);
  for (std::uint64_t k = 1; k <= 20; ++k) {
    const auto S = testing::bounded_random_system(2 + k % 4, k % 3, 2, 1, 9000 + 100 * k);
    const auto U = oracle::design_model_based(S, {});
    std::mt19937_64 rng(k);
    const auto n = static_cast<Eigen::Index>(S.n());
    const Vector x0 = uniform(n, 1, -1, 1, rng);
    const Vector z0 = uniform(n, 1, -1, 1, rng);
    const Matrix u = uniform(static_cast<Eigen::Index>(S.m()), 49, -1, 1, rng);
    const auto a = sim::error_experiment(S, U, x0, z0, sim::disturbance_gen(spec, 1, 49, k),
                                         u, 50);
    const auto b = sim::error_experiment(S, U, x0, z0,
                                         sim::disturbance_gen(spec, 1, 49, k + 500), u, 50);
    worst = std::max(worst, max_col_norm(a.error - b.error));
  }
  return {worst <= kInvarianceTol, fmt("20 UIOs x 50 steps, max discrepancy %.2e", worst)};
}

Outcome acceptor() {
  double worst = 0.0;
  for (std::uint64_t k = 1; k <= 50; ++k) {
    const auto S = testing::bounded_random_system(3 + k % 3, k % 2, 2, 1, 11000 + 100 * k);
    const auto U = oracle::design_model_based(S, {});
    const auto traj = testing::experiment(S, 50, k, 10.0);
    const Vector z0 = traj.x.col(0) - U.D * traj.y.col(0);
    const auto run = sim::run_observer(U, traj.y, traj.u, z0);
    worst = std::max(worst, max_col_norm(run.xhat - traj.x));
  }
  return {worst <= kAcceptorTol, fmt("50 runs, max |xhat - x| %.2e", worst)};
}

Outcome deadbeat_vs_baseline() {
  const auto S = oracle::example_system();
  const auto dm = testing::example_data();
  const auto res = ddsynth::synthesize(dm, 1, {});
  if (!res.uio) return {false, "synthesis failed: " + res.failure};
  const auto base = ddsynth::synthesize_baseline(dm);
  std::mt19937_64 rng(8);
  const Vector x0 = uniform(3, 1, -10, 10, rng);
  const Vector z0 = uniform(3, 1, -10, 10, rng);
  // The open-loop plant grows like 1.618^t, which would bury e(t) ~ 0.2^t in
  // roundoff; this disturbance keeps the state bounded.
  const Matrix d = testing::example_bounded_disturbance(x0, 16, 3);
  const auto dead = sim::error_experiment(S, *res.uio, x0, z0, d.leftCols(9),
                                          Matrix(0, 9), 10);
  const double dead_err = max_col_norm(dead.error.rightCols(7));
  const auto slow = sim::error_experiment(S, base.uio, x0, z0, d, Matrix(0, 16), 17);
  double lo = 1e300;
  double hi = 0.0;
  for (Eigen::Index t = 5; t <= 15; ++t) {
    const double ratio = slow.error.col(t + 1).norm() / slow.error.col(t).norm();
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  Outcome o;
  o.pass = dead_err <= kDeadbeatError && lo >= kRatioLo && hi <= kRatioHi &&
           std::abs(base.spectrum.spectral_radius - 0.2) < 1e-6;
  o.detail = fmt("deadbeat error from t=3 %.1e", dead_err, 0) +
             fmt(", baseline radius %.3f", base.spectrum.spectral_radius) +
             fmt(", ratios in [%.4f, %.4f]", lo, hi);
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"example, model-based", example_model_based},
      {"example, data-driven", example_data_driven},
      {"data-driven vs model-based verdicts", equivalence},
      {"T <-> UIO bijection", bijection},
      {"design residual soundness", soundness},
      {"disturbance invariance of the error", disturbance_invariance},
      {"acceptor exactness", acceptor},
      {"deadbeat vs baseline decay", deadbeat_vs_baseline},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", index, name,
                o.detail.c_str());
  }
  std::printf("%d/%d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
