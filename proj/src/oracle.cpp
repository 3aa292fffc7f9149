#include "uio/oracle.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace uio {

void SystemModel::validate() const {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || E.rows() != n || C.cols() != n) {
    std::ostringstream os;
    os << "system model: inconsistent shapes A " << A.rows() << "x" << A.cols()
       << ", B " << B.rows() << "x" << B.cols() << ", C " << C.rows() << "x"
       << C.cols() << ", E " << E.rows() << "x" << E.cols();
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  numkit::require_finite(A, "system A");
  numkit::require_finite(B, "system B");
  numkit::require_finite(C, "system C");
  numkit::require_finite(E, "system E");
}

void SystemModel::require_full_column_rank_E(
    const numkit::Tolerance& tol) const {
  if (numkit::rank_of(E, tol) != r()) {
    throw Error(ErrorKind::kPrecondition,
                "system model: E must have full column rank (normalize it)");
  }
}

void UioRealization::validate() const {
  const Eigen::Index n = A_uio.rows();
  if (A_uio.cols() != n || B_u.rows() != n || B_y.rows() != n ||
      D.rows() != n || B_y.cols() != D.cols()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "observer realization: inconsistent shapes");
  }
  numkit::require_finite(A_uio, "observer A_uio");
  numkit::require_finite(B_u, "observer B_u");
  numkit::require_finite(B_y, "observer B_y");
  numkit::require_finite(D, "observer D");
}

namespace oracle {
namespace {

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = g(rng);
  }
  return m;
}

constexpr double kMaxGeneratedRadius = 1.5;

std::vector<Complex> deadbeat(std::size_t k) {
  return std::vector<Complex>(k, Complex(0.0, 0.0));
}

}  // namespace

NormalizedE normalize_E(const Matrix& E_raw, const numkit::Tolerance& tol) {
  numkit::require_finite(E_raw, "normalize_E");
  const Eigen::Index n = E_raw.rows();
  const Eigen::Index r = E_raw.cols();
  const std::size_t full = numkit::rank_of(E_raw, tol);
  if (full == static_cast<std::size_t>(r)) {
    return {E_raw, Matrix::Identity(r, r)};
  }
  // Keep columns in their original order whenever they add rank.
  Matrix kept(n, 0);
  for (Eigen::Index j = 0; j < r && static_cast<std::size_t>(kept.cols()) < full; ++j) {
    Matrix trial(n, kept.cols() + 1);
    trial << kept, E_raw.col(j);
    if (numkit::rank_of(trial, tol) == static_cast<std::size_t>(trial.cols())) {
      kept = std::move(trial);
    }
  }
  return {kept, numkit::pinv(kept, tol) * E_raw};
}

UioConditionReport check_uio_conditions(const SystemModel& S,
                                        const UioRealization& U,
                                        const numkit::Tolerance& tol) {
  S.validate();
  U.validate();
  if (U.n() != S.n() || static_cast<std::size_t>(U.D.cols()) != S.p() ||
      static_cast<std::size_t>(U.B_u.cols()) != S.m()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "check_uio_conditions: observer and system sizes differ");
  }
  const auto n = static_cast<Eigen::Index>(S.n());
  const Matrix I_DC = Matrix::Identity(n, n) - U.D * S.C;
  UioConditionReport rep;
  const auto spec = numkit::spectrum(U.A_uio, tol);
  rep.schur = spec.is_schur;
  rep.spectral_radius = spec.spectral_radius;
  rep.decoupling = numkit::norm2(U.D * S.C * S.E - S.E);
  rep.input = numkit::norm2(I_DC * S.B - U.B_u);
  rep.dynamics = numkit::norm2(U.A_uio * I_DC + U.B_y * S.C - I_DC * S.A);
  rep.pass = rep.schur && rep.decoupling <= tol.residual_tol &&
             rep.input <= tol.residual_tol && rep.dynamics <= tol.residual_tol;
  return rep;
}

ExistenceReport existence_model_based(const SystemModel& S,
                                      const numkit::Tolerance& tol) {
  S.validate();
  const auto n = static_cast<Eigen::Index>(S.n());
  const auto p = static_cast<Eigen::Index>(S.p());
  const auto r = static_cast<Eigen::Index>(S.r());

  ExistenceReport rep;
  rep.source = ExistenceReport::Source::kModel;
  rep.r = S.r();
  rep.rank_e = numkit::rank_of(S.E, tol);
  rep.rank_ce = numkit::rank_of(Matrix(S.C * S.E), tol,
                                numkit::norm2(S.C) * numkit::norm2(S.E));
  rep.rank_ce_ok = rep.rank_ce == rep.rank_e && rep.rank_e == rep.r;

  // z*M1 - M0 = [zI - A, -E; C, 0]
  Matrix M1 = Matrix::Zero(n + p, n + r);
  M1.topLeftCorner(n, n).setIdentity();
  Matrix M0 = Matrix::Zero(n + p, n + r);
  M0.topLeftCorner(n, n) = S.A;
  M0.topRightCorner(n, r) = S.E;
  M0.bottomLeftCorner(p, n) = -S.C;

  const auto drops = numkit::pencil_rank_drop(M0, M1, tol);
  rep.normal_rank = drops.normal_rank;
  rep.expected_normal_rank = S.n() + S.r();
  rep.drop_points = drops.drop_points;
  for (const auto z : drops.drop_points) {
    if (std::abs(z) >= 1.0 - tol.stability_margin) {
      rep.unstable_drop_points.push_back(z);
    }
  }
  rep.rosenbrock_ok = rep.normal_rank == rep.expected_normal_rank &&
                      rep.unstable_drop_points.empty();
  rep.strong_star_detectable = rep.rank_ce_ok && rep.rosenbrock_ok;
  return rep;
}

GainFamily decoupling_gain_family(const SystemModel& S,
                                  const numkit::Tolerance& tol) {
  S.validate();
  const Matrix CE = S.C * S.E;
  if (numkit::rank_of(CE, tol, numkit::norm2(S.C) * numkit::norm2(S.E)) !=
          S.r() ||
      numkit::rank_of(S.E, tol) != S.r()) {
    throw Error(ErrorKind::kConditionViolated,
                "decoupling_gain_family: rank(CE) = rank(E) = r fails, "
                "D C E = E has no solution");
  }
  const Matrix CE_pinv = numkit::pinv(CE, tol);
  const auto p = static_cast<Eigen::Index>(S.p());
  return {S.E * CE_pinv, Matrix::Identity(p, p) - CE * CE_pinv};
}

UioRealization design_model_based(const SystemModel& S,
                                  const std::vector<Complex>& desired_poles,
                                  const numkit::Tolerance& tol,
                                  int draw_budget, std::uint64_t seed) {
  const ExistenceReport ex = existence_model_based(S, tol);
  if (!ex.strong_star_detectable) {
    throw Error(ErrorKind::kConditionViolated,
                !ex.rank_ce_ok
                    ? "design_model_based: rank(CE) = rank(E) = r fails"
                    : "design_model_based: Rosenbrock pencil loses rank for "
                      "some |z| >= 1 (unstable invariant zero)");
  }
  if (!numkit::conjugate_closed(desired_poles, 1e-12)) {
    throw Error(ErrorKind::kPoleSpec,
                "design_model_based: poles are not closed under conjugation");
  }
  const GainFamily family = decoupling_gain_family(S, tol);
  const auto n = static_cast<Eigen::Index>(S.n());
  const double z_scale = std::max(1.0, numkit::norm2(family.particular));

  std::mt19937_64 rng(seed);
  std::string last_failure = "no detectable member of the D family";
  for (int draw = 0; draw <= draw_budget; ++draw) {
    Matrix D = family.particular;
    if (draw > 0) {
      D += z_scale * gaussian(n, family.projector.rows(), rng) *
           family.projector;
    }
    const Matrix I_DC = Matrix::Identity(n, n) - D * S.C;
    const Matrix F = I_DC * S.A;
    if (!numkit::pbh_detectable(F, S.C, tol).detectable) continue;

    const std::size_t k = numkit::observable_dimension(F, S.C, tol);
    if (!desired_poles.empty() && desired_poles.size() != k) {
      std::ostringstream os;
      os << "design_model_based: " << desired_poles.size()
         << " poles requested but ((I-DC)A, C) has " << k
         << " observable modes";
      last_failure = os.str();
      continue;
    }
    Matrix L;
    try {
      L = numkit::place_output_injection(
          F, S.C, desired_poles.empty() ? deadbeat(k) : desired_poles, tol);
    } catch (const Error& e) {
      last_failure = e.what();
      continue;
    }
    UioRealization U;
    U.A_uio = F - L * S.C;
    U.B_u = I_DC * S.B;
    U.B_y = L + U.A_uio * D;
    U.D = D;
    const auto check = check_uio_conditions(S, U, tol);
    if (check.pass) return U;
    last_failure = "designed observer failed the condition residual check";
  }
  throw Error(ErrorKind::kBudgetExhausted,
              "design_model_based: " + last_failure);
}

SystemModel random_system(std::size_t n, std::size_t m, std::size_t p,
                          std::size_t r, bool want_strong_star,
                          std::uint64_t seed, const numkit::Tolerance& tol) {
  if (n < 1 || p < 1 || r < 1) {
    throw Error(ErrorKind::kPrecondition,
                "random_system: need n >= 1, p >= 1 and r >= 1");
  }
  if (want_strong_star && p < r) {
    throw Error(ErrorKind::kPrecondition,
                "random_system: rank(CE) = r needs p >= r");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.5, 1.1);
  std::uniform_real_distribution<double> zero_mag(1.5, 3.0);
  std::bernoulli_distribution coin(0.5);
  const auto N = static_cast<Eigen::Index>(n);

  constexpr int kMaxTries = 2000;
  for (int attempt = 0; attempt < kMaxTries; ++attempt) {
    SystemModel S;
    S.A = gaussian(N, N, rng);
    const double rho = numkit::spectrum(S.A, tol).spectral_radius;
    if (rho > 0.0) S.A *= radius(rng) / rho;
    S.B = gaussian(N, static_cast<Eigen::Index>(m), rng);
    S.C = gaussian(static_cast<Eigen::Index>(p), N, rng);
    S.E = gaussian(N, static_cast<Eigen::Index>(r), rng);
    S.construction = "random";

    if (!want_strong_star) {
      if (p < r) {
        S.construction = "ce_rank_drop";
      } else if (p < n && coin(rng)) {
        // Plant an invariant zero z0 outside the unit disc: pick v in
        // ker(C) and w, then bend A so that (z0 I - A) v = E w.
        const Matrix K = numkit::kernel_basis(S.C, tol);
        const Vector v = K * gaussian(K.cols(), 1, rng);
        const Vector w = gaussian(static_cast<Eigen::Index>(r), 1, rng);
        const double z0 = (coin(rng) ? 1.0 : -1.0) * zero_mag(rng);
        const Vector target = z0 * v - S.E * w;
        S.A += (target - S.A * v) * v.transpose() / v.squaredNorm();
        S.construction = "planted_zero";
      } else {
        const Vector e = S.E.col(0);
        S.C = S.C * (Matrix::Identity(N, N) - e * e.transpose() / e.squaredNorm());
        S.construction = "ce_rank_drop";
      }
    }

    // Planting a zero can blow up A; keep generated data well conditioned.
    if (numkit::spectrum(S.A, tol).spectral_radius > kMaxGeneratedRadius) {
      continue;
    }
    Matrix BE(N, static_cast<Eigen::Index>(m + r));
    BE << S.B, S.E;
    if (numkit::controllable_staircase(S.A, BE, tol).controllable_dim != n) {
      continue;
    }
    if (numkit::rank_of(S.E, tol) != r) continue;
    if (existence_model_based(S, tol).strong_star_detectable ==
        want_strong_star) {
      return S;
    }
  }
  throw Error(ErrorKind::kBudgetExhausted,
              "random_system: no system with the requested verdict found");
}

Trajectory simulate_system(const SystemModel& S, const Vector& x0,
                           const Matrix& u, const Matrix& d, std::size_t T) {
  S.validate();
  if (T < 2) {
    throw Error(ErrorKind::kPrecondition, "simulate_system: T must be >= 2");
  }
  const auto steps = static_cast<Eigen::Index>(T) - 1;
  if (static_cast<std::size_t>(x0.size()) != S.n() ||
      static_cast<std::size_t>(u.rows()) != S.m() || u.cols() != steps ||
      static_cast<std::size_t>(d.rows()) != S.r() || d.cols() != steps) {
    throw Error(ErrorKind::kDimensionMismatch,
                "simulate_system: x0, u or d has the wrong shape");
  }
  Trajectory traj;
  traj.u = u;
  traj.d = d;
  traj.x.resize(S.A.rows(), steps + 1);
  traj.x.col(0) = x0;
  for (Eigen::Index t = 0; t < steps; ++t) {
    traj.x.col(t + 1) = S.A * traj.x.col(t) + S.B * u.col(t) + S.E * d.col(t);
  }
  traj.y = S.C * traj.x;
  return traj;
}

SystemModel example_system() {
  SystemModel S;
  S.A.resize(3, 3);
  S.A << -1, -1, 0,
         -1, 0, 0,
         0, -1, -1;
  S.B = Matrix(3, 0);
  S.C.resize(2, 3);
  S.C << 1, 0, 0,
         0, 0, 1;
  S.E.resize(3, 1);
  S.E << -1, 0, 0;
  S.construction = "example";
  return S;
}

}  // namespace oracle
}  // namespace uio
