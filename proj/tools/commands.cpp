#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "uio/datamat.hpp"
#include "uio/ddcheck.hpp"
#include "uio/ddsynth.hpp"
#include "uio/io.hpp"
#include "uio/oracle.hpp"
#include "uio/sim.hpp"

namespace uio::cli {
namespace {

using io::format12;
using io::Json;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(s);
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::kParse, what + ": cannot parse '" + s + "'");
  }
  return v;
}

Complex parse_complex(const std::string& tok) {
  if (tok.empty() || tok.back() != 'i') return {parse_double(tok, "pole"), 0.0};
  // a+bi, a-bi or bi; the sign separating the parts is not the leading one
  // and not part of an exponent.
  const std::string body = tok.substr(0, tok.size() - 1);
  std::size_t split_at = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' &&
        body[k - 1] != 'E') {
      split_at = k;
      break;
    }
  }
  if (split_at == std::string::npos) return {0.0, parse_double(body, "pole")};
  std::string imag = body.substr(split_at);
  if (imag == "+" || imag == "-") imag += "1";
  return {parse_double(body.substr(0, split_at), "pole"),
          parse_double(imag, "pole")};
}

std::string format_points(const std::vector<Complex>& zs) {
  if (zs.empty()) return "none";
  std::string s;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    if (k) s += ", ";
    s += format12(zs[k]);
  }
  return s;
}

Json complex_json(const std::vector<Complex>& zs) {
  Json arr = Json::array();
  for (const auto z : zs) arr.push_back({io::round12(z.real()), io::round12(z.imag())});
  return arr;
}

Matrix uniform(Eigen::Index rows, Eigen::Index cols, double lo, double hi,
               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  }
  return m;
}

// One experiment: x0 and u uniform on (-1, 1), d uniform on (-dmax, dmax).
Trajectory experiment(const SystemModel& S, std::size_t T, std::uint64_t seed,
                      double dmax) {
  std::mt19937_64 rng(seed);
  const auto steps = static_cast<Eigen::Index>(T) - 1;
  const Vector x0 = uniform(static_cast<Eigen::Index>(S.n()), 1, -1.0, 1.0, rng);
  const Matrix u = uniform(static_cast<Eigen::Index>(S.m()), steps, -1.0, 1.0, rng);
  const Matrix d = sim::disturbance_gen(DisturbanceSpec::uniform(-dmax, dmax),
                                        S.r(), static_cast<std::size_t>(steps),
                                        seed ^ 0xd157u);
  return oracle::simulate_system(S, x0, u, d, T);
}

DisturbanceSpec parse_disturbance(const std::string& text,
                                  const std::filesystem::path& base) {
  if (text == "zero") return DisturbanceSpec::zero();
  if (text.rfind("uniform:", 0) == 0) {
    const auto parts = split(text.substr(8), ',');
    if (parts.size() != 2) {
      throw Error(ErrorKind::kParse, "disturbance: expected uniform:LO,HI");
    }
    return DisturbanceSpec::uniform(parse_double(parts[0], "disturbance"),
                                    parse_double(parts[1], "disturbance"));
  }
  if (text.rfind("file:", 0) == 0) {
    std::filesystem::path p = text.substr(5);
    if (p.is_relative() && !base.empty()) p = base / p;
    return DisturbanceSpec::from_file(p);
  }
  throw Error(ErrorKind::kParse,
              "disturbance: expected zero, uniform:LO,HI or file:PATH, got '" +
                  text + "'");
}

}  // namespace

std::vector<Complex> parse_poles(const std::string& text) {
  std::vector<Complex> poles;
  if (trim(text).empty()) return poles;
  for (const auto& tok : split(text, ',')) poles.push_back(parse_complex(tok));
  return poles;
}

Vector parse_vector(const std::string& text) {
  const auto parts = split(text, ',');
  Vector v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t k = 0; k < parts.size(); ++k) {
    v(static_cast<Eigen::Index>(k)) = parse_double(parts[k], "vector");
  }
  return v;
}

int cmd_check(const CheckOptions& o, const numkit::Tolerance& tol, std::ostream& out) {
  const auto traj = datamat::read_trajectory(std::filesystem::path(o.data));
  const auto dm = datamat::build_data_matrices(traj, o.r);
  const auto rep = ddcheck::existence_data_driven(dm, o.r, tol);
  const auto assumption = datamat::check_assumption(dm, tol);
  if (o.json) {
    Json j = io::to_json(rep, tol);
    j["assumption"] = io::to_json(assumption);
    j["dims"] = {{"n", dm.dims.n}, {"m", dm.dims.m}, {"p", dm.dims.p},
                 {"r", dm.dims.r}, {"T", dm.dims.T}};
    out << j.dump(2) << '\n';
  } else {
    out << "data: n " << dm.dims.n << ", m " << dm.dims.m << ", p " << dm.dims.p
        << ", r " << dm.dims.r << ", T " << dm.dims.T << '\n';
    io::render_report(out, rep, tol);
    out << "data richness: " << to_string(assumption.verdict);
    if (assumption.verdict == AssumptionVerdict::kUnverifiable) {
      out << " (no d columns; rank[U_p;X_p] " << assumption.surrogate_rank << "/"
          << assumption.surrogate_expected << ")";
    } else {
      out << " (rank[U_p;D_p;X_p] " << assumption.rank << "/"
          << assumption.expected_rank << ")";
    }
    out << '\n';
  }
  return rep.strong_star_detectable ? kExists : kDoesNotExist;
}

int cmd_synth(const SynthOptions& o, const numkit::Tolerance& tol, std::ostream& out) {
  const auto traj = datamat::read_trajectory(std::filesystem::path(o.data));
  const auto dm = datamat::build_data_matrices(traj, o.r);

  UioRealization U;
  TSolution sol;
  if (o.baseline) {
    const auto base = ddsynth::synthesize_baseline(dm, tol);
    U = base.uio;
    sol = base.solution;
    if (!base.spectrum.is_schur) {
      out << "baseline observer is not Schur stable (spectral radius "
          << format12(base.spectrum.spectral_radius) << "); nothing written\n";
      return kDoesNotExist;
    }
  } else {
    const auto res = ddsynth::synthesize(dm, o.r, parse_poles(o.poles), tol,
                                         o.budget, o.seed);
    if (!res.report.strong_star_detectable) {
      out << "no UIO exists for these data: " << res.failure << '\n';
      return kDoesNotExist;
    }
    if (!res.uio) throw Error(ErrorKind::kBudgetExhausted, res.failure);
    U = *res.uio;
    sol = *res.solution;
  }

  const auto spec = numkit::spectrum(U.A_uio, tol);
  const double residual = ddsynth::design_equation_residual(dm, sol);
  if (o.out.empty()) {
    out << io::to_json(U).dump(2) << '\n';
  } else {
    io::write_uio(o.out, U);
  }
  if (o.json) {
    if (!o.out.empty()) {
      out << Json{{"written", o.out},
                  {"spectral_radius", io::round12(spec.spectral_radius)},
                  {"nilpotent", spec.nilpotent},
                  {"eigenvalues", complex_json(spec.eigenvalues)},
                  {"design_residual", io::round12(residual)},
                  {"mode", o.baseline ? "baseline" : "placement"}}
                 .dump(2)
          << '\n';
    }
  } else if (!o.out.empty()) {
    out << "mode: " << (o.baseline ? "baseline (minimum-norm, no pole choice)"
                                   : "pole placement")
        << '\n';
    out << "A_uio eigenvalues: " << format_points(spec.eigenvalues) << '\n';
    out << "spectral radius: " << format12(spec.spectral_radius)
        << (spec.nilpotent ? " (nilpotent)" : "") << '\n';
    out << "design equation residual: " << format12(residual) << '\n';
    out << "wrote " << o.out << '\n';
  }
  return kExists;
}

int cmd_oracle(const OracleOptions& o, const numkit::Tolerance& tol, std::ostream& out) {
  const auto S = io::read_system(o.system);
  const auto rep = oracle::existence_model_based(S, tol);
  if (o.json) {
    out << io::to_json(rep, tol).dump(2) << '\n';
  } else {
    io::render_report(out, rep, tol);
  }
  if (!rep.strong_star_detectable) return kDoesNotExist;
  if (!o.design_out.empty()) {
    const auto U = oracle::design_model_based(S, parse_poles(o.poles), tol);
    io::write_uio(o.design_out, U);
    if (!o.json) {
      out << "wrote model-based design to " << o.design_out << " (spectral radius "
          << format12(numkit::spectrum(U.A_uio, tol).spectral_radius) << ")\n";
    }
  }
  return kExists;
}

int cmd_compare(const CompareOptions& o, const numkit::Tolerance& tol, std::ostream& out) {
  if (o.trials > 0 && o.p < o.r) {
    throw Error(ErrorKind::kPrecondition,
                "compare: p < r makes every system fail rank(CE) = r; "
                "half of the trials need a system where a UIO exists");
  }
  const std::size_t T = 2 * (o.n + o.m + o.r) + 2;
  std::size_t agree = 0;
  std::size_t assumption_failed = 0;
  Json rows = Json::array();
  if (!o.json) {
    out << "trial  construction   model  data   agree\n";
  }
  for (std::size_t k = 0; k < o.trials; ++k) {
    // Per-trial seeds derive from the master seed.
    const std::uint64_t seed = o.seed * 1000003ULL + k;
    const bool want = k % 2 == 0;
    const auto S = oracle::random_system(o.n, o.m, o.p, o.r, want, seed, tol);
    const auto dm = datamat::build_data_matrices(experiment(S, T, seed, 2.0), o.r);
    const bool rich = datamat::check_assumption(dm, tol).verdict == AssumptionVerdict::kHolds;
    if (!rich) ++assumption_failed;
    const bool model = oracle::existence_model_based(S, tol).strong_star_detectable;
    const bool data = ddcheck::existence_data_driven(dm, o.r, tol).strong_star_detectable;
    const bool same = model == data;
    if (same) ++agree;
    if (o.json) {
      rows.push_back({{"trial", k}, {"construction", S.construction},
                      {"model", model}, {"data", data}, {"agree", same},
                      {"data_rich", rich}});
    } else {
      char line[96];
      std::snprintf(line, sizeof line, "%5zu  %-13s  %-5s  %-5s  %s%s\n", k,
                    S.construction.c_str(), model ? "yes" : "no",
                    data ? "yes" : "no", same ? "yes" : "NO",
                    rich ? "" : "  (data not rich)");
      out << line;
    }
  }
  if (o.json) {
    out << Json{{"trials", o.trials}, {"agree", agree},
                {"assumption_failed", assumption_failed}, {"rows", rows},
                {"tolerance", io::to_json(tol)}}
               .dump(2)
        << '\n';
  } else {
    out << "agreement: " << agree << "/" << o.trials << '\n';
    out << "tolerances: rank_tol " << format12(tol.rank_tol) << ", residual_tol "
        << format12(tol.residual_tol) << ", stability_margin "
        << format12(tol.stability_margin) << '\n';
  }
  return agree == o.trials ? kExists : kDoesNotExist;
}

int cmd_simulate(const SimulateOptions& o, const numkit::Tolerance& tol, std::ostream& out) {
  if (o.system.empty() || o.uio.empty()) {
    throw Error(ErrorKind::kPrecondition, "simulate: --system and --uio are required");
  }
  if (o.horizon < 2) throw Error(ErrorKind::kPrecondition, "simulate: horizon must be >= 2");
  const auto S = io::read_system(o.system);
  const auto U = io::read_uio(o.uio);
  const auto n = static_cast<Eigen::Index>(S.n());
  const auto steps = static_cast<Eigen::Index>(o.horizon) - 1;

  std::mt19937_64 rng(o.init_seed);
  Vector x0 = uniform(n, 1, -1.0, 1.0, rng);
  Vector z0 = uniform(n, 1, -1.0, 1.0, rng);
  const Matrix u = uniform(static_cast<Eigen::Index>(S.m()), steps, -1.0, 1.0, rng);
  if (!o.x0.empty()) x0 = parse_vector(o.x0);
  if (!o.z0.empty()) z0 = parse_vector(o.z0);
  if (x0.size() != n || z0.size() != n) {
    throw Error(ErrorKind::kDimensionMismatch, "simulate: x0 and z0 need n entries");
  }
  if (o.zero_error) z0 = x0 - U.D * S.C * x0;

  const std::filesystem::path base =
      o.scenario.empty() ? std::filesystem::path()
                         : std::filesystem::path(o.scenario).parent_path();
  const Matrix d = sim::disturbance_gen(parse_disturbance(o.disturbance, base), S.r(),
                                        static_cast<std::size_t>(steps),
                                        o.disturbance_seed);
  const auto ex = sim::error_experiment(S, U, x0, z0, d, u, o.horizon, tol);
  if (o.out.empty()) {
    sim::write_error_csv(out, ex.error);
  } else {
    std::ofstream f(o.out);
    if (!f) throw Error(ErrorKind::kParse, "cannot write " + o.out);
    sim::write_error_csv(f, ex.error);
    out << "wrote " << o.horizon << " steps of e(t) = x(t) - xhat(t) to " << o.out
        << " (final |e| " << format12(ex.error.col(steps).norm()) << ")\n";
  }
  return kExists;
}

int cmd_gen_system(const GenSystemOptions& o, const numkit::Tolerance& tol,
                   std::ostream& out) {
  const auto S = o.example ? oracle::example_system()
                           : oracle::random_system(o.n, o.m, o.p, o.r, o.want, o.seed, tol);
  if (o.out.empty()) {
    out << io::to_json(S).dump(2) << '\n';
  } else {
    io::write_system(o.out, S);
    out << "wrote " << o.out << " (n " << S.n() << ", m " << S.m() << ", p " << S.p()
        << ", r " << S.r() << (S.construction.empty() ? "" : ", " + S.construction)
        << ")\n";
  }
  return kExists;
}

int cmd_gen_data(const GenDataOptions& o, std::ostream& out) {
  const auto S = io::read_system(o.system);
  if (!(o.dmax > 0.0)) throw Error(ErrorKind::kPrecondition, "gen-data: dmax must be > 0");
  auto traj = experiment(S, o.horizon, o.seed, o.dmax);
  if (o.no_d) traj.d.reset();
  if (o.out.empty()) {
    datamat::write_trajectory(out, traj);
  } else {
    datamat::write_trajectory(std::filesystem::path(o.out), traj);
    out << "wrote " << o.horizon << " samples to " << o.out << '\n';
  }
  return kExists;
}

int cmd_evidence(const EvidenceOptions& o, const numkit::Tolerance& tol, std::ostream& out) {
  const auto traj = datamat::read_trajectory(std::filesystem::path(o.data));
  // r only shapes D_p here; evidence does not depend on it.
  const std::size_t r = traj.d ? static_cast<std::size_t>(traj.d->rows()) : 1;
  const auto dm = datamat::build_data_matrices(traj, r);
  const auto ev = datamat::disturbance_rank_evidence(dm, tol);
  if (o.json) {
    out << Json{{"rank_U_X", ev.rank_u_x}, {"rank_U_X_Xf", ev.rank_u_x_xf},
                {"implied_r", ev.implied_r}, {"n", dm.dims.n}, {"m", dm.dims.m}}
               .dump(2)
        << '\n';
  } else {
    out << "rank[U_p; X_p]        " << ev.rank_u_x << " (n + m = " << dm.dims.n + dm.dims.m
        << ")\n";
    out << "rank[U_p; X_p; X_f]   " << ev.rank_u_x_xf << '\n';
    out << "rank increase         " << ev.implied_r
        << " (a lower bound on rank(E) for this experiment; pass r explicitly)\n";
  }
  return kExists;
}

}  // namespace uio::cli
