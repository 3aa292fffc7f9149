#include "uio/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

namespace uio::io {
namespace {

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kParse, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Eigen::Index dim(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_unsigned()) {
    throw Error(ErrorKind::kParse,
                std::string("missing or invalid dimension '") + key + "'");
  }
  return j[key].get<Eigen::Index>();
}

Json complex_list(const std::vector<Complex>& zs) {
  Json arr = Json::array();
  for (const auto z : zs) arr.push_back({round12(z.real()), round12(z.imag())});
  return arr;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

double round12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::string format12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format12(Complex z) {
  if (z.imag() == 0.0) return format12(z.real());
  return format12(z.real()) + (z.imag() < 0 ? "-" : "+") +
         format12(std::abs(z.imag())) + "i";
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols,
                        const std::string& name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw Error(ErrorKind::kParse, "matrix " + name + ": expected " +
                                       std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorKind::kParse, "matrix " + name + ": row " +
                                         std::to_string(i) + " must have " +
                                         std::to_string(cols) + " entries");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) {
        throw Error(ErrorKind::kParse, "matrix " + name + ": entry (" +
                                           std::to_string(i) + ", " +
                                           std::to_string(k) +
                                           ") is not a number");
      }
      m(i, k) = v.get<double>();
    }
  }
  numkit::require_finite(m, name.c_str());
  return m;
}

Json to_json(const SystemModel& S) {
  Json j;
  j["kind"] = "system";
  j["n"] = S.n();
  j["m"] = S.m();
  j["p"] = S.p();
  j["r"] = S.r();
  j["A"] = matrix_to_json(S.A);
  j["B"] = matrix_to_json(S.B);
  j["C"] = matrix_to_json(S.C);
  j["E"] = matrix_to_json(S.E);
  if (!S.construction.empty()) j["construction"] = S.construction;
  return j;
}

SystemModel system_from_json(const Json& j) {
  const auto n = dim(j, "n");
  const auto m = dim(j, "m");
  const auto p = dim(j, "p");
  const auto r = dim(j, "r");
  SystemModel S;
  S.A = matrix_from_json(j.value("A", Json()), n, n, "A");
  // B may be omitted when there is no known input.
  S.B = (m == 0 && !j.contains("B")) ? Matrix(n, 0)
                                     : matrix_from_json(j["B"], n, m, "B");
  S.C = matrix_from_json(j.value("C", Json()), p, n, "C");
  S.E = matrix_from_json(j.value("E", Json()), n, r, "E");
  S.construction = j.value("construction", "");
  S.validate();
  return S;
}

SystemModel read_system(const std::filesystem::path& path) {
  return system_from_json(read_json(path));
}

void write_system(const std::filesystem::path& path, const SystemModel& S) {
  write_json(path, to_json(S));
}

Json to_json(const UioRealization& U) {
  Json j;
  j["kind"] = "uio";
  j["n"] = U.n();
  j["m"] = U.B_u.cols();
  j["p"] = U.D.cols();
  j["A_uio"] = matrix_to_json(U.A_uio);
  j["B_u"] = matrix_to_json(U.B_u);
  j["B_y"] = matrix_to_json(U.B_y);
  j["D"] = matrix_to_json(U.D);
  return j;
}

UioRealization uio_from_json(const Json& j) {
  const auto n = dim(j, "n");
  const auto m = dim(j, "m");
  const auto p = dim(j, "p");
  UioRealization U;
  U.A_uio = matrix_from_json(j.value("A_uio", Json()), n, n, "A_uio");
  U.B_u = (m == 0 && !j.contains("B_u"))
              ? Matrix(n, 0)
              : matrix_from_json(j["B_u"], n, m, "B_u");
  U.B_y = matrix_from_json(j.value("B_y", Json()), n, p, "B_y");
  U.D = matrix_from_json(j.value("D", Json()), n, p, "D");
  U.validate();
  return U;
}

UioRealization read_uio(const std::filesystem::path& path) {
  return uio_from_json(read_json(path));
}

void write_uio(const std::filesystem::path& path, const UioRealization& U) {
  write_json(path, to_json(U));
}

Json to_json(const numkit::Tolerance& tol) {
  return {{"rank_tol", round12(tol.rank_tol)},
          {"residual_tol", round12(tol.residual_tol)},
          {"stability_margin", round12(tol.stability_margin)}};
}

Json to_json(const ExistenceReport& rep, const numkit::Tolerance& tol) {
  Json j;
  const bool data = rep.source == ExistenceReport::Source::kData;
  j["source"] = data ? "data" : "model";
  j["uio_exists"] = rep.strong_star_detectable;
  if (data) {
    j["kernel_inclusion"] = {{"holds", rep.rank_ce_ok},
                             {"residual", round12(rep.kernel_residual)},
                             {"threshold", round12(rep.kernel_threshold)},
                             {"marginal", rep.marginal}};
    j["rank_condition"] = {
        {"holds", rep.rosenbrock_ok},
        {"normal_rank", rep.normal_rank},
        {"expected_rank", rep.expected_normal_rank},
        {"drop_points", complex_list(rep.drop_points)},
        {"offending_points", complex_list(rep.unstable_drop_points)}};
  } else {
    j["rank_ce"] = {{"holds", rep.rank_ce_ok},
                    {"rank_CE", rep.rank_ce},
                    {"rank_E", rep.rank_e},
                    {"r", rep.r}};
    j["rosenbrock"] = {
        {"holds", rep.rosenbrock_ok},
        {"normal_rank", rep.normal_rank},
        {"expected_rank", rep.expected_normal_rank},
        {"invariant_zeros", complex_list(rep.drop_points)},
        {"unstable_zeros", complex_list(rep.unstable_drop_points)}};
  }
  j["tolerance"] = to_json(tol);
  return j;
}

Json to_json(const AssumptionReport& rep) {
  return {{"verdict", to_string(rep.verdict)},
          {"rank", rep.rank},
          {"expected_rank", rep.expected_rank},
          {"surrogate_rank", rep.surrogate_rank},
          {"surrogate_expected", rep.surrogate_expected}};
}

void render_report(std::ostream& out, const ExistenceReport& rep,
                   const numkit::Tolerance& tol) {
  auto points = [](const std::vector<Complex>& zs) {
    if (zs.empty()) return std::string("none");
    std::string s;
    for (std::size_t i = 0; i < zs.size(); ++i) {
      if (i) s += ", ";
      s += format12(zs[i]);
    }
    return s;
  };
  if (rep.source == ExistenceReport::Source::kData) {
    out << "condition                                   holds  evidence\n";
    out << "ker(X_f) >= ker([U_p;Y_p;Y_f;X_p])          "
        << yes_no(rep.rank_ce_ok) << (rep.rank_ce_ok ? "    " : "     ")
        << "residual " << format12(rep.kernel_residual) << " (threshold "
        << format12(rep.kernel_threshold) << ")"
        << (rep.marginal ? " MARGINAL" : "") << '\n';
    out << "rank[zX_p-X_f;U_p;Y_p] = n+m+r, |z|>=1      "
        << yes_no(rep.rosenbrock_ok) << (rep.rosenbrock_ok ? "    " : "     ")
        << "normal rank " << rep.normal_rank << "/" << rep.expected_normal_rank
        << ", drop points " << points(rep.drop_points) << ", offending "
        << points(rep.unstable_drop_points) << '\n';
  } else {
    out << "condition                                   holds  evidence\n";
    out << "rank(CE) = rank(E) = r                      "
        << yes_no(rep.rank_ce_ok) << (rep.rank_ce_ok ? "    " : "     ")
        << "rank(CE) " << rep.rank_ce << ", rank(E) " << rep.rank_e << ", r "
        << rep.r << '\n';
    out << "rank[zI-A,-E;C,0] = n+r, |z|>=1             "
        << yes_no(rep.rosenbrock_ok) << (rep.rosenbrock_ok ? "    " : "     ")
        << "normal rank " << rep.normal_rank << "/" << rep.expected_normal_rank
        << ", invariant zeros " << points(rep.drop_points) << ", unstable "
        << points(rep.unstable_drop_points) << '\n';
  }
  out << "UIO exists (strong* detectable): " << yes_no(rep.strong_star_detectable)
      << '\n';
  out << "tolerances: rank_tol " << format12(tol.rank_tol) << ", residual_tol "
      << format12(tol.residual_tol) << ", stability_margin "
      << format12(tol.stability_margin) << '\n';
}

}  // namespace uio::io
