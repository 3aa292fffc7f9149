#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "uio/datamat.hpp"
#include "uio/ddcheck.hpp"
#include "uio/oracle.hpp"

namespace uio::io {

using Json = nlohmann::json;

/// Rounds to 12 significant digits (the precision of every printed report).
double round12(double v);
std::string format12(double v);
std::string format12(Complex z);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols,
                        const std::string& name);

// Matrix-valued files keep full double precision so they round-trip
// exactly; reports are rounded with round12.
Json to_json(const SystemModel& S);
SystemModel system_from_json(const Json& j);
SystemModel read_system(const std::filesystem::path& path);
void write_system(const std::filesystem::path& path, const SystemModel& S);

Json to_json(const UioRealization& U);
UioRealization uio_from_json(const Json& j);
UioRealization read_uio(const std::filesystem::path& path);
void write_uio(const std::filesystem::path& path, const UioRealization& U);

Json to_json(const numkit::Tolerance& tol);
Json to_json(const ExistenceReport& rep, const numkit::Tolerance& tol);
Json to_json(const AssumptionReport& rep);

/// Human-readable table of an existence report.
void render_report(std::ostream& out, const ExistenceReport& rep,
                   const numkit::Tolerance& tol);

}  // namespace uio::io
