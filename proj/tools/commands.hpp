#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uio/numkit.hpp"

namespace uio::cli {

// Exit codes shared by every command.
constexpr int kExists = 0;
constexpr int kError = 1;
constexpr int kDoesNotExist = 2;

struct CheckOptions {
  std::string data;
  std::size_t r = 1;
  bool json = false;
};

struct SynthOptions {
  std::string data;
  std::size_t r = 1;
  std::string poles;  // empty -> deadbeat
  std::uint64_t seed = 1;
  int budget = 64;
  std::string out;
  bool baseline = false;
  bool json = false;
};

struct OracleOptions {
  std::string system;
  std::string design_out;
  std::string poles;
  bool json = false;
};

struct CompareOptions {
  std::size_t trials = 100;
  std::size_t n = 3;
  std::size_t m = 1;
  std::size_t p = 2;
  std::size_t r = 1;
  std::uint64_t seed = 1;
  bool json = false;
};

struct SimulateOptions {
  std::string scenario;
  std::string system;
  std::string uio;
  std::string out;
  std::size_t horizon = 50;
  std::uint64_t init_seed = 1;
  std::uint64_t disturbance_seed = 2;
  std::string disturbance = "uniform:-10,10";
  std::string x0;
  std::string z0;
  bool zero_error = false;
};

struct GenSystemOptions {
  bool example = false;
  std::size_t n = 3;
  std::size_t m = 1;
  std::size_t p = 2;
  std::size_t r = 1;
  bool want = true;
  std::uint64_t seed = 1;
  std::string out;
};

struct GenDataOptions {
  std::string system;
  std::size_t horizon = 20;
  std::uint64_t seed = 1;
  double dmax = 2.0;
  bool no_d = false;
  std::string out;
};

struct EvidenceOptions {
  std::string data;
  bool json = false;
};

int cmd_check(const CheckOptions& o, const numkit::Tolerance& tol, std::ostream& out);
int cmd_synth(const SynthOptions& o, const numkit::Tolerance& tol, std::ostream& out);
int cmd_oracle(const OracleOptions& o, const numkit::Tolerance& tol, std::ostream& out);
int cmd_compare(const CompareOptions& o, const numkit::Tolerance& tol, std::ostream& out);
int cmd_simulate(const SimulateOptions& o, const numkit::Tolerance& tol, std::ostream& out);
int cmd_gen_system(const GenSystemOptions& o, const numkit::Tolerance& tol, std::ostream& out);
int cmd_gen_data(const GenDataOptions& o, std::ostream& out);
int cmd_evidence(const EvidenceOptions& o, const numkit::Tolerance& tol, std::ostream& out);

/// "0,0.5,0.2+0.1i,0.2-0.1i" -> poles. Empty string -> empty list.
std::vector<Complex> parse_poles(const std::string& text);
/// "1,-2,0.5" -> vector.
Vector parse_vector(const std::string& text);

}  // namespace uio::cli
