// uio: data-driven unknown-input observer design, checking and simulation.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "uio/error.hpp"

namespace {

using uio::cli::kError;

void add_tolerance_flags(CLI::App* cmd, uio::numkit::Tolerance& tol) {
  cmd->add_option("--rank-tol", tol.rank_tol,
                  "relative singular-value cutoff for rank decisions")
      ->capture_default_str();
  cmd->add_option("--residual-tol", tol.residual_tol, "residual norm cutoff")
      ->capture_default_str();
  cmd->add_option("--stability-margin", tol.stability_margin,
                  "slack subtracted from the unit circle")
      ->capture_default_str();
}

// Fields of a scenario file fill whatever was not given on the command line.
void apply_scenario(const std::string& path, uio::cli::SimulateOptions& o,
                    const CLI::App& cmd) {
  std::ifstream in(path);
  if (!in) throw uio::Error(uio::ErrorKind::kParse, "cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw uio::Error(uio::ErrorKind::kParse, path + ": " + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();
  auto given = [&](const char* flag) { return cmd.count(flag) > 0; };
  auto rel = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return (fp.is_relative() ? base / fp : fp).string();
  };
  auto join = [](const nlohmann::json& arr) {
    std::string s;
    for (const auto& v : arr) {
      if (!s.empty()) s += ",";
      s += v.dump();
    }
    return s;
  };
  try {
    if (j.contains("system") && !given("--system")) o.system = rel(j["system"].get<std::string>());
    if (j.contains("uio") && !given("--uio")) o.uio = rel(j["uio"].get<std::string>());
    if (j.contains("out") && !given("--out")) o.out = rel(j["out"].get<std::string>());
    if (j.contains("horizon") && !given("--horizon")) o.horizon = j["horizon"].get<std::size_t>();
    if (j.contains("init_seed") && !given("--init-seed")) o.init_seed = j["init_seed"].get<std::uint64_t>();
    if (j.contains("disturbance_seed") && !given("--disturbance-seed")) {
      o.disturbance_seed = j["disturbance_seed"].get<std::uint64_t>();
    }
    if (j.contains("disturbance") && !given("--disturbance")) {
      o.disturbance = j["disturbance"].get<std::string>();
    }
    if (j.contains("x0") && !given("--x0")) o.x0 = join(j["x0"]);
    if (j.contains("z0") && !given("--z0")) o.z0 = join(j["z0"]);
    if (j.contains("zero_error") && !given("--zero-error")) o.zero_error = j["zero_error"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw uio::Error(uio::ErrorKind::kParse, path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven unknown-input observers for discrete-time LTI systems"};
  app.require_subcommand(1);
  uio::numkit::Tolerance tol;

  uio::cli::CheckOptions check;
  auto* c_check = app.add_subcommand("check", "decide UIO existence from a trajectory CSV "
                                              "(exit 0 exists, 2 does not, 1 error)");
  c_check->add_option("--data", check.data, "trajectory CSV (t,u..,y..,x..[,d..])")->required();
  c_check->add_option("--r", check.r, "disturbance dimension")->required();
  c_check->add_flag("--json", check.json, "machine-readable report");
  add_tolerance_flags(c_check, tol);

  uio::cli::SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "design a UIO from a trajectory CSV");
  c_synth->add_option("--data", synth.data, "trajectory CSV")->required();
  c_synth->add_option("--r", synth.r, "disturbance dimension")->required();
  c_synth->add_option("--poles", synth.poles,
                      "observable poles, e.g. 0,0.5,0.2+0.1i,0.2-0.1i (default: deadbeat)");
  c_synth->add_option("--seed", synth.seed, "seed of the detectable-member search")
      ->capture_default_str();
  c_synth->add_option("--budget", synth.budget, "random family members to try")
      ->capture_default_str();
  c_synth->add_option("--out", synth.out, "output UIO JSON (default: stdout)");
  c_synth->add_flag("--baseline", synth.baseline,
                    "minimum-norm observer without pole choice");
  c_synth->add_flag("--json", synth.json, "machine-readable summary");
  add_tolerance_flags(c_synth, tol);

  uio::cli::OracleOptions oracle;
  auto* c_oracle = app.add_subcommand("oracle", "model-based existence test on a system JSON");
  c_oracle->add_option("--system", oracle.system, "system JSON")->required();
  c_oracle->add_option("--design", oracle.design_out, "also write a model-based UIO here");
  c_oracle->add_option("--poles", oracle.poles, "poles for --design (default: deadbeat)");
  c_oracle->add_flag("--json", oracle.json, "machine-readable report");
  add_tolerance_flags(c_oracle, tol);

  uio::cli::CompareOptions compare;
  auto* c_compare = app.add_subcommand(
      "compare", "data-driven vs model-based verdicts on random systems");
  c_compare->add_option("--trials", compare.trials, "number of systems")->capture_default_str();
  c_compare->add_option("--n", compare.n, "states")->capture_default_str();
  c_compare->add_option("--m", compare.m, "known inputs")->capture_default_str();
  c_compare->add_option("--p", compare.p, "outputs")->capture_default_str();
  c_compare->add_option("--r", compare.r, "disturbances")->capture_default_str();
  c_compare->add_option("--seed", compare.seed, "master seed")->capture_default_str();
  c_compare->add_flag("--json", compare.json, "machine-readable table");
  add_tolerance_flags(c_compare, tol);

  uio::cli::SimulateOptions simulate;
  auto* c_sim = app.add_subcommand("simulate", "plant + observer error trajectory as CSV");
  c_sim->add_option("--scenario", simulate.scenario,
                    "JSON with any of: system, uio, out, horizon, init_seed, "
                    "disturbance_seed, disturbance, x0, z0, zero_error");
  c_sim->add_option("--system", simulate.system, "system JSON");
  c_sim->add_option("--uio", simulate.uio, "UIO JSON");
  c_sim->add_option("--out", simulate.out, "error CSV (default: stdout)");
  c_sim->add_option("--horizon", simulate.horizon, "time steps")->capture_default_str();
  c_sim->add_option("--init-seed", simulate.init_seed, "seed for x0, z0 and u")
      ->capture_default_str();
  c_sim->add_option("--disturbance-seed", simulate.disturbance_seed, "seed for d")
      ->capture_default_str();
  c_sim->add_option("--disturbance", simulate.disturbance,
                    "zero | uniform:LO,HI | file:PATH")
      ->capture_default_str();
  c_sim->add_option("--x0", simulate.x0, "initial state, comma separated");
  c_sim->add_option("--z0", simulate.z0, "initial observer state, comma separated");
  c_sim->add_flag("--zero-error", simulate.zero_error, "set z0 = x0 - D C x0 so e(0) = 0");
  add_tolerance_flags(c_sim, tol);

  uio::cli::GenSystemOptions gen_sys;
  auto* c_gsys = app.add_subcommand("gen-system", "write a random or the example system JSON");
  c_gsys->add_flag("--example", gen_sys.example, "the 3-state example plant");
  c_gsys->add_option("--n", gen_sys.n, "states")->capture_default_str();
  c_gsys->add_option("--m", gen_sys.m, "known inputs")->capture_default_str();
  c_gsys->add_option("--p", gen_sys.p, "outputs")->capture_default_str();
  c_gsys->add_option("--r", gen_sys.r, "disturbances")->capture_default_str();
  c_gsys->add_option("--exists", gen_sys.want, "whether a UIO should exist")
      ->capture_default_str();
  c_gsys->add_option("--seed", gen_sys.seed, "seed")->capture_default_str();
  c_gsys->add_option("--out", gen_sys.out, "output JSON (default: stdout)");
  add_tolerance_flags(c_gsys, tol);

  uio::cli::GenDataOptions gen_data;
  auto* c_gdata = app.add_subcommand("gen-data", "simulate one experiment into a trajectory CSV");
  c_gdata->add_option("--system", gen_data.system, "system JSON")->required();
  c_gdata->add_option("--horizon", gen_data.horizon, "samples T")->capture_default_str();
  c_gdata->add_option("--seed", gen_data.seed, "seed")->capture_default_str();
  c_gdata->add_option("--dmax", gen_data.dmax, "d ~ uniform(-dmax, dmax)")->capture_default_str();
  c_gdata->add_flag("--no-d", gen_data.no_d, "omit the disturbance columns");
  c_gdata->add_option("--out", gen_data.out, "output CSV (default: stdout)");

  uio::cli::EvidenceOptions evidence;
  auto* c_ev = app.add_subcommand("evidence", "rank evidence for choosing r");
  c_ev->add_option("--data", evidence.data, "trajectory CSV")->required();
  c_ev->add_flag("--json", evidence.json, "machine-readable output");
  add_tolerance_flags(c_ev, tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    tol.validate();
    if (c_check->parsed()) return uio::cli::cmd_check(check, tol, std::cout);
    if (c_synth->parsed()) return uio::cli::cmd_synth(synth, tol, std::cout);
    if (c_oracle->parsed()) return uio::cli::cmd_oracle(oracle, tol, std::cout);
    if (c_compare->parsed()) return uio::cli::cmd_compare(compare, tol, std::cout);
    if (c_sim->parsed()) {
      if (!simulate.scenario.empty()) apply_scenario(simulate.scenario, simulate, *c_sim);
      return uio::cli::cmd_simulate(simulate, tol, std::cout);
    }
    if (c_gsys->parsed()) return uio::cli::cmd_gen_system(gen_sys, tol, std::cout);
    if (c_gdata->parsed()) return uio::cli::cmd_gen_data(gen_data, std::cout);
    if (c_ev->parsed()) return uio::cli::cmd_evidence(evidence, tol, std::cout);
  } catch (const uio::Error& e) {
    std::cerr << "error (" << uio::to_string(e.kind()) << "): " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
