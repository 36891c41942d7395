// SPDX-License-Identifier: Apache-2.0
//
// Experiment front end. Two subcommands:
//   run    --config <file> with optional flag overrides
//   preset <name> [--out DIR]
// Exit codes: 0 success, 1 usage/config error, 2 I/O error, 3 if any trial
// failed (its row is flagged in results.csv).
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdmimo/experiment.hpp"

namespace {

std::vector<double> parse_double_list(const std::string& text,
                                      const char* what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string item = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(item[used])) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw fdmimo::usage_error(std::string(what) + ": cannot parse '" +
                                item + "' as a number");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<fdmimo::Algorithm> parse_solvers(const std::string& text) {
  std::vector<fdmimo::Algorithm> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string item = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(fdmimo::algorithm_from_name(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw fdmimo::usage_error("empty solver list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sum-rate maximization experiments for a full-duplex "
               "multiuser MIMO cell"};
  app.require_subcommand(1);

  // ---- run ----
  // The config option lives on the root app (the only place this CLI11
  // version reads config files); `run` falls through so `run --config F`
  // parses, and manifest keys live in a [run] section to reach run's options.
  CLI::Option* config_opt = app.set_config("--config");
  CLI::App* run = app.add_subcommand(
      "run", "Run an experiment described by a config file");
  run->fallthrough(true);

  int bs_antennas = 4, user_antennas = 4, uplink_users = 4,
      downlink_users = 4;
  double p_d_dbm = 27.0, c_si_db = 110.0;
  std::string p_u_dbm = "20";
  double l_bs_user_db = 91.0, d_bs_user_km = 0.0;
  double l_cci_db = 97.0, d_cci_km = 0.0;
  std::uint64_t seed = 1;
  int trials = 1;
  std::string solvers = "mm,aiwf";
  std::string sweep_parameter, sweep_values;
  fdmimo::SolverConfig sol;
  std::string refresh_mode = "per-iteration", init_mode = "uniform";
  bool emit_traces = false;
  std::string exec = "parallel";
  std::string out_dir = "out";

  run->add_option("--bs_antennas", bs_antennas, "BS antenna count (M)");
  run->add_option("--user_antennas", user_antennas,
                  "Antennas per user (N)");
  run->add_option("--uplink_users", uplink_users, "Uplink user count");
  run->add_option("--downlink_users", downlink_users, "Downlink user count");
  run->add_option("--p_d_dbm", p_d_dbm, "BS power budget [dBm]");
  run->add_option("--p_u_dbm", p_u_dbm,
                  "Uplink power budgets [dBm], one shared value or a "
                  "comma-separated per-user list");
  run->add_option("--c_si_db", c_si_db,
                  "Self-interference cancellation capability [dB]");
  CLI::Option* o_l_bs = run->add_option(
      "--l_bs_user_db", l_bs_user_db, "BS<->user path loss [dB]");
  CLI::Option* o_d_bs = run->add_option(
      "--d_bs_user_km", d_bs_user_km,
      "BS<->user distance [km] (line-of-sight loss model)");
  CLI::Option* o_l_cci = run->add_option(
      "--l_cci_db", l_cci_db, "Uplink-user -> downlink-user path loss [dB]");
  CLI::Option* o_d_cci = run->add_option(
      "--d_cci_km", d_cci_km,
      "Uplink-user -> downlink-user distance [km] (non-line-of-sight model)");
  run->add_option("--seed", seed, "Master seed for channel realization");
  run->add_option("--trials", trials, "Monte-Carlo trials per sweep value");
  run->add_option("--solvers", solvers,
                  "Comma-separated subset of mm,aiwf,hd");
  run->add_option("--sweep_parameter", sweep_parameter,
                  "Swept axis: P_D_dbm, P_U_dbm, C_SI_db or L_cci_db");
  run->add_option("--sweep_values", sweep_values,
                  "Comma-separated sweep values");
  run->add_option("--outer_tol", sol.outer_tol,
                  "Relative objective change for convergence");
  run->add_option("--max_outer_iters", sol.max_outer_iters,
                  "Outer evaluation cap, counting initialization");
  run->add_option("--inner_fw_gap_tol", sol.inner_fw_gap_tol,
                  "Conditional-gradient duality gap tolerance");
  run->add_option("--inner_fw_max_iters", sol.inner_fw_max_iters,
                  "Conditional-gradient iteration cap");
  run->add_option("--refresh-mode", refresh_mode,
                  "per-iteration (default) or frozen effective channels");
  run->add_option("--init_mode", init_mode, "uniform, zero or random");
  run->add_option("--init_seed", sol.init_seed,
                  "Seed for init_mode=random");
  run->add_flag("--emit_traces", emit_traces,
                "Write per-trial convergence trace files");
  run->add_option("--exec", exec, "parallel (default) or serial trials");
  run->add_option("--out", out_dir, "Output directory");

  // ---- preset ----
  CLI::App* pre = app.add_subcommand(
      "preset", "Run a named reproduction (fig4, fig5a, fig5b, fig6a, fig6b)");
  std::string preset_name, preset_out;
  pre->add_option("name", preset_name, "Preset name")->required();
  pre->add_option("--out", preset_out,
                  "Output directory (defaults to ./<name>)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    fdmimo::ExperimentSpec spec;
    if (run->parsed()) {
      if (config_opt->count() == 0) {
        throw fdmimo::usage_error("run requires --config <file>");
      }
      fdmimo::ScenarioConfig& sc = spec.scenario;
      sc.bs_antennas = bs_antennas;
      sc.user_antennas = user_antennas;
      sc.uplink_users = uplink_users;
      sc.downlink_users = downlink_users;
      sc.p_d_dbm = p_d_dbm;
      sc.p_u_dbm = parse_double_list(p_u_dbm, "p_u_dbm");
      sc.c_si_db = c_si_db;
      sc.master_seed = seed;

      // A link's loss comes from an explicit dB value, else from a distance,
      // else from the default loss; explicitly set dB wins over distance.
      sc.l_bs_user_db.reset();
      sc.d_bs_user_km.reset();
      if (o_l_bs->count() > 0) sc.l_bs_user_db = l_bs_user_db;
      if (o_d_bs->count() > 0) sc.d_bs_user_km = d_bs_user_km;
      if (!sc.l_bs_user_db && !sc.d_bs_user_km) sc.l_bs_user_db = 91.0;
      sc.l_cci_db.reset();
      sc.d_cci_km.reset();
      if (o_l_cci->count() > 0) sc.l_cci_db = l_cci_db;
      if (o_d_cci->count() > 0) sc.d_cci_km = d_cci_km;
      if (!sc.l_cci_db && !sc.d_cci_km) sc.l_cci_db = 97.0;

      spec.trials = trials;
      spec.solvers = parse_solvers(solvers);
      if (!sweep_parameter.empty() || !sweep_values.empty()) {
        if (sweep_parameter.empty() || sweep_values.empty()) {
          throw fdmimo::usage_error(
              "sweep needs both sweep_parameter and sweep_values");
        }
        spec.sweep = fdmimo::SweepSpec{
            sweep_parameter, parse_double_list(sweep_values, "sweep_values")};
      }

      spec.solver = sol;
      if (refresh_mode == "per-iteration") {
        spec.solver.refresh_mode = fdmimo::RefreshMode::kPerIteration;
      } else if (refresh_mode == "frozen") {
        spec.solver.refresh_mode = fdmimo::RefreshMode::kFrozen;
      } else {
        throw fdmimo::usage_error(
            "refresh-mode must be per-iteration or frozen");
      }
      if (init_mode == "uniform") {
        spec.solver.init_mode = fdmimo::InitMode::kUniform;
      } else if (init_mode == "zero") {
        spec.solver.init_mode = fdmimo::InitMode::kZero;
      } else if (init_mode == "random") {
        spec.solver.init_mode = fdmimo::InitMode::kRandom;
      } else {
        throw fdmimo::usage_error(
            "init_mode must be uniform, zero or random");
      }
      spec.emit_traces = emit_traces;
      if (exec == "parallel") {
        spec.exec = fdmimo::ExecutionMode::kParallel;
      } else if (exec == "serial") {
        spec.exec = fdmimo::ExecutionMode::kSerial;
      } else {
        throw fdmimo::usage_error("exec must be parallel or serial");
      }
      spec.output_dir = out_dir;
    } else {
      spec = fdmimo::preset(preset_name);
      spec.output_dir = preset_out.empty() ? preset_name : preset_out;
    }

    fdmimo::ExperimentResult result = fdmimo::run_experiment(spec);
    std::size_t failures = 0;
    for (const fdmimo::TrialRecord& r : result.records) {
      failures += r.failed ? 1 : 0;
    }
    std::cout << result.records.size() << " records written to "
              << spec.output_dir.string();
    if (failures > 0) std::cout << " (" << failures << " failed)";
    std::cout << "\n";
    return result.any_failed ? 3 : 0;
  } catch (const fdmimo::usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fdmimo::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fdmimo::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
