// SPDX-License-Identifier: Apache-2.0

#include "fdmimo/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "fdmimo/ratemodel.hpp"

namespace fdmimo {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Fixed-width-free deterministic formatting: 17 significant digits round-trip
// any double, so identical records always print identical bytes.
std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

void append_record(std::ostream& os, const TrialRecord& r) {
  if (r.sweep_value) os << fmt(*r.sweep_value);
  os << ',' << r.trial << ',' << r.seed << ',' << algorithm_name(r.algo)
     << ',' << fmt(r.r_u) << ',' << fmt(r.r_d) << ',' << fmt(r.f) << ','
     << fmt(r.rho_si_db) << ',' << fmt(r.rho_cci_db) << ',' << r.outer_iters
     << ',' << (r.converged ? 1 : 0) << ',' << (r.failed ? 1 : 0) << '\n';
}

std::string trace_csv(const ConvergenceTrace& trace) {
  std::ostringstream os;
  os << "iteration,r_u,r_du,f,inner_iters,wall_ms\n";
  for (const TracePoint& p : trace.points) {
    os << p.iteration << ',' << fmt(p.r_u) << ',' << fmt(p.r_du) << ','
       << fmt(p.objective) << ',' << p.inner_iters << ',' << fmt(p.wall_ms)
       << '\n';
  }
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open " + path.string() + " for writing");
  out << body;
  out.flush();
  if (!out.good()) throw io_error("failed writing " + path.string());
}

std::string join_doubles(const std::vector<double>& xs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) os << ',';
    os << fmt(xs[i]);
  }
  return os.str();
}

}  // namespace

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kMm:
      return "mm";
    case Algorithm::kAiwf:
      return "aiwf";
    case Algorithm::kHd:
      return "hd";
  }
  return "unknown";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "mm") return Algorithm::kMm;
  if (name == "aiwf") return Algorithm::kAiwf;
  if (name == "hd") return Algorithm::kHd;
  throw usage_error("unknown solver '" + name + "' (expected mm, aiwf or hd)");
}

bool is_sweep_parameter(const std::string& name) {
  return name == "P_D_dbm" || name == "P_U_dbm" || name == "C_SI_db" ||
         name == "L_cci_db";
}

ScenarioConfig apply_sweep(ScenarioConfig base, const std::string& parameter,
                           double value) {
  if (parameter == "P_D_dbm") {
    base.p_d_dbm = value;
  } else if (parameter == "P_U_dbm") {
    base.p_u_dbm = {value};
  } else if (parameter == "C_SI_db") {
    base.c_si_db = value;
  } else if (parameter == "L_cci_db") {
    base.l_cci_db = value;
  } else {
    throw usage_error("unknown sweep parameter '" + parameter + "'");
  }
  return base;
}

void ExperimentSpec::validate() const {
  scenario.validate();
  solver.validate();
  if (trials < 1) throw config_error("trials must be >= 1");
  if (solvers.empty()) throw config_error("solver set must not be empty");
  if (sweep) {
    if (!is_sweep_parameter(sweep->parameter)) {
      throw config_error("unknown sweep parameter '" + sweep->parameter +
                         "' (expected P_D_dbm, P_U_dbm, C_SI_db or L_cci_db)");
    }
    if (sweep->values.empty()) {
      throw config_error("sweep needs at least one value");
    }
    for (double v : sweep->values) {
      if (!std::isfinite(v)) throw config_error("sweep values must be finite");
    }
  }
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();

  std::vector<double> values = {0.0};
  if (spec.sweep) values = spec.sweep->values;
  const std::size_t n_vals = values.size();
  const std::size_t n_algos = spec.solvers.size();
  const std::size_t trials = static_cast<std::size_t>(spec.trials);

  // Resolve per-sweep-value scenarios upfront so configuration problems
  // surface before any solver runs.
  std::vector<ScenarioConfig> cfgs(n_vals);
  std::vector<DerivedVariances> vars(n_vals);
  std::vector<PowerBudgets> buds(n_vals);
  for (std::size_t vi = 0; vi < n_vals; ++vi) {
    cfgs[vi] = spec.sweep
                   ? apply_sweep(spec.scenario, spec.sweep->parameter,
                                 values[vi])
                   : spec.scenario;
    vars[vi] = derive_variances(cfgs[vi]);
    buds[vi] = power_budgets(cfgs[vi]);
  }

  const bool to_files = !spec.output_dir.empty();
  if (to_files) {
    std::error_code ec;
    std::filesystem::create_directories(spec.output_dir, ec);
    if (ec) {
      throw io_error("cannot create " + spec.output_dir.string() + ": " +
                     ec.message());
    }
    write_file(spec.output_dir / "manifest", manifest_string(spec));
  }

  ExperimentResult out;
  out.records.resize(n_vals * trials * n_algos);
  out.traces.resize(out.records.size());

  auto run_item = [&](std::size_t w) {
    const std::size_t vi = w / trials;
    const std::size_t trial = w % trials;
    const ChannelSet ch = gen_channels(cfgs[vi], vars[vi], trial);

    for (std::size_t ai = 0; ai < n_algos; ++ai) {
      const std::size_t slot = w * n_algos + ai;
      TrialRecord rec;
      if (spec.sweep) rec.sweep_value = values[vi];
      rec.trial = static_cast<int>(trial);
      rec.seed = trial_seed(cfgs[vi].master_seed, trial);
      rec.algo = spec.solvers[ai];

      const auto t0 = Clock::now();
      try {
        switch (rec.algo) {
          case Algorithm::kMm:
          case Algorithm::kAiwf: {
            SolverResult r = rec.algo == Algorithm::kMm
                                 ? mm_run(ch, buds[vi], spec.solver)
                                 : aiwf_run(ch, buds[vi], spec.solver);
            rec.r_u = r.r_u;
            rec.r_d = r.r_du;
            rec.f = r.f;
            rec.outer_iters =
                static_cast<int>(r.trace.points.size()) - 1;
            rec.converged = r.trace.reason == StopReason::kConverged;
            try {
              InterferenceRatios rho = interference_ratios(ch, r.cov);
              rec.rho_si_db = rho.rho_si_db;
              rec.rho_cci_db = rho.rho_cci_db;
            } catch (const undefined_ratio_error&) {
              rec.rho_si_db = kNan;
              rec.rho_cci_db = kNan;
            }
            out.traces[slot] = std::move(r.trace);
            break;
          }
          case Algorithm::kHd: {
            HdResult h = hd_baseline(ch, buds[vi], spec.solver);
            rec.r_u = 0.5 * h.r_mac;
            rec.r_d = 0.5 * h.r_bc;
            rec.f = h.sum_rate;
            rec.outer_iters =
                static_cast<int>(h.trace.points.size()) - 1;
            rec.converged = h.trace.reason == StopReason::kConverged;
            rec.rho_si_db = kNegInf;  // nothing transmits concurrently
            rec.rho_cci_db = kNegInf;
            out.traces[slot] = std::move(h.trace);
            break;
          }
        }
      } catch (const std::exception&) {
        rec.failed = true;
        rec.converged = false;
        rec.r_u = rec.r_d = rec.f = kNan;
        rec.rho_si_db = rec.rho_cci_db = kNan;
      }
      rec.wall_ms = ms_since(t0);
      out.records[slot] = std::move(rec);
    }
  };

  const long total = static_cast<long>(n_vals * trials);
  if (spec.exec == ExecutionMode::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (long w = 0; w < total; ++w) {
      run_item(static_cast<std::size_t>(w));
    }
  } else {
    for (long w = 0; w < total; ++w) {
      run_item(static_cast<std::size_t>(w));
    }
  }

  for (const TrialRecord& r : out.records) out.any_failed |= r.failed;

  if (to_files) {
    write_file(spec.output_dir / "results.csv", results_csv(out.records));

    std::ostringstream timings;
    timings << "sweep_value,trial,seed,algorithm,wall_ms\n";
    for (const TrialRecord& r : out.records) {
      if (r.sweep_value) timings << fmt(*r.sweep_value);
      timings << ',' << r.trial << ',' << r.seed << ','
              << algorithm_name(r.algo) << ',' << fmt(r.wall_ms) << '\n';
    }
    write_file(spec.output_dir / "timings.csv", timings.str());

    if (spec.emit_traces) {
      for (std::size_t slot = 0; slot < out.records.size(); ++slot) {
        const TrialRecord& r = out.records[slot];
        if (r.failed) continue;
        std::ostringstream name;
        name << "trace_" << algorithm_name(r.algo) << '_' << r.trial;
        if (spec.sweep) {
          name << "_v" << (slot / n_algos) / trials;
        }
        name << ".csv";
        write_file(spec.output_dir / name.str(), trace_csv(out.traces[slot]));
      }
    }
  }
  return out;
}

ExperimentSpec preset(const std::string& name) {
  ExperimentSpec spec;
  spec.trials = 100;
  if (name == "fig4") {
    spec.solvers = {Algorithm::kMm, Algorithm::kAiwf};
    spec.emit_traces = true;
  } else if (name == "fig5a") {
    spec.solvers = {Algorithm::kMm, Algorithm::kAiwf};
    spec.sweep = SweepSpec{"P_D_dbm", {12, 15, 18, 21, 24, 27, 30, 33}};
  } else if (name == "fig5b") {
    spec.solvers = {Algorithm::kMm, Algorithm::kAiwf};
    spec.sweep = SweepSpec{"P_U_dbm", {8, 11, 14, 17, 20, 23, 26}};
  } else if (name == "fig6a") {
    spec.solvers = {Algorithm::kMm, Algorithm::kAiwf, Algorithm::kHd};
    spec.sweep = SweepSpec{"C_SI_db", {110, 105, 100, 95, 90, 85, 80}};
  } else if (name == "fig6b") {
    spec.solvers = {Algorithm::kMm, Algorithm::kAiwf, Algorithm::kHd};
    spec.sweep = SweepSpec{"L_cci_db", {107, 102, 97, 92, 87, 82, 77}};
  } else {
    throw usage_error("unknown preset '" + name +
                      "' (available: fig4, fig5a, fig5b, fig6a, fig6b)");
  }
  return spec;
}

std::string results_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream os;
  os << "sweep_value,trial,seed,algorithm,r_u,r_d,f,rho_si_db,rho_cci_db,"
        "outer_iters,converged,failed\n";
  for (const TrialRecord& r : records) append_record(os, r);
  return os.str();
}

std::string manifest_string(const ExperimentSpec& spec) {
  const ScenarioConfig& sc = spec.scenario;
  std::ostringstream os;
  os << "# experiment manifest, artifact version " << kArtifactVersion
     << "\n";
  os << "# rerun: fdmimo_cli run --config <this file> --out <dir>\n";
  os << "[run]\n";
  os << "bs_antennas=" << sc.bs_antennas << '\n';
  os << "user_antennas=" << sc.user_antennas << '\n';
  os << "uplink_users=" << sc.uplink_users << '\n';
  os << "downlink_users=" << sc.downlink_users << '\n';
  os << "p_d_dbm=" << fmt(sc.p_d_dbm) << '\n';
  os << "p_u_dbm=\"" << join_doubles(sc.p_u_dbm) << "\"\n";
  os << "c_si_db=" << fmt(sc.c_si_db) << '\n';
  if (sc.l_bs_user_db) os << "l_bs_user_db=" << fmt(*sc.l_bs_user_db) << '\n';
  if (sc.d_bs_user_km) os << "d_bs_user_km=" << fmt(*sc.d_bs_user_km) << '\n';
  if (sc.l_cci_db) os << "l_cci_db=" << fmt(*sc.l_cci_db) << '\n';
  if (sc.d_cci_km) os << "d_cci_km=" << fmt(*sc.d_cci_km) << '\n';
  os << "seed=" << sc.master_seed << '\n';
  os << "trials=" << spec.trials << '\n';
  std::string solver_names;
  for (std::size_t i = 0; i < spec.solvers.size(); ++i) {
    if (i > 0) solver_names += ',';
    solver_names += algorithm_name(spec.solvers[i]);
  }
  os << "solvers=\"" << solver_names << "\"\n";
  if (spec.sweep) {
    os << "sweep_parameter=\"" << spec.sweep->parameter << "\"\n";
    os << "sweep_values=\"" << join_doubles(spec.sweep->values) << "\"\n";
  }
  os << "outer_tol=" << fmt(spec.solver.outer_tol) << '\n';
  os << "max_outer_iters=" << spec.solver.max_outer_iters << '\n';
  os << "inner_fw_gap_tol=" << fmt(spec.solver.inner_fw_gap_tol) << '\n';
  os << "inner_fw_max_iters=" << spec.solver.inner_fw_max_iters << '\n';
  os << "refresh-mode=\""
     << (spec.solver.refresh_mode == RefreshMode::kPerIteration
             ? "per-iteration"
             : "frozen")
     << "\"\n";
  const char* init = "uniform";
  if (spec.solver.init_mode == InitMode::kZero) init = "zero";
  if (spec.solver.init_mode == InitMode::kRandom) init = "random";
  os << "init_mode=\"" << init << "\"\n";
  os << "init_seed=" << spec.solver.init_seed << '\n';
  os << "emit_traces=" << (spec.emit_traces ? "true" : "false") << '\n';
  os << "exec=\""
     << (spec.exec == ExecutionMode::kParallel ? "parallel" : "serial")
     << "\"\n";
  return os.str();
}

}  // namespace fdmimo
