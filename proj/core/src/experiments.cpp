#include "fnls/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#ifndef FNLS_VERSION
#define FNLS_VERSION "unknown"
#endif

namespace fnls {

const char* software_version() { return FNLS_VERSION; }

namespace {

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) throw ConfigError("cannot write " + path.string());
    out_ << header << '\n';
  }

  template <class... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(fields), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  template <class T>
    requires std::is_integral_v<T>
  static std::string cell(T v) {
    return std::to_string(v);
  }
  static std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

  std::ofstream out_;
};

class BundleWriter {
 public:
  explicit BundleWriter(const RunConfig& cfg) : cfg_(cfg) {
    bundle_.directory = cfg.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(bundle_.directory, ec);
    if (ec) throw ConfigError("cannot create output directory " + cfg.output_dir + ": " + ec.message());
  }

  CsvWriter csv(const std::string& name, const std::string& header) {
    bundle_.files.push_back(name);
    return CsvWriter(bundle_.directory / name, header);
  }

  ResultBundle finish(int exit_code, std::string message) {
    bundle_.exit_code = exit_code;
    bundle_.message = std::move(message);
    std::ofstream m(bundle_.directory / "manifest.txt");
    m << "# fnls result manifest\n"
      << "# version = " << software_version() << "\n"
      << "# exit_code = " << exit_code << "\n"
      << "# status = " << (bundle_.message.empty() ? "ok" : bundle_.message) << "\n";
    for (const auto& f : bundle_.files) m << "# file = " << f << "\n";
    m << to_config_text(cfg_);
    bundle_.files.push_back("manifest.txt");
    return bundle_;
  }

 private:
  const RunConfig& cfg_;
  ResultBundle bundle_;
};

void write_invariants(BundleWriter& w, const Trajectory& traj) {
  auto csv = w.csv("invariants.csv", "n,t,mass,H_two_step,H_single");
  for (const auto& s : traj.invariants) csv.row(s.step, s.time, s.mass, s.two_step_energy, s.single_step_energy);
}

void write_solver(CsvWriter& csv, const Trajectory& traj, Strategy strategy) {
  for (const auto& r : traj.solver_steps) {
    csv.row(r.step, to_string(strategy), r.report.iterations, r.report.matvec_count, r.report.final_residual(),
            r.report.converged);
  }
}

void write_snapshots(BundleWriter& w, const Trajectory& traj, const Grid& grid) {
  auto csv = w.csv("snapshots.csv", "t,x,re,im,abs");
  for (const auto& snap : traj.snapshots) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const Complex z = snap.state[j];
      csv.row(snap.time, grid.node(j), z.real(), z.imag(), std::abs(z));
    }
  }
}

ProbeOptions probes_for(const RunConfig& cfg) {
  ProbeOptions p;
  p.snapshot_every = cfg.snapshot_every;
  p.stop_on_failure = true;
  p.starter = starter_config(cfg);
  return p;
}

ResultBundle finish_trajectory(BundleWriter& w, const Trajectory& traj) {
  if (traj.failure) return w.finish(kExitNumericalFailure, "numerical failure: " + *traj.failure);
  return w.finish(kExitOk, "");
}

}  // namespace

IterationSummary summarize(const std::vector<StepRecord>& records) {
  IterationSummary s;
  if (records.empty()) return s;
  s.steps = static_cast<long>(records.size());
  s.max_iterations = std::numeric_limits<int>::min();
  s.min_iterations = std::numeric_limits<int>::max();
  long total = 0;
  for (const auto& r : records) {
    s.max_iterations = std::max(s.max_iterations, r.report.iterations);
    s.min_iterations = std::min(s.min_iterations, r.report.iterations);
    total += r.report.iterations;
    s.total_matvecs += r.report.matvec_count;
    s.all_converged = s.all_converged && r.report.converged;
  }
  s.average_iterations = static_cast<double>(total) / static_cast<double>(s.steps);
  return s;
}

std::pair<double, double> fit_loglog(const std::vector<ConvergencePoint>& points) {
  if (points.size() < 2) throw DomainError("fit_loglog: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (const auto& p : points) {
    if (!(p.dt > 0.0) || !(p.max_error > 0.0)) throw DomainError("fit_loglog: values must be positive");
    const double x = std::log(p.dt);
    const double y = std::log(p.max_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

double coincident_max_error(const StateVector& coarse, const StateVector& reference) {
  if (coarse.size() == 0 || reference.size() % coarse.size() != 0) {
    throw DimensionError("coincident_max_error: reference size must be a multiple of the coarse size");
  }
  const std::size_t stride = reference.size() / coarse.size();
  double worst = 0.0;
  for (std::size_t j = 0; j < coarse.size(); ++j) worst = std::max(worst, std::abs(coarse[j] - reference[j * stride]));
  return worst;
}

ConvergenceStudy convergence_study(const ProblemSpec& coarse, const std::vector<double>& dts, std::size_t ref_points,
                                   double ref_dt, const SolverConfig& cfg, Strategy strategy,
                                   const StarterConfig& starter) {
  auto check_commensurate = [&](double h) {
    const double steps = coarse.t_end / h;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
      throw DomainError("convergence_study: t_end must be an integer multiple of every dt");
    }
  };
  ProbeOptions quiet;
  quiet.snapshot_every = 0;
  quiet.record_invariants = false;
  quiet.starter = starter;

  ProblemSpec ref = coarse;
  ref.grid = Grid(coarse.grid.length(), ref_points);
  ref.dt = ref_dt;
  check_commensurate(ref_dt);
  const StateVector reference = integrate_crank_nicolson(ref, quiet).final_state;

  ConvergenceStudy study;
  for (double h : dts) {
    check_commensurate(h);
    ProblemSpec run = coarse;
    run.dt = h;
    const auto traj = integrate(run, cfg, strategy, quiet);
    study.points.push_back({h, coincident_max_error(traj.final_state, reference)});
  }
  std::tie(study.slope, study.intercept) = fit_loglog(study.points);
  return study;
}

ResultBundle run_evolve(const RunConfig& cfg) {
  const auto spec = problem_spec(cfg);
  BundleWriter w(cfg);
  const auto traj = integrate(spec, solver_config(cfg), cfg.strategy, probes_for(cfg));
  write_snapshots(w, traj, spec.grid);
  write_invariants(w, traj);
  auto solver = w.csv("solver.csv", "n,strategy,iterations,matvecs,final_residual,converged");
  write_solver(solver, traj, cfg.strategy);
  auto timing = w.csv("timing.csv", "strategy,linear_seconds");
  timing.row(to_string(cfg.strategy), traj.linear_seconds);
  return finish_trajectory(w, traj);
}

ResultBundle run_convergence(const RunConfig& cfg) {
  const auto spec = problem_spec(cfg);
  BundleWriter w(cfg);
  try {
    const auto study = convergence_study(spec, cfg.dt_list, static_cast<std::size_t>(cfg.ref_points), cfg.ref_dt,
                                         solver_config(cfg), cfg.strategy, starter_config(cfg));
    auto table = w.csv("convergence.csv", "dt,max_error");
    for (const auto& p : study.points) table.row(p.dt, p.max_error);
    auto fit = w.csv("convergence_fit.csv", "slope,intercept");
    fit.row(study.slope, study.intercept);
    return w.finish(kExitOk, "");
  } catch (const StepFailure& e) {
    return w.finish(kExitNumericalFailure, std::string("numerical failure: ") + e.what());
  } catch (const StarterFailure& e) {
    return w.finish(kExitNumericalFailure, std::string("numerical failure: ") + e.what());
  }
}

ResultBundle run_solver_bench(const RunConfig& cfg) {
  const auto spec = problem_spec(cfg);
  BundleWriter w(cfg);
  auto solver = w.csv("solver.csv", "n,strategy,iterations,matvecs,final_residual,converged");
  auto summary =
      w.csv("solver_summary.csv", "strategy,steps,max_iterations,min_iterations,avg_iterations,total_matvecs,completed");
  auto timing = w.csv("timing.csv", "strategy,linear_seconds");
  std::string failures;
  for (Strategy s : cfg.strategies) {
    RunConfig per = cfg;
    per.strategy = s;
    auto probes = probes_for(cfg);
    probes.snapshot_every = 0;
    probes.record_invariants = false;
    const auto traj = integrate(spec, solver_config(per), s, probes);
    write_solver(solver, traj, s);
    const auto sum = summarize(traj.solver_steps);
    summary.row(to_string(s), sum.steps, sum.max_iterations, sum.min_iterations, sum.average_iterations,
                sum.total_matvecs, !traj.failure.has_value());
    timing.row(to_string(s), traj.linear_seconds);
    if (traj.failure) failures += std::string(failures.empty() ? "" : "; ") + to_string(s) + ": " + *traj.failure;
  }
  // Per-strategy failures are results of the benchmark, not failures of the run.
  return w.finish(kExitOk, failures);
}

ResultBundle run_invariant_drift(const RunConfig& cfg) {
  const auto spec = problem_spec(cfg);
  BundleWriter w(cfg);
  const auto traj = integrate(spec, solver_config(cfg), cfg.strategy, probes_for(cfg));
  write_invariants(w, traj);
  auto drift = w.csv("drift.csv", "n,t,mass_error,H_two_step_error,H_single_error");
  if (!traj.invariants.empty()) {
    const auto& first = traj.invariants.front();
    std::optional<double> h_ref;
    for (const auto& s : traj.invariants) {
      if (!h_ref && s.two_step_energy) h_ref = s.two_step_energy;
      std::optional<double> h_err;
      if (s.two_step_energy) h_err = std::abs(*s.two_step_energy - *h_ref);
      drift.row(s.step, s.time, std::abs(s.mass - first.mass), h_err,
                std::abs(s.single_step_energy - first.single_step_energy));
    }
  }
  auto solver = w.csv("solver.csv", "n,strategy,iterations,matvecs,final_residual,converged");
  write_solver(solver, traj, cfg.strategy);
  return finish_trajectory(w, traj);
}

ResultBundle run_rho_demo(const RunConfig& cfg) {
  const auto spec = problem_spec(cfg);
  BundleWriter w(cfg);
  const auto traj = integrate(spec, solver_config(cfg), cfg.strategy, probes_for(cfg));
  write_snapshots(w, traj, spec.grid);
  write_invariants(w, traj);
  // mass_shift_error = |M(U^(n)) - M(U^(n-rho-1))|, energy_shift_error = |H^rho(n) - H^rho(n-1)|.
  auto check = w.csv("rho_check.csv", "n,t,mass_shift_error,energy_shift_error");
  const auto& inv = traj.invariants;
  const auto lag = static_cast<std::size_t>(spec.rho) + 1;
  for (std::size_t i = lag; i < inv.size(); ++i) {
    std::optional<double> e;
    if (inv[i].two_step_energy && inv[i - 1].two_step_energy) {
      e = std::abs(*inv[i].two_step_energy - *inv[i - 1].two_step_energy);
    }
    check.row(inv[i].step, inv[i].time, std::abs(inv[i].mass - inv[i - lag].mass), e);
  }
  auto solver = w.csv("solver.csv", "n,strategy,iterations,matvecs,final_residual,converged");
  write_solver(solver, traj, cfg.strategy);
  return finish_trajectory(w, traj);
}

ResultBundle run_experiment(const RunConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::Evolve:
      return run_evolve(cfg);
    case ExperimentKind::Convergence:
      return run_convergence(cfg);
    case ExperimentKind::SolverBench:
      return run_solver_bench(cfg);
    case ExperimentKind::InvariantDrift:
      return run_invariant_drift(cfg);
    case ExperimentKind::RhoDemo:
      return run_rho_demo(cfg);
  }
  throw ConfigError("unknown experiment");
}

}  // namespace fnls
