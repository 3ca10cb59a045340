#pragma once

// Experiment drivers behind the `fnls` command-line tool. Each driver writes a result
// bundle (CSV tables plus manifest.txt) into RunConfig::output_dir.
//
// CSV schemas (one header line, comma separated, doubles in shortest round-trip form):
//   snapshots.csv    t,x,re,im,abs
//   invariants.csv   n,t,mass,H_two_step,H_single      (H_two_step empty until defined)
//   solver.csv       n,strategy,iterations,matvecs,final_residual,converged
//   convergence.csv  dt,max_error
// Supplementary tables: drift.csv, solver_summary.csv, convergence_fit.csv, timing.csv.
// Everything except timing.csv is bit-identical for identical configurations.

#include <filesystem>
#include <string>
#include <vector>

#include "fnls/run_config.hpp"
#include "fnls/schemes.hpp"

namespace fnls {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalFailure = 3;

struct ResultBundle {
  std::filesystem::path directory;
  std::vector<std::string> files;
  int exit_code = kExitOk;
  std::string message;
};

struct IterationSummary {
  long steps = 0;
  int max_iterations = 0;
  int min_iterations = 0;
  double average_iterations = 0.0;
  long total_matvecs = 0;
  bool all_converged = true;
};

IterationSummary summarize(const std::vector<StepRecord>& records);

struct ConvergencePoint {
  double dt = 0.0;
  double max_error = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergencePoint> points;
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares fit of log(error) = slope * log(dt) + intercept.
std::pair<double, double> fit_loglog(const std::vector<ConvergencePoint>& points);

/// Max-node error at t_end of the linearly implicit scheme against a Crank-Nicolson reference
/// computed on `ref_points` nodes with step `ref_dt`. ref_points must be an odd multiple of the
/// coarse N so that every coarse node is a reference node.
ConvergenceStudy convergence_study(const ProblemSpec& coarse, const std::vector<double>& dts, std::size_t ref_points,
                                   double ref_dt, const SolverConfig& cfg, Strategy strategy,
                                   const StarterConfig& starter = {});

/// Max-node distance between a coarse field and a reference field sampled at coincident nodes.
double coincident_max_error(const StateVector& coarse, const StateVector& reference);

ResultBundle run_evolve(const RunConfig& cfg);
ResultBundle run_convergence(const RunConfig& cfg);
ResultBundle run_solver_bench(const RunConfig& cfg);
ResultBundle run_invariant_drift(const RunConfig& cfg);
ResultBundle run_rho_demo(const RunConfig& cfg);
/// Dispatches on cfg.experiment. Numerical failures are reported through exit_code, never thrown.
ResultBundle run_experiment(const RunConfig& cfg);

const char* software_version();

}  // namespace fnls
