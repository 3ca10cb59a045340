#pragma once

// Time integrators for u_t = -i (-Delta)^{alpha/2} u + i |u|^{2 rho} u on a periodic domain.
//
//  * cn_start      Crank-Nicolson step (nonlinear, solved by Picard sweeps). Conserves the
//                  discrete mass and the single-level energy; supplies the starting levels.
//  * li_step       Linearly implicit two-step scheme (rho = 1). One linear solve per step;
//                  conserves M_d(U^(n+1)) = M_d(U^(n-1)) and H_d(U^(n+1), U^(n)) = H_d(U^(n), U^(n-1)).
//  * li_rho_step   (rho+1)-step generalisation for the |u|^{2 rho} u nonlinearity.
//  * integrate     Starter followed by the multistep scheme up to t_end, with diagnostics.

#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnls/grid_spectral.hpp"
#include "fnls/invariants.hpp"
#include "fnls/krylov.hpp"
#include "fnls/operators.hpp"

namespace fnls {

/// How each linear step system is solved.
enum class Strategy {
  OriginalCocg,                ///< COCG on (I + i h (Lambda - D)) x = b
  OriginalCocr,                ///< COCR on the same system
  OriginalBiCgStab,            ///< Bi-CGSTAB on the same system
  TransformedPrecondBiCgStab,  ///< Bi-CGSTAB on F A F^{-1} y = F b with M = I + i h diag(d)
  TransformedPrecondCocg,      ///< COCG on the transformed system with the same M
};

const char* to_string(Strategy s);
Strategy parse_strategy(const std::string& name);
bool is_transformed(Strategy s);
KrylovMethod method_of(Strategy s);

/// u0(x) = amplitude * exp(i wavenumber x) * sech(width (x - center)).
struct ModulatedSech {
  double amplitude = 2.0;
  double wavenumber = 0.5;
  double width = std::numbers::sqrt2;
  double center = 10.0;

  Complex operator()(double x) const;
  StateVector sample(const Grid& grid) const;

  friend bool operator==(const ModulatedSech&, const ModulatedSech&) = default;
};

struct ProblemSpec {
  Grid grid;
  double alpha = 2.0;
  int rho = 1;
  double dt = 0.02;
  double t_end = 1.0;
  ModulatedSech initial{};

  void validate() const;
  /// Number of time steps, round(t_end / dt).
  long steps() const;
};

/// The last rho+1 levels, newest first: history[0] = U^(n), history[rho] = U^(n-rho).
struct SchemeState {
  long step = 0;
  double time = 0.0;
  std::vector<StateVector> history;
};

struct StepResult {
  StateVector next;
  SolverReport report;
};

/// Linear solve failed (no convergence within max_iters, or breakdown) at a given step.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, long step, SolverReport report)
      : std::runtime_error(what), step_(step), report_(std::move(report)) {}
  long step() const { return step_; }
  const SolverReport& report() const { return report_; }

 private:
  long step_;
  SolverReport report_;
};

struct StarterConfig {
  /// Max-norm tolerance on U1 - U0 + i dt (Lambda V - g V), V = (U1 + U0) / 2.
  double nl_tol = 1e-10;
  int nl_max = 100;
  /// Inner solves use transformed, preconditioned Bi-CGSTAB regardless of the run strategy.
  SolverConfig inner{1e-12, 1000, KrylovMethod::BiCgStab, true};
};

struct StarterDiagnostics {
  int sweeps = 0;
  double residual = 0.0;
  int inner_iterations = 0;
};

struct StarterResult {
  StateVector next;
  StarterDiagnostics diagnostics;
};

/// Picard iteration for the Crank-Nicolson step did not reach nl_tol.
class StarterFailure : public std::runtime_error {
 public:
  StarterFailure(const std::string& what, StateVector last, double residual)
      : std::runtime_error(what), last_(std::move(last)), residual_(residual) {}
  const StateVector& last_iterate() const { return last_; }
  double residual() const { return residual_; }

 private:
  StateVector last_;
  double residual_;
};

/// Solves (I + i h (Lambda - D)) x = (I - i h (Lambda - D)) u_old starting from `guess`.
/// `symbol` must have s = alpha. Works for any finite h, including negative values.
StepResult solve_step_system(const FractionalSymbol& symbol, double h, std::vector<double> density,
                             const StateVector& u_old, const StateVector& guess, Strategy strategy,
                             const SolverConfig& cfg, const IterationObserver& observer = {});

/// Caches the symbols for one (grid, alpha, dt) and performs steps of every kind.
class Stepper {
 public:
  Stepper(ProblemSpec spec, SolverConfig cfg, Strategy strategy);

  const ProblemSpec& spec() const { return spec_; }
  const FractionalSymbol& symbol() const { return symbol_; }
  Strategy strategy() const { return strategy_; }
  const SolverConfig& solver_config() const { return cfg_; }

  /// One Crank-Nicolson step of length dt from u0.
  StarterResult crank_nicolson(const StateVector& u0, const StarterConfig& cfg) const;
  /// One step of the (rho+1)-step linearly implicit scheme; rho = spec().rho.
  StepResult advance(const SchemeState& state) const;

 private:
  ProblemSpec spec_;
  SolverConfig cfg_;
  Strategy strategy_;
  FractionalSymbol symbol_;
};

/// max_k |U1 - U0 + i dt (Lambda V - g V)_k| with V = (U1+U0)/2 and the discrete-gradient
/// density g = sum_{j=0..rho} |U1|^{2j} |U0|^{2(rho-j)} / (rho+1).
double crank_nicolson_residual(const FractionalSymbol& symbol, double dt, int rho, const StateVector& u0,
                               const StateVector& u1);

StarterResult cn_start(const StateVector& u0, const ProblemSpec& spec, const StarterConfig& cfg = {});
StepResult li_step(const SchemeState& state, const ProblemSpec& spec, const SolverConfig& cfg, Strategy strategy);
StepResult li_rho_step(const SchemeState& state, const ProblemSpec& spec, const SolverConfig& cfg,
                       Strategy strategy);

struct StepRecord {
  /// Scheme index n: this solve produced U^(n+1).
  long step = 0;
  SolverReport report;
};

struct Snapshot {
  long step = 0;
  double time = 0.0;
  StateVector state;
};

struct ProbeOptions {
  /// Store a snapshot every this many steps (0 disables the cadence); the final level is always kept.
  long snapshot_every = 25;
  /// Extra snapshot times, rounded to the nearest step.
  std::vector<double> probe_times;
  bool record_invariants = true;
  /// Record the failure in the trajectory and stop instead of throwing.
  bool stop_on_failure = false;
  StarterConfig starter{};
};

struct Trajectory {
  std::vector<InvariantSample> invariants;
  std::vector<StepRecord> solver_steps;
  std::vector<Snapshot> snapshots;
  std::vector<StarterDiagnostics> starter;
  StateVector final_state;
  long final_step = 0;
  std::optional<std::string> failure;
  /// Wall-clock seconds of the linearly implicit steps only (starter excluded).
  double linear_seconds = 0.0;
};

/// Starter (rho Crank-Nicolson steps) followed by the linearly implicit scheme to t_end.
Trajectory integrate(const ProblemSpec& spec, const SolverConfig& cfg, Strategy strategy,
                     const ProbeOptions& probes = {});

/// Fully nonlinear Crank-Nicolson integration to t_end; used for reference solutions.
Trajectory integrate_crank_nicolson(const ProblemSpec& spec, const ProbeOptions& probes = {});

}  // namespace fnls
