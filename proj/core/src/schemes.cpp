#include "fnls/schemes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fnls {

namespace {

constexpr Complex kI{0.0, 1.0};

SolverConfig config_for(Strategy strategy, const SolverConfig& base) {
  SolverConfig cfg = base;
  cfg.method = method_of(strategy);
  if (is_transformed(strategy)) cfg.preconditioned = true;
  return cfg;
}

// g = sum_{j=0..rho} a^j b^(rho-j) / (rho+1) with a = |U1|^2, b = |U0|^2.
std::vector<double> discrete_gradient_density(const StateVector& u0, const StateVector& u1, int rho) {
  std::vector<double> g(u0.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double a = std::norm(u1[k]);
    const double b = std::norm(u0[k]);
    double sum = 0.0;
    for (int j = 0; j <= rho; ++j) sum += std::pow(a, j) * std::pow(b, rho - j);
    g[k] = sum / static_cast<double>(rho + 1);
  }
  return g;
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::OriginalCocg:
      return "original_cocg";
    case Strategy::OriginalCocr:
      return "original_cocr";
    case Strategy::OriginalBiCgStab:
      return "original_bicgstab";
    case Strategy::TransformedPrecondBiCgStab:
      return "transformed_precond_bicgstab";
    case Strategy::TransformedPrecondCocg:
      return "transformed_precond_cocg";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& name) {
  for (auto s : {Strategy::OriginalCocg, Strategy::OriginalCocr, Strategy::OriginalBiCgStab,
                 Strategy::TransformedPrecondBiCgStab, Strategy::TransformedPrecondCocg}) {
    if (name == to_string(s)) return s;
  }
  throw DomainError("unknown strategy '" + name + "'");
}

bool is_transformed(Strategy s) {
  return s == Strategy::TransformedPrecondBiCgStab || s == Strategy::TransformedPrecondCocg;
}

KrylovMethod method_of(Strategy s) {
  switch (s) {
    case Strategy::OriginalCocg:
    case Strategy::TransformedPrecondCocg:
      return KrylovMethod::Cocg;
    case Strategy::OriginalCocr:
      return KrylovMethod::Cocr;
    case Strategy::OriginalBiCgStab:
    case Strategy::TransformedPrecondBiCgStab:
      return KrylovMethod::BiCgStab;
  }
  throw DomainError("method_of: unknown strategy");
}

Complex ModulatedSech::operator()(double x) const {
  return amplitude * std::exp(kI * (wavenumber * x)) / std::cosh(width * (x - center));
}

StateVector ModulatedSech::sample(const Grid& grid) const {
  StateVector u(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) u[j] = (*this)(grid.node(j));
  return u;
}

void ProblemSpec::validate() const {
  require_levy_index(alpha);
  if (rho < 1) throw DomainError("rho must be a positive integer");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
  if (!(t_end >= dt * (1.0 - 1e-12))) throw DomainError("t_end must be at least dt");
}

long ProblemSpec::steps() const { return std::lround(t_end / dt); }

StepResult solve_step_system(const FractionalSymbol& symbol, double h, std::vector<double> density,
                             const StateVector& u_old, const StateVector& guess, Strategy strategy,
                             const SolverConfig& base, const IterationObserver& observer) {
  const Grid& grid = symbol.grid();
  detail::require_size(u_old.size(), grid.size(), "solve_step_system u_old");
  detail::require_size(guess.size(), grid.size(), "solve_step_system guess");
  const SolverConfig cfg = config_for(strategy, base);
  StepOperator op(symbol, h, std::move(density));
  StateVector b = rhs_build(op, u_old);

  if (!is_transformed(strategy)) {
    const LinearMap a = [&op](std::span<const Complex> in, std::span<Complex> out) { op.apply(in, out); };
    LinearMap m;
    std::optional<JacobiPreconditioner> jacobi;
    if (cfg.preconditioned) {
      jacobi.emplace(op);
      m = [&jacobi](std::span<const Complex> in, std::span<Complex> out) { jacobi->solve(in, out); };
    }
    auto res = krylov_solve(a, b.span(), guess.span(), m, cfg, observer);
    return {StateVector(std::move(res.x)), std::move(res.report)};
  }

  // Transformed system: unitary F keeps relative residuals identical, so the stopping test
  // is applied in Fourier space and x = F^{-1} y is formed once at the end.
  const TransformedOperator top(op);
  const DiagonalPreconditioner precond(symbol, h);
  const auto& fft = grid.transform();
  std::vector<Complex> fb(grid.size()), y0(grid.size());
  fft.forward(b.span(), fb);
  fft.forward(guess.span(), y0);
  const LinearMap a = [&top](std::span<const Complex> in, std::span<Complex> out) { top.apply(in, out); };
  const LinearMap m = [&precond](std::span<const Complex> in, std::span<Complex> out) { precond.solve(in, out); };
  auto res = krylov_solve(a, fb, y0, m, cfg, observer);
  StateVector x(grid.size());
  fft.inverse(res.x, x.span());
  return {std::move(x), std::move(res.report)};
}

Stepper::Stepper(ProblemSpec spec, SolverConfig cfg, Strategy strategy)
    : spec_(std::move(spec)), cfg_(cfg), strategy_(strategy), symbol_(build_symbol(spec_.grid, spec_.alpha)) {
  spec_.validate();
  cfg_.validate();
}

double crank_nicolson_residual(const FractionalSymbol& symbol, double dt, int rho, const StateVector& u0,
                               const StateVector& u1) {
  const std::size_t n = u0.size();
  detail::require_size(u1.size(), n, "crank_nicolson_residual");
  const auto g = discrete_gradient_density(u0, u1, rho);
  std::vector<Complex> v(n), w(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = 0.5 * (u1[k] + u0[k]);
  symbol.apply(v, w);
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex r = u1[k] - u0[k] + kI * dt * (w[k] - g[k] * v[k]);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

StarterResult Stepper::crank_nicolson(const StateVector& u0, const StarterConfig& cfg) const {
  detail::require_size(u0.size(), spec_.grid.size(), "cn_start");
  const double dt = spec_.dt;
  const int rho = spec_.rho;
  StarterResult out{u0, {}};
  StateVector& u1 = out.next;
  auto& diag = out.diagnostics;
  // Picard: freeze g at the current iterate, solve the linear CN system, repeat.
  while (true) {
    diag.residual = crank_nicolson_residual(symbol_, dt, rho, u0, u1);
    if (diag.residual <= cfg.nl_tol) return out;
    if (diag.sweeps >= cfg.nl_max) {
      throw StarterFailure("Crank-Nicolson fixed-point iteration did not converge in " + std::to_string(cfg.nl_max) +
                               " sweeps (residual " + std::to_string(diag.residual) + ")",
                           u1, diag.residual);
    }
    StepResult step;
    try {
      step = solve_step_system(symbol_, 0.5 * dt, discrete_gradient_density(u0, u1, rho), u0, u1,
                               Strategy::TransformedPrecondBiCgStab, cfg.inner);
    } catch (const BreakdownError& e) {
      throw StarterFailure(std::string("Crank-Nicolson inner linear solve broke down: ") + e.what(), u1,
                           diag.residual);
    }
    if (!step.report.converged) {
      throw StarterFailure("Crank-Nicolson inner linear solve did not converge", u1, diag.residual);
    }
    diag.inner_iterations += step.report.iterations;
    ++diag.sweeps;
    u1 = std::move(step.next);
  }
}

StepResult Stepper::advance(const SchemeState& state) const {
  const int rho = spec_.rho;
  if (state.history.size() != static_cast<std::size_t>(rho) + 1) {
    throw DimensionError("advance: history must hold rho+1 levels");
  }
  const std::size_t n = spec_.grid.size();
  std::vector<double> density(n, 1.0);
  for (int i = 0; i < rho; ++i) {
    const auto& level = state.history[static_cast<std::size_t>(i)];
    detail::require_size(level.size(), n, "advance history");
    for (std::size_t k = 0; k < n; ++k) density[k] *= std::norm(level[k]);
  }
  const double h = static_cast<double>(rho + 1) * spec_.dt / 2.0;
  try {
    auto result = solve_step_system(symbol_, h, std::move(density), state.history.back(), state.history.front(),
                                    strategy_, cfg_);
    if (!result.report.converged) {
      throw StepFailure("linear solve did not converge within " + std::to_string(cfg_.max_iters) +
                            " iterations at step " + std::to_string(state.step),
                        state.step, result.report);
    }
    return result;
  } catch (const BreakdownError& e) {
    throw StepFailure(std::string(e.what()) + " at step " + std::to_string(state.step), state.step, e.report());
  }
}

StarterResult cn_start(const StateVector& u0, const ProblemSpec& spec, const StarterConfig& cfg) {
  return Stepper(spec, cfg.inner, Strategy::TransformedPrecondBiCgStab).crank_nicolson(u0, cfg);
}

StepResult li_step(const SchemeState& state, const ProblemSpec& spec, const SolverConfig& cfg, Strategy strategy) {
  if (spec.rho != 1) throw DomainError("li_step: cubic scheme requires rho = 1; use li_rho_step");
  return Stepper(spec, cfg, strategy).advance(state);
}

StepResult li_rho_step(const SchemeState& state, const ProblemSpec& spec, const SolverConfig& cfg,
                       Strategy strategy) {
  return Stepper(spec, cfg, strategy).advance(state);
}

namespace {

class Recorder {
 public:
  Recorder(const ProblemSpec& spec, const ProbeOptions& probes, Trajectory& traj)
      : spec_(spec), probes_(probes), traj_(traj), energy_(spec.grid, spec.alpha), last_(spec.steps()) {
    for (double t : probes.probe_times) probe_steps_.push_back(std::lround(t / spec.dt));
  }

  // history: newest first, history[0] is level `step`.
  void record(long step, const std::vector<StateVector>& history) {
    const double t = static_cast<double>(step) * spec_.dt;
    if (probes_.record_invariants) {
      InvariantSample s;
      s.step = step;
      s.time = t;
      s.mass = energy_.mass(history.front());
      s.single_step_energy = energy_.single(history.front());
      const auto rho = static_cast<std::size_t>(spec_.rho);
      if (history.size() > rho) {
        s.two_step_energy = rho == 1 ? energy_.two_step(history[0], history[1])
                                     : energy_.multi_step(std::span(history).first(rho + 1), spec_.rho);
      }
      traj_.invariants.push_back(s);
    }
    const bool cadence = probes_.snapshot_every > 0 && step % probes_.snapshot_every == 0;
    const bool probed = std::find(probe_steps_.begin(), probe_steps_.end(), step) != probe_steps_.end();
    if (cadence || probed || step == last_) traj_.snapshots.push_back({step, t, history.front()});
    traj_.final_state = history.front();
    traj_.final_step = step;
  }

 private:
  const ProblemSpec& spec_;
  const ProbeOptions& probes_;
  Trajectory& traj_;
  EnergyFunctional energy_;
  long last_;
  std::vector<long> probe_steps_;
};

void push_front_bounded(std::vector<StateVector>& history, StateVector level, std::size_t cap) {
  history.insert(history.begin(), std::move(level));
  if (history.size() > cap) history.pop_back();
}

}  // namespace

Trajectory integrate(const ProblemSpec& spec, const SolverConfig& cfg, Strategy strategy, const ProbeOptions& probes) {
  spec.validate();
  Trajectory traj;
  const Stepper stepper(spec, cfg, strategy);
  Recorder recorder(spec, probes, traj);
  const long total = spec.steps();
  const auto levels = static_cast<std::size_t>(spec.rho) + 1;

  std::vector<StateVector> history{spec.initial.sample(spec.grid)};
  recorder.record(0, history);

  long n = 0;
  try {
    for (; n < std::min<long>(spec.rho, total); ++n) {
      auto start = stepper.crank_nicolson(history.front(), probes.starter);
      traj.starter.push_back(start.diagnostics);
      push_front_bounded(history, std::move(start.next), levels);
      recorder.record(n + 1, history);
    }
    const auto t0 = std::chrono::steady_clock::now();
    for (; n < total; ++n) {
      SchemeState state{n, static_cast<double>(n) * spec.dt, history};
      auto step = stepper.advance(state);
      traj.solver_steps.push_back({n, std::move(step.report)});
      push_front_bounded(history, std::move(step.next), levels);
      recorder.record(n + 1, history);
    }
    traj.linear_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } catch (const StepFailure& e) {
    if (!probes.stop_on_failure) throw;
    traj.solver_steps.push_back({e.step(), e.report()});
    traj.failure = e.what();
  } catch (const StarterFailure& e) {
    if (!probes.stop_on_failure) throw;
    traj.failure = e.what();
  }
  return traj;
}

Trajectory integrate_crank_nicolson(const ProblemSpec& spec, const ProbeOptions& probes) {
  spec.validate();
  Trajectory traj;
  const Stepper stepper(spec, probes.starter.inner, Strategy::TransformedPrecondBiCgStab);
  Recorder recorder(spec, probes, traj);
  std::vector<StateVector> history{spec.initial.sample(spec.grid)};
  recorder.record(0, history);
  const auto levels = static_cast<std::size_t>(spec.rho) + 1;
  for (long n = 0; n < spec.steps(); ++n) {
    auto step = stepper.crank_nicolson(history.front(), probes.starter);
    traj.starter.push_back(step.diagnostics);
    push_front_bounded(history, std::move(step.next), levels);
    recorder.record(n + 1, history);
  }
  return traj;
}

}  // namespace fnls
