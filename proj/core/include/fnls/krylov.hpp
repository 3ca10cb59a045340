#pragma once

// Krylov solvers for the per-step linear systems.
//
// COCG and COCR target complex symmetric matrices and use the unconjugated bilinear form
// <x, y> = sum_k x_k y_k; each iteration costs one matrix-vector product. Bi-CGSTAB works
// for any nonsingular matrix, uses the Hermitian inner product (x, y) = sum_k conj(x_k) y_k,
// and costs two products per iteration.
//
// All three accept an optional preconditioner z = M^{-1} r. An empty preconditioner means
// M = I and executes the same code path with a plain copy.

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnls/grid_spectral.hpp"

namespace fnls {

/// out = A in. Must not assume `in` and `out` are distinct unless the caller guarantees it;
/// the solvers always pass distinct buffers.
using LinearMap = std::function<void(std::span<const Complex> in, std::span<Complex> out)>;

/// Called after every iteration with the iteration number (1-based) and the current iterate.
using IterationObserver = std::function<void(int iteration, std::span<const Complex> x)>;

enum class KrylovMethod { Cocg, Cocr, BiCgStab };

struct SolverConfig {
  double rel_tol = 1e-10;
  int max_iters = 1000;
  KrylovMethod method = KrylovMethod::Cocg;
  bool preconditioned = false;

  void validate() const;
};

struct SolverReport {
  bool converged = false;
  int iterations = 0;
  int matvec_count = 0;
  /// Relative 2-norm residual ||r_n|| / ||b||; entry 0 is the initial residual.
  std::vector<double> residual_history;

  double final_residual() const { return residual_history.empty() ? 0.0 : residual_history.back(); }
};

struct SolveResult {
  std::vector<Complex> x;
  SolverReport report;
};

/// A pivot fell below 1e-300 in magnitude. Carries the report up to the failing iteration.
class BreakdownError : public std::runtime_error {
 public:
  BreakdownError(const std::string& what, SolverReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const SolverReport& report() const { return report_; }

 private:
  SolverReport report_;
};

/// Pivot magnitude below which a recurrence is treated as broken down.
inline constexpr double kBreakdownThreshold = 1e-300;

SolveResult cocg(const LinearMap& a, std::span<const Complex> b, std::span<const Complex> x0,
                 const LinearMap& precond, const SolverConfig& cfg, const IterationObserver& observer = {});

SolveResult cocr(const LinearMap& a, std::span<const Complex> b, std::span<const Complex> x0,
                 const LinearMap& precond, const SolverConfig& cfg, const IterationObserver& observer = {});

SolveResult bicgstab(const LinearMap& a, std::span<const Complex> b, std::span<const Complex> x0,
                     const LinearMap& precond, const SolverConfig& cfg, const IterationObserver& observer = {});

/// Dispatches on cfg.method. The preconditioner is used only when cfg.preconditioned is set.
SolveResult krylov_solve(const LinearMap& a, std::span<const Complex> b, std::span<const Complex> x0,
                         const LinearMap& precond, const SolverConfig& cfg, const IterationObserver& observer = {});

const char* to_string(KrylovMethod method);
KrylovMethod parse_krylov_method(const std::string& name);

}  // namespace fnls
