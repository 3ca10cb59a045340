#pragma once

// Matrix-free operators for one linearly implicit time step.
//
// Every step of the schemes in this library solves
//
//     (I + i h (Lambda - D)) x = (I - i h (Lambda - D)) u_old
//
// where Lambda = F^{-1} diag(d) F is the discrete fractional Laplacian, D is a frozen
// nonnegative diagonal built from known time levels, and h is the step coefficient
// (dt for the two-step scheme, dt/2 for Crank-Nicolson, (rho+1) dt / 2 for the
// (rho+1)-step scheme). The operator is complex symmetric (A = A^T) but not Hermitian for
// h != 0, and every eigenvalue has real part exactly 1.

#include <span>
#include <vector>

#include "fnls/grid_spectral.hpp"

namespace fnls {

/// A = I + i h (Lambda - D(U)) acting on grid values.
class StepOperator {
 public:
  /// `symbol` must be built with s = alpha. `density` holds the diagonal of D(U), entries >= 0.
  StepOperator(FractionalSymbol symbol, double dt, std::vector<double> density);

  const Grid& grid() const { return symbol_.grid(); }
  const FractionalSymbol& symbol() const { return symbol_; }
  double alpha() const { return symbol_.exponent(); }
  double dt() const { return dt_; }
  std::span<const double> density() const { return density_; }
  std::size_t size() const { return density_.size(); }

  /// out = v + i h (Lambda v - D v). One forward and one inverse transform.
  void apply(std::span<const Complex> v, std::span<Complex> out) const;
  /// out = u - i h (Lambda u - D u).
  void rhs(std::span<const Complex> u_prev, std::span<Complex> out) const;

 private:
  FractionalSymbol symbol_;
  double dt_;
  std::vector<double> density_;
};

/// F A F^{-1} = I + i h diag(d) - i h F D(U) F^{-1}, acting on DFT coefficients y = F x.
class TransformedOperator {
 public:
  explicit TransformedOperator(StepOperator op) : op_(std::move(op)) {}

  const StepOperator& original() const { return op_; }
  std::size_t size() const { return op_.size(); }

  void apply(std::span<const Complex> y, std::span<Complex> out) const;

 private:
  StepOperator op_;
};

/// M = I + i h diag(d): the spectral part of the transformed operator.
class DiagonalPreconditioner {
 public:
  DiagonalPreconditioner(const FractionalSymbol& symbol, double dt);

  std::span<const Complex> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// out_p = z_p / m_p. `z` and `out` may alias.
  void solve(std::span<const Complex> z, std::span<Complex> out) const;

 private:
  std::vector<Complex> entries_;
};

/// Jacobi (main-diagonal) preconditioner for the original system. The diagonal of Lambda is
/// the mean of the symbol, so the entries are 1 + i h (mean(d) - D_kk).
class JacobiPreconditioner {
 public:
  explicit JacobiPreconditioner(const StepOperator& op);

  std::span<const Complex> entries() const { return entries_; }
  void solve(std::span<const Complex> z, std::span<Complex> out) const;

 private:
  std::vector<Complex> entries_;
};

StateVector step_apply(const StepOperator& op, const StateVector& v);
StateVector rhs_build(const StepOperator& op, const StateVector& u_prev);
SpectralCoeffs transformed_apply(const TransformedOperator& op, const SpectralCoeffs& y);
SpectralCoeffs precond_solve(const DiagonalPreconditioner& m, const SpectralCoeffs& z);

/// |U_k|^2 for each grid point.
std::vector<double> density_of(const StateVector& u);

}  // namespace fnls
