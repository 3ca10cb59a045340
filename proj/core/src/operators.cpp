#include "fnls/operators.hpp"

#include <cmath>

namespace fnls {

namespace {
constexpr Complex kI{0.0, 1.0};
}

StepOperator::StepOperator(FractionalSymbol symbol, double dt, std::vector<double> density)
    : symbol_(std::move(symbol)), dt_(dt), density_(std::move(density)) {
  detail::require_size(density_.size(), symbol_.size(), "StepOperator density");
  if (!std::isfinite(dt_)) throw DomainError("StepOperator: step coefficient must be finite");
  for (double d : density_) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("StepOperator: density entries must be finite and >= 0");
  }
}

void StepOperator::apply(std::span<const Complex> v, std::span<Complex> out) const {
  detail::require_size(v.size(), size(), "step_apply input");
  detail::require_size(out.size(), size(), "step_apply output");
  if (v.data() == out.data()) {
    std::vector<Complex> copy(v.begin(), v.end());
    apply(copy, out);
    return;
  }
  symbol_.apply(v, out);
  const Complex ih = kI * dt_;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = v[k] + ih * (out[k] - density_[k] * v[k]);
  }
}

void StepOperator::rhs(std::span<const Complex> u_prev, std::span<Complex> out) const {
  detail::require_size(u_prev.size(), size(), "rhs_build input");
  detail::require_size(out.size(), size(), "rhs_build output");
  if (u_prev.data() == out.data()) {
    std::vector<Complex> copy(u_prev.begin(), u_prev.end());
    rhs(copy, out);
    return;
  }
  symbol_.apply(u_prev, out);
  const Complex ih = kI * dt_;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = u_prev[k] - ih * (out[k] - density_[k] * u_prev[k]);
  }
}

void TransformedOperator::apply(std::span<const Complex> y, std::span<Complex> out) const {
  const std::size_t n = size();
  detail::require_size(y.size(), n, "transformed_apply input");
  detail::require_size(out.size(), n, "transformed_apply output");
  const auto& fft = op_.grid().transform();
  const auto d = op_.symbol().entries();
  const auto density = op_.density();
  const Complex ih = kI * op_.dt();

  std::vector<Complex> work(n);
  fft.inverse(y, work);
  for (std::size_t k = 0; k < n; ++k) work[k] *= density[k];
  fft.forward(work, work);
  for (std::size_t p = 0; p < n; ++p) {
    out[p] = (1.0 + ih * d[p]) * y[p] - ih * work[p];
  }
}

DiagonalPreconditioner::DiagonalPreconditioner(const FractionalSymbol& symbol, double dt) : entries_(symbol.size()) {
  for (std::size_t p = 0; p < symbol.size(); ++p) entries_[p] = Complex(1.0, dt * symbol[p]);
}

void DiagonalPreconditioner::solve(std::span<const Complex> z, std::span<Complex> out) const {
  detail::require_size(z.size(), size(), "precond_solve input");
  detail::require_size(out.size(), size(), "precond_solve output");
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = z[p] / entries_[p];
}

JacobiPreconditioner::JacobiPreconditioner(const StepOperator& op) : entries_(op.size()) {
  double mean = 0.0;
  for (double d : op.symbol().entries()) mean += d;
  mean /= static_cast<double>(op.size());
  const auto density = op.density();
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    entries_[k] = Complex(1.0, op.dt() * (mean - density[k]));
  }
}

void JacobiPreconditioner::solve(std::span<const Complex> z, std::span<Complex> out) const {
  detail::require_size(z.size(), entries_.size(), "JacobiPreconditioner input");
  detail::require_size(out.size(), entries_.size(), "JacobiPreconditioner output");
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = z[k] / entries_[k];
}

StateVector step_apply(const StepOperator& op, const StateVector& v) {
  StateVector out(op.size());
  op.apply(v.span(), out.span());
  return out;
}

StateVector rhs_build(const StepOperator& op, const StateVector& u_prev) {
  StateVector out(op.size());
  op.rhs(u_prev.span(), out.span());
  return out;
}

SpectralCoeffs transformed_apply(const TransformedOperator& op, const SpectralCoeffs& y) {
  SpectralCoeffs out(op.size());
  op.apply(y.span(), out.span());
  return out;
}

SpectralCoeffs precond_solve(const DiagonalPreconditioner& m, const SpectralCoeffs& z) {
  SpectralCoeffs out(m.size());
  m.solve(z.span(), out.span());
  return out;
}

std::vector<double> density_of(const StateVector& u) {
  std::vector<double> d(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) d[k] = std::norm(u[k]);
  return d;
}

}  // namespace fnls
