#include "fnls/invariants.hpp"

#include <cmath>
#include <string>

namespace fnls {

void require_levy_index(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    throw DomainError("Levy index alpha must lie in (1, 2], got " + std::to_string(alpha));
  }
}

namespace {

double check_alpha(double alpha) {
  require_levy_index(alpha);
  return alpha;
}

}  // namespace

EnergyFunctional::EnergyFunctional(const Grid& grid, double alpha)
    : alpha_(check_alpha(alpha)), quarter_(build_symbol(grid, alpha / 2.0)) {}

std::vector<double> EnergyFunctional::quarter_density(const StateVector& u) const {
  StateVector w = apply_multiplier(u, quarter_);
  std::vector<double> out(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) out[k] = std::norm(w[k]);
  return out;
}

double EnergyFunctional::mass(const StateVector& u) const { return discrete_mass(u, grid()); }

double EnergyFunctional::two_step(const StateVector& u, const StateVector& v) const {
  detail::require_size(u.size(), grid().size(), "discrete_energy_two_step");
  detail::require_size(v.size(), grid().size(), "discrete_energy_two_step");
  const auto qu = quarter_density(u);
  const auto qv = quarter_density(v);
  CompensatedSum sum;
  for (std::size_t k = 0; k < u.size(); ++k) {
    // Each term is symmetric in (u, v) bit for bit: + and * commute in IEEE arithmetic.
    sum.add(-(qu[k] + qv[k]) / 2.0 + (std::norm(u[k]) * std::norm(v[k])) / 2.0);
  }
  return grid().dx() * sum.value();
}

double EnergyFunctional::single(const StateVector& u) const { return two_step(u, u); }

double EnergyFunctional::multi_step(std::span<const StateVector> history, int rho) const {
  if (rho < 1) throw DomainError("discrete_energy_rho: rho must be a positive integer");
  if (history.size() != static_cast<std::size_t>(rho) + 1) {
    throw DimensionError("discrete_energy_rho: history must hold rho+1 = " + std::to_string(rho + 1) +
                         " levels, got " + std::to_string(history.size()));
  }
  const std::size_t n = grid().size();
  std::vector<double> gradient(n, 0.0);
  std::vector<double> product(n, 1.0);
  for (const auto& level : history) {
    detail::require_size(level.size(), n, "discrete_energy_rho");
    const auto q = quarter_density(level);
    for (std::size_t k = 0; k < n; ++k) {
      gradient[k] += q[k];
      product[k] *= std::norm(level[k]);
    }
  }
  const double levels = static_cast<double>(rho + 1);
  CompensatedSum sum;
  for (std::size_t k = 0; k < n; ++k) sum.add(-gradient[k] / levels + product[k] / levels);
  return grid().dx() * sum.value();
}

double discrete_mass(const StateVector& u, const Grid& grid) {
  detail::require_size(u.size(), grid.size(), "discrete_mass");
  CompensatedSum sum;
  for (const auto& z : u) sum.add(std::norm(z));
  return grid.dx() * sum.value();
}

double discrete_energy_two_step(const StateVector& u, const StateVector& v, const Grid& grid, double alpha) {
  return EnergyFunctional(grid, alpha).two_step(u, v);
}

double discrete_energy_single(const StateVector& u, const Grid& grid, double alpha) {
  return EnergyFunctional(grid, alpha).single(u);
}

double discrete_energy_rho(std::span<const StateVector> history, const Grid& grid, double alpha, int rho) {
  return EnergyFunctional(grid, alpha).multi_step(history, rho);
}

}  // namespace fnls
