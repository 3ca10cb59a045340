#pragma once

#include <cmath>
#include <optional>
#include <span>

#include "fnls/grid_spectral.hpp"

namespace fnls {

/// Conserved-quantity snapshot at one time level.
struct InvariantSample {
  long step = 0;
  double time = 0.0;
  double mass = 0.0;
  /// H_d(U^(n), U^(n-1)), or the (rho+1)-level energy for rho >= 2. Absent until enough levels exist.
  std::optional<double> two_step_energy;
  double single_step_energy = 0.0;
};

/// Neumaier-compensated running sum; terms are consumed in the order they are added.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Energy functionals for a fixed grid and Levy index. Holds the quarter-power symbol
/// (s = alpha / 2) so repeated evaluations along a trajectory do not rebuild it.
class EnergyFunctional {
 public:
  EnergyFunctional(const Grid& grid, double alpha);

  const Grid& grid() const { return quarter_.grid(); }
  double alpha() const { return alpha_; }

  double mass(const StateVector& u) const;
  double two_step(const StateVector& u, const StateVector& v) const;
  double single(const StateVector& u) const;
  /// history[0] is the newest level U^(n), history[rho] the oldest U^(n-rho).
  double multi_step(std::span<const StateVector> history, int rho) const;

 private:
  std::vector<double> quarter_density(const StateVector& u) const;

  double alpha_;
  FractionalSymbol quarter_;
};

/// Delta x * sum |U_k|^2.
double discrete_mass(const StateVector& u, const Grid& grid);

/// Delta x * sum [ -(|L^{a/4}U|_k^2 + |L^{a/4}V|_k^2)/2 + |U_k|^2 |V_k|^2 / 2 ].
double discrete_energy_two_step(const StateVector& u, const StateVector& v, const Grid& grid, double alpha);

double discrete_energy_single(const StateVector& u, const Grid& grid, double alpha);

double discrete_energy_rho(std::span<const StateVector> history, const Grid& grid, double alpha, int rho);

/// Throws DomainError unless 1 < alpha <= 2.
void require_levy_index(double alpha);

}  // namespace fnls
