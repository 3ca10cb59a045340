#pragma once

// Periodic 1-D grid, unitary DFT and spectral fractional-Laplacian multipliers.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "fnls/errors.hpp"

namespace fnls {

using Complex = std::complex<double>;

/// Unitary discrete Fourier transform of a fixed length. Both directions carry 1/sqrt(N).
///
/// Instances are immutable after construction and may be shared across threads;
/// execution goes through the new-array interface of the backend, which is re-entrant.
class SpectralTransform {
 public:
  explicit SpectralTransform(std::size_t size);
  ~SpectralTransform();

  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  std::size_t size() const { return size_; }

  /// out_p = N^{-1/2} sum_j in_j exp(-2 pi i j p / N). `in` and `out` may alias.
  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  /// out_j = N^{-1/2} sum_p in_p exp(+2 pi i j p / N). `in` and `out` may alias.
  void inverse(std::span<const Complex> in, std::span<Complex> out) const;

  /// Shared instance for a given length, created on first use.
  static std::shared_ptr<const SpectralTransform> for_size(std::size_t size);

 private:
  void execute(void* plan, std::span<const Complex> in, std::span<Complex> out) const;

  std::size_t size_;
  double scale_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

/// Uniform periodic grid on the torus [0, L). N must be odd.
class Grid {
 public:
  Grid(double length, std::size_t points);

  double length() const { return length_; }
  std::size_t size() const { return points_; }
  double dx() const { return length_ / static_cast<double>(points_); }
  /// mu = 2 pi / L, the wavenumber of the first Fourier mode.
  double mu() const;
  double node(std::size_t j) const { return static_cast<double>(j) * dx(); }
  std::vector<double> nodes() const;

  const SpectralTransform& transform() const { return *transform_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.length_ == b.length_ && a.points_ == b.points_;
  }

 private:
  double length_;
  std::size_t points_;
  std::shared_ptr<const SpectralTransform> transform_;
};

/// Complex samples tagged by the space they live in, so that physical-space and
/// Fourier-space vectors are not mixed up by accident.
template <class Tag>
class ComplexField {
 public:
  ComplexField() = default;
  explicit ComplexField(std::size_t n, Complex fill = {}) : data_(n, fill) {}
  explicit ComplexField(std::vector<Complex> data) : data_(std::move(data)) {}
  ComplexField(std::initializer_list<Complex> init) : data_(init) {}

  std::size_t size() const { return data_.size(); }
  Complex& operator[](std::size_t i) { return data_[i]; }
  const Complex& operator[](std::size_t i) const { return data_[i]; }

  std::span<Complex> span() { return data_; }
  std::span<const Complex> span() const { return data_; }
  std::vector<Complex>& values() { return data_; }
  const std::vector<Complex>& values() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  friend bool operator==(const ComplexField&, const ComplexField&) = default;

 private:
  std::vector<Complex> data_;
};

struct PhysicalSpace {};
struct FourierSpace {};

/// Grid-point values U_k, k = 0..N-1.
using StateVector = ComplexField<PhysicalSpace>;
/// DFT coefficients in standard 0..N-1 ordering (negative wavenumbers wrap to the top half).
using SpectralCoeffs = ComplexField<FourierSpace>;

/// Diagonal Fourier multiplier d_p = |mu k_p|^s where k_p is the signed wavenumber of index p.
class FractionalSymbol {
 public:
  FractionalSymbol(Grid grid, double exponent, std::vector<double> entries);

  const Grid& grid() const { return grid_; }
  double exponent() const { return exponent_; }
  std::size_t size() const { return entries_.size(); }
  double operator[](std::size_t p) const { return entries_[p]; }
  std::span<const double> entries() const { return entries_; }
  double max_entry() const;

  /// In-place: x <- F^{-1} diag(d) F x.
  void apply_in_place(std::span<Complex> x) const;
  /// out <- F^{-1} diag(d) F in. `in` and `out` may alias.
  void apply(std::span<const Complex> in, std::span<Complex> out) const;

 private:
  Grid grid_;
  double exponent_;
  std::vector<double> entries_;
};

/// Signed wavenumber index for DFT slot p: p for p <= (N-1)/2, p - N otherwise.
long signed_mode(std::size_t p, std::size_t n);

/// |x|^s with 0^s = 0.
double abs_pow(double x, double s);

SpectralCoeffs dft_forward(const Grid& grid, const StateVector& u);
StateVector dft_inverse(const Grid& grid, const SpectralCoeffs& c);

/// Builds the multiplier for (-Delta)^{s/2}. The fractional Laplacian of Levy index alpha
/// uses s = alpha; its square root uses s = alpha / 2.
FractionalSymbol build_symbol(const Grid& grid, double s);

StateVector apply_multiplier(const StateVector& u, const FractionalSymbol& symbol);

}  // namespace fnls
