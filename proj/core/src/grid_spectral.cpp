#include "fnls/grid_spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace fnls {

namespace {

// FFTW's planner and plan destruction are not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

SpectralTransform::SpectralTransform(std::size_t size)
    : size_(size), scale_(1.0 / std::sqrt(static_cast<double>(size))) {
  if (size == 0) throw DomainError("SpectralTransform: size must be positive");
  // Scratch arrays only exist to let the planner pick codelets; FFTW_ESTIMATE does not
  // touch them and keeps plan selection deterministic across runs.
  std::vector<Complex> a(size), b(size);
  const int n = static_cast<int>(size);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT;
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_1d(n, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
  inverse_plan_ = fftw_plan_dft_1d(n, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    throw std::runtime_error("SpectralTransform: FFTW planning failed for N=" + std::to_string(size));
  }
}

SpectralTransform::~SpectralTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void SpectralTransform::execute(void* plan, std::span<const Complex> in, std::span<Complex> out) const {
  detail::require_size(in.size(), size_, "SpectralTransform input");
  detail::require_size(out.size(), size_, "SpectralTransform output");
  if (in.data() == out.data()) {
    std::vector<Complex> tmp(in.begin(), in.end());
    fftw_execute_dft(static_cast<fftw_plan>(plan), as_fftw(tmp.data()), as_fftw(out.data()));
  } else {
    // Out-of-place plan with FFTW_PRESERVE_INPUT: the input is not written.
    fftw_execute_dft(static_cast<fftw_plan>(plan), as_fftw(const_cast<Complex*>(in.data())),
                     as_fftw(out.data()));
  }
  for (auto& z : out) z *= scale_;
}

void SpectralTransform::forward(std::span<const Complex> in, std::span<Complex> out) const {
  execute(forward_plan_, in, out);
}

void SpectralTransform::inverse(std::span<const Complex> in, std::span<Complex> out) const {
  execute(inverse_plan_, in, out);
}

std::shared_ptr<const SpectralTransform> SpectralTransform::for_size(std::size_t size) {
  static std::mutex cache_mutex;
  static std::map<std::size_t, std::shared_ptr<const SpectralTransform>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[size];
  if (!slot) slot = std::make_shared<const SpectralTransform>(size);
  return slot;
}

Grid::Grid(double length, std::size_t points) : length_(length), points_(points) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw DomainError("Grid: length must be positive and finite");
  }
  if (points == 0 || points % 2 == 0) {
    throw DomainError("Grid: number of points must be odd, got " + std::to_string(points));
  }
  transform_ = SpectralTransform::for_size(points);
}

double Grid::mu() const { return 2.0 * std::numbers::pi / length_; }

std::vector<double> Grid::nodes() const {
  std::vector<double> x(points_);
  for (std::size_t j = 0; j < points_; ++j) x[j] = node(j);
  return x;
}

FractionalSymbol::FractionalSymbol(Grid grid, double exponent, std::vector<double> entries)
    : grid_(std::move(grid)), exponent_(exponent), entries_(std::move(entries)) {
  detail::require_size(entries_.size(), grid_.size(), "FractionalSymbol");
}

double FractionalSymbol::max_entry() const { return *std::max_element(entries_.begin(), entries_.end()); }

void FractionalSymbol::apply_in_place(std::span<Complex> x) const {
  const auto& fft = grid_.transform();
  fft.forward(x, x);
  for (std::size_t p = 0; p < x.size(); ++p) x[p] *= entries_[p];
  fft.inverse(x, x);
}

void FractionalSymbol::apply(std::span<const Complex> in, std::span<Complex> out) const {
  detail::require_size(in.size(), size(), "FractionalSymbol::apply input");
  detail::require_size(out.size(), size(), "FractionalSymbol::apply output");
  const auto& fft = grid_.transform();
  fft.forward(in, out);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] *= entries_[p];
  fft.inverse(out, out);
}

long signed_mode(std::size_t p, std::size_t n) {
  const auto half = (n - 1) / 2;
  return p <= half ? static_cast<long>(p) : static_cast<long>(p) - static_cast<long>(n);
}

double abs_pow(double x, double s) {
  const double a = std::abs(x);
  return a == 0.0 ? 0.0 : std::pow(a, s);
}

SpectralCoeffs dft_forward(const Grid& grid, const StateVector& u) {
  detail::require_size(u.size(), grid.size(), "dft_forward");
  SpectralCoeffs c(grid.size());
  grid.transform().forward(u.span(), c.span());
  return c;
}

StateVector dft_inverse(const Grid& grid, const SpectralCoeffs& c) {
  detail::require_size(c.size(), grid.size(), "dft_inverse");
  StateVector u(grid.size());
  grid.transform().inverse(c.span(), u.span());
  return u;
}

FractionalSymbol build_symbol(const Grid& grid, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("build_symbol: exponent must be positive");
  const std::size_t n = grid.size();
  const double mu = grid.mu();
  std::vector<double> d(n);
  for (std::size_t p = 0; p < n; ++p) {
    d[p] = abs_pow(mu * static_cast<double>(signed_mode(p, n)), s);
  }
  return FractionalSymbol(grid, s, std::move(d));
}

StateVector apply_multiplier(const StateVector& u, const FractionalSymbol& symbol) {
  detail::require_size(u.size(), symbol.size(), "apply_multiplier");
  StateVector out(u.size());
  symbol.apply(u.span(), out.span());
  return out;
}

}  // namespace fnls
