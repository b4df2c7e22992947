#include "nsesync/spectral_space.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nsesync/fft.hpp"

namespace nsesync {

SpectralGrid::SpectralGrid(int resolution) : n_(resolution) {
  if (resolution <= 0 || resolution % 2 != 0) {
    throw std::invalid_argument("grid resolution must be a positive even integer, got " + std::to_string(resolution));
  }
}

std::size_t SpectralGrid::flat_of(WaveVector k) const {
  const int h = n_ / 2;
  if (k.kx < -h || k.kx >= h || k.ky < -h || k.ky >= h) {
    throw std::out_of_range("wave vector (" + std::to_string(k.kx) + "," + std::to_string(k.ky) +
                            ") is not representable at resolution " + std::to_string(n_));
  }
  return flat(index_of(k.kx), index_of(k.ky));
}

double SpectralGrid::coordinate(int index) const { return 2.0 * std::numbers::pi * index / n_; }

SpectralField::SpectralField(SpectralGrid grid) : grid_(grid), coeffs_(grid.size()) {}

SpectralField::SpectralField(SpectralGrid grid, std::vector<Complex> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) throw std::invalid_argument("coefficient array does not match grid size");
}

SpectralField SpectralField::single_mode(SpectralGrid grid, WaveVector k, Complex amplitude) {
  SpectralField f(grid);
  f.set_mode(k, amplitude);
  return f;
}

SpectralField SpectralField::from_physical(SpectralGrid grid, std::span<const double> samples) {
  SpectralField f(grid);
  fft::forward(grid, samples, f.coeffs_);
  return f;
}

void SpectralField::set_mode(WaveVector k, Complex amplitude) {
  const std::size_t at = grid_.flat_of(k);
  const std::size_t mirror = grid_.mirror(at);
  if (at == mirror) {
    // k and -k coincide (k = 0 or a Nyquist corner): only the real part survives.
    coeffs_[at] = Complex(amplitude.real(), 0.0);
  } else {
    coeffs_[at] = amplitude;
    coeffs_[mirror] = std::conj(amplitude);
  }
}

std::vector<double> SpectralField::to_physical() const {
  std::vector<double> out(grid_.size());
  fft::inverse(grid_, coeffs_, out);
  return out;
}

double SpectralField::hermitian_defect() const {
  double worst = 0.0;
  for (std::size_t f = 0; f < coeffs_.size(); ++f) {
    worst = std::max(worst, std::abs(coeffs_[grid_.mirror(f)] - std::conj(coeffs_[f])));
  }
  return worst;
}

bool SpectralField::is_zero() const {
  for (const auto& c : coeffs_) {
    if (c != Complex{}) return false;
  }
  return true;
}

void SpectralField::enforce_hermitian() {
  for (std::size_t f = 0; f < coeffs_.size(); ++f) {
    const std::size_t m = grid_.mirror(f);
    if (m == f) {
      coeffs_[f] = Complex(coeffs_[f].real(), 0.0);
    } else if (m > f) {
      coeffs_[m] = std::conj(coeffs_[f]);
    }
  }
}

void SpectralField::require_same_grid(const SpectralField& other) const {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("spectral fields live on different grids");
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(other);
  for (std::size_t f = 0; f < coeffs_.size(); ++f) coeffs_[f] += other.coeffs_[f];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(other);
  for (std::size_t f = 0; f < coeffs_.size(); ++f) coeffs_[f] -= other.coeffs_[f];
  return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
  for (auto& c : coeffs_) c *= scale;
  return *this;
}

namespace {

template <class Keep>
SpectralField masked(const SpectralField& field, Keep keep) {
  const SpectralGrid& grid = field.grid();
  std::vector<Complex> out(grid.size());
  const auto in = field.coeffs();
  for (std::size_t f = 0; f < out.size(); ++f) {
    if (keep(grid.wave_vector(f))) out[f] = in[f];
  }
  return SpectralField(grid, std::move(out));
}

void require_positive_cutoff(double cutoff) {
  if (!(cutoff > 0.0)) throw std::invalid_argument("projection cutoff must be positive");
}

double shell_weight(long k2, int n) {
  if (n == 0) return 1.0;
  return std::pow(double(k2), n);
}

}  // namespace

SpectralField project_low(const SpectralField& field, double cutoff) {
  require_positive_cutoff(cutoff);
  const double c2 = cutoff * cutoff;
  return masked(field, [c2](WaveVector k) { return double(k.norm2()) <= c2; });
}

SpectralField project_high(const SpectralField& field, double cutoff) {
  require_positive_cutoff(cutoff);
  const double c2 = cutoff * cutoff;
  return masked(field, [c2](WaveVector k) { return !(double(k.norm2()) <= c2); });
}

SpectralField dealias(const SpectralField& field) {
  const SpectralGrid& grid = field.grid();
  return masked(field, [&grid](WaveVector k) { return grid.resolved(k); });
}

double norm_hn_squared(const SpectralField& field, int n) {
  const SpectralGrid& grid = field.grid();
  const auto c = field.coeffs();
  if (n < 0 && c[0] != Complex{}) {
    throw std::domain_error("negative-order norm requires a mean-free field (k = 0 coefficient is nonzero)");
  }
  double sum = 0.0;
  for (std::size_t f = 0; f < c.size(); ++f) {
    if (c[f] == Complex{}) continue;
    const long k2 = grid.wave_vector(f).norm2();
    if (k2 == 0 && n != 0) continue;
    sum += shell_weight(k2, n) * std::norm(c[f]);
  }
  return kParsevalWeight * sum;
}

double norm_hn(const SpectralField& field, int n) { return std::sqrt(norm_hn_squared(field, n)); }

double inner_product(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("spectral fields live on different grids");
  const auto x = a.coeffs();
  const auto y = b.coeffs();
  double sum = 0.0;
  for (std::size_t f = 0; f < x.size(); ++f) {
    sum += x[f].real() * y[f].real() + x[f].imag() * y[f].imag();
  }
  return kParsevalWeight * sum;
}

std::vector<ShellEnergy> weighted_spectrum(const SpectralField& field, int n) {
  const SpectralGrid& grid = field.grid();
  const auto c = field.coeffs();
  // Largest |k| on the grid is sqrt(2) n/2.
  const int shells = int(std::ceil(std::sqrt(2.0) * grid.resolution() / 2.0)) + 1;
  std::vector<double> bins(std::size_t(shells), 0.0);
  int top = 0;
  for (std::size_t f = 0; f < c.size(); ++f) {
    const long k2 = grid.wave_vector(f).norm2();
    long m = long(std::sqrt(double(k2)));
    while (m * m > k2) --m;
    while ((m + 1) * (m + 1) <= k2) ++m;
    if (c[f] == Complex{}) continue;
    if (k2 == 0 && n != 0) continue;
    bins[std::size_t(m)] += shell_weight(k2, n) * std::norm(c[f]);
    top = std::max(top, int(m));
  }
  std::vector<ShellEnergy> out;
  out.reserve(std::size_t(top) + 1);
  for (int m = 0; m <= top; ++m) out.push_back({m, kParsevalWeight * bins[std::size_t(m)]});
  return out;
}

std::vector<ShellEnergy> energy_spectrum(const SpectralField& field) { return weighted_spectrum(field, 0); }

}  // namespace nsesync
