#pragma once

// Periodic Fourier representation of real scalar fields on the 2-torus.
//
// Coefficients are stored as a full n x n complex array indexed by FFT
// order: row i holds the x-wavenumber k1 = wavenumber(i), column j holds
// the y-wavenumber k2 = wavenumber(j). Physical samples live on the grid
// x_i = 2*pi*i/n, y_j = 2*pi*j/n of the periodic box [-pi, pi]^2.
//
// Normalization: u(x) = sum_k u_k exp(i k.x), so the forward transform
// carries 1/n^2 and the L2 norm over the box is |u|^2 = 4 pi^2 sum_k |u_k|^2.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <vector>

namespace nsesync {

using Complex = std::complex<double>;

/// Squared L2 norm of exp(i k.x) over [-pi, pi]^2.
inline constexpr double kParsevalWeight = 4.0 * 3.14159265358979323846 * 3.14159265358979323846;

struct WaveVector {
  int kx = 0;
  int ky = 0;

  constexpr long norm2() const { return long(kx) * kx + long(ky) * ky; }
  constexpr WaveVector operator-() const { return {-kx, -ky}; }
  friend constexpr bool operator==(WaveVector, WaveVector) = default;
};

class SpectralGrid {
 public:
  /// Throws std::invalid_argument unless resolution is positive and even.
  explicit SpectralGrid(int resolution);

  int resolution() const { return n_; }
  std::size_t size() const { return std::size_t(n_) * std::size_t(n_); }

  /// 2/3 of the Nyquist wavenumber, (2/3)(n/2) = n/3.
  double dealias_cutoff() const { return n_ / 3.0; }
  /// Largest |k_i| kept by the square dealias mask (3|k_i| <= n).
  int max_resolved() const { return n_ / 3; }
  /// Square 2/3 mask test, evaluated in integer arithmetic.
  bool resolved(WaveVector k) const { return 3 * std::abs(k.kx) <= n_ && 3 * std::abs(k.ky) <= n_; }

  /// FFT index -> signed wavenumber in [-n/2, n/2).
  int wavenumber(int index) const { return index < n_ / 2 ? index : index - n_; }
  /// Signed wavenumber in [-n/2, n/2) -> FFT index.
  int index_of(int k) const { return k >= 0 ? k : k + n_; }

  std::size_t flat(int i, int j) const { return std::size_t(i) * std::size_t(n_) + std::size_t(j); }
  WaveVector wave_vector(std::size_t flat_index) const {
    return {wavenumber(int(flat_index / std::size_t(n_))), wavenumber(int(flat_index % std::size_t(n_)))};
  }
  /// Throws std::out_of_range if k is not representable on this grid.
  std::size_t flat_of(WaveVector k) const;
  /// Flat index of -k.
  std::size_t mirror(std::size_t flat_index) const {
    const int i = int(flat_index / std::size_t(n_));
    const int j = int(flat_index % std::size_t(n_));
    return flat((n_ - i) % n_, (n_ - j) % n_);
  }

  double coordinate(int index) const;

  friend bool operator==(const SpectralGrid&, const SpectralGrid&) = default;

 private:
  int n_;
};

class SpectralField {
 public:
  explicit SpectralField(SpectralGrid grid);
  /// Takes ownership of a full coefficient array; size must be grid.size().
  SpectralField(SpectralGrid grid, std::vector<Complex> coeffs);

  /// Real mode pair: sets u_k = amplitude and u_{-k} = conj(amplitude).
  static SpectralField single_mode(SpectralGrid grid, WaveVector k, Complex amplitude);
  /// Forward transform of physical samples (row-major, x index major).
  static SpectralField from_physical(SpectralGrid grid, std::span<const double> samples);

  const SpectralGrid& grid() const { return grid_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }

  Complex operator[](WaveVector k) const { return coeffs_[grid_.flat_of(k)]; }
  void set_mode(WaveVector k, Complex amplitude);

  std::vector<double> to_physical() const;

  /// Largest |u_{-k} - conj(u_k)|; zero for a bit-exact real field.
  double hermitian_defect() const;
  bool is_mean_free() const { return coeffs_[0] == Complex{}; }
  bool is_zero() const;
  /// Copies u_k onto u_{-k} for the canonical half so symmetry is exact.
  void enforce_hermitian();

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scale);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  void require_same_grid(const SpectralField& other) const;

  SpectralGrid grid_;
  std::vector<Complex> coeffs_;
};

/// P_N: keeps coefficients with |k| <= cutoff (Euclidean, inclusive).
SpectralField project_low(const SpectralField& field, double cutoff);
/// Q_N = I - P_N, evaluated as the complementary coefficient mask.
SpectralField project_high(const SpectralField& field, double cutoff);
/// Zeroes modes outside the square 2/3 mask.
SpectralField dealias(const SpectralField& field);

/// |A^{n/2} u| = 2 pi (sum_k |k|^{2n} |u_k|^2)^{1/2}.
/// Throws std::domain_error for n < 0 when the k = 0 coefficient is nonzero.
double norm_hn(const SpectralField& field, int n);
/// Squared form of norm_hn, avoids the sqrt when sums of squares are needed.
double norm_hn_squared(const SpectralField& field, int n);
/// L2 inner product over the box, Re sum 4 pi^2 a_k conj(b_k).
double inner_product(const SpectralField& a, const SpectralField& b);

struct ShellEnergy {
  int shell = 0;       ///< m with m <= |k| < m + 1
  double energy = 0.0; ///< 4 pi^2 sum over the shell of |u_k|^2
};

/// Shell-binned |u|^2; entries for every shell from 0 to the largest occupied one.
std::vector<ShellEnergy> energy_spectrum(const SpectralField& field);
/// Same binning with per-mode weights |k|^{2n}|u_k|^2.
std::vector<ShellEnergy> weighted_spectrum(const SpectralField& field, int n);

}  // namespace nsesync
