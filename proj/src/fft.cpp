#include "nsesync/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace nsesync::fft {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Workspace {
 public:
  explicit Workspace(int n) : n_(n), half_(n / 2 + 1) {
    real_ = fftw_alloc_real(std::size_t(n) * n);
    cplx_ = fftw_alloc_complex(std::size_t(n) * half_);
    if (real_ == nullptr || cplx_ == nullptr) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    r2c_ = fftw_plan_dft_r2c_2d(n, n, real_, cplx_, FFTW_ESTIMATE);
    c2r_ = fftw_plan_dft_c2r_2d(n, n, cplx_, real_, FFTW_ESTIMATE);
    if (r2c_ == nullptr || c2r_ == nullptr) throw std::runtime_error("FFTW planning failed");
  }
  ~Workspace() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c_);
    fftw_destroy_plan(c2r_);
    fftw_free(real_);
    fftw_free(cplx_);
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  void forward(std::span<const double> physical, std::span<Complex> spectrum) {
    const int n = n_;
    std::copy(physical.begin(), physical.end(), real_);
    fftw_execute(r2c_);
    const double scale = 1.0 / (double(n) * double(n));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < half_; ++j) {
        const fftw_complex& c = cplx_[std::size_t(i) * half_ + j];
        spectrum[std::size_t(i) * n + j] = Complex(c[0] * scale, c[1] * scale);
      }
    }
    // Columns 0 and n/2 are self-conjugate in i; FFTW computes both halves
    // independently, so pin them to the canonical half.
    for (int j : {0, n / 2}) {
      for (int i = n / 2 + 1; i < n; ++i) {
        spectrum[std::size_t(i) * n + j] = std::conj(spectrum[std::size_t(n - i) * n + j]);
      }
      for (int i : {0, n / 2}) {
        auto& c = spectrum[std::size_t(i) * n + j];
        c = Complex(c.real(), 0.0);
      }
    }
    for (int i = 0; i < n; ++i) {
      const int mi = (n - i) % n;
      for (int j = half_; j < n; ++j) {
        spectrum[std::size_t(i) * n + j] = std::conj(spectrum[std::size_t(mi) * n + (n - j)]);
      }
    }
  }

  void inverse(std::span<const Complex> spectrum, std::span<double> physical) {
    const int n = n_;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < half_; ++j) {
        const Complex c = spectrum[std::size_t(i) * n + j];
        fftw_complex& out = cplx_[std::size_t(i) * half_ + j];
        out[0] = c.real();
        out[1] = c.imag();
      }
    }
    fftw_execute(c2r_);
    std::copy(real_, real_ + std::size_t(n) * n, physical.begin());
  }

 private:
  int n_;
  int half_;
  double* real_ = nullptr;
  fftw_complex* cplx_ = nullptr;
  fftw_plan r2c_ = nullptr;
  fftw_plan c2r_ = nullptr;
};

Workspace& workspace(int n) {
  thread_local std::map<int, std::unique_ptr<Workspace>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Workspace>(n);
  return *slot;
}

void check_sizes(const SpectralGrid& grid, std::size_t a, std::size_t b) {
  if (a != grid.size() || b != grid.size()) throw std::invalid_argument("fft: buffer size does not match grid");
}

}  // namespace

void forward(const SpectralGrid& grid, std::span<const double> physical, std::span<Complex> spectrum) {
  check_sizes(grid, physical.size(), spectrum.size());
  workspace(grid.resolution()).forward(physical, spectrum);
}

void inverse(const SpectralGrid& grid, std::span<const Complex> spectrum, std::span<double> physical) {
  check_sizes(grid, spectrum.size(), physical.size());
  workspace(grid.resolution()).inverse(spectrum, physical);
}

}  // namespace nsesync::fft
