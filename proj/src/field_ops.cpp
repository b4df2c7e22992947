#include "nsesync/field_ops.hpp"

#include <stdexcept>

#include "nsesync/fft.hpp"

namespace nsesync {
namespace {

constexpr Complex kI{0.0, 1.0};

// out_k = factor(k) * in_k for every mode.
template <class Factor>
SpectralField apply_symbol(const SpectralField& in, Factor factor) {
  const SpectralGrid& grid = in.grid();
  const int n = grid.resolution();
  std::vector<Complex> out(grid.size());
  const auto c = in.coeffs();
  for (int i = 0; i < n; ++i) {
    const int kx = grid.wavenumber(i);
    for (int j = 0; j < n; ++j) {
      const std::size_t f = grid.flat(i, j);
      if (c[f] == Complex{}) continue;
      out[f] = factor(kx, grid.wavenumber(j)) * c[f];
    }
  }
  return SpectralField(grid, std::move(out));
}

std::vector<double> physical(const SpectralField& f) { return f.to_physical(); }

void require_same_grid(const VelocityField& a, const VelocityField& b) {
  if (!(a.ux.grid() == b.ux.grid())) throw std::invalid_argument("velocity fields live on different grids");
}

}  // namespace

VelocityField velocity_from_stream(const StreamFunction& stream) {
  return {apply_symbol(stream.psi, [](int, int ky) { return -kI * double(ky); }),
          apply_symbol(stream.psi, [](int kx, int) { return kI * double(kx); })};
}

SpectralField vorticity(const StreamFunction& stream) { return laplacian(stream.psi); }

SpectralField divergence(const VelocityField& u) {
  return apply_symbol(u.ux, [](int kx, int) { return kI * double(kx); }) +
         apply_symbol(u.uy, [](int, int ky) { return kI * double(ky); });
}

SpectralField laplacian(const SpectralField& field) {
  return apply_symbol(field, [](int kx, int ky) { return Complex(-double(kx * kx + ky * ky), 0.0); });
}

SpectralField inverse_laplacian(const SpectralField& field) {
  return apply_symbol(field, [](int kx, int ky) {
    const int k2 = kx * kx + ky * ky;
    return k2 == 0 ? Complex{} : Complex(-1.0 / double(k2), 0.0);
  });
}

SpectralField nse_nonlinear_term(const StreamFunction& stream) {
  const SpectralGrid& grid = stream.grid();
  const int n = grid.resolution();
  const std::size_t size = grid.size();
  // Per-thread scratch: this runs every step, and fresh 2D buffers would
  // be page-faulted in on each call.
  thread_local std::vector<Complex> spec;
  thread_local std::vector<double> ux, uy, wx, wy;
  spec.resize(size);
  for (auto* v : {&ux, &uy, &wx, &wy}) v->resize(size);

  const auto psi = stream.psi.coeffs();
  auto transform = [&](std::vector<double>& out, auto symbol) {
    for (int i = 0; i < n; ++i) {
      const int kx = grid.wavenumber(i);
      for (int j = 0; j < n; ++j) {
        const std::size_t f = grid.flat(i, j);
        spec[f] = psi[f] == Complex{} ? Complex{} : symbol(kx, grid.wavenumber(j)) * psi[f];
      }
    }
    fft::inverse(grid, spec, out);
  };
  transform(ux, [](int, int ky) { return -kI * double(ky); });
  transform(uy, [](int kx, int) { return kI * double(kx); });
  // grad omega = i k (-|k|^2) psi
  transform(wx, [](int kx, int ky) { return kI * double(kx) * Complex(-double(kx * kx + ky * ky), 0.0); });
  transform(wy, [](int kx, int ky) { return kI * double(ky) * Complex(-double(kx * kx + ky * ky), 0.0); });
  for (std::size_t p = 0; p < size; ++p) ux[p] = ux[p] * wx[p] + uy[p] * wy[p];
  fft::forward(grid, ux, spec);

  std::vector<Complex> out(size);
  for (int i = 0; i < n; ++i) {
    const int kx = grid.wavenumber(i);
    for (int j = 0; j < n; ++j) {
      const int ky = grid.wavenumber(j);
      const int k2 = kx * kx + ky * ky;
      if (k2 == 0 || !grid.resolved({kx, ky})) continue;
      const std::size_t f = grid.flat(i, j);
      out[f] = Complex(-1.0 / double(k2), 0.0) * spec[f];
    }
  }
  return SpectralField(grid, std::move(out));
}

VelocityField stokes(const VelocityField& u) {
  auto symbol = [](int kx, int ky) { return Complex(double(kx * kx + ky * ky), 0.0); };
  return {apply_symbol(u.ux, symbol), apply_symbol(u.uy, symbol)};
}

double inner_product(const VelocityField& u, const VelocityField& w) {
  require_same_grid(u, w);
  return inner_product(u.ux, w.ux) + inner_product(u.uy, w.uy);
}

double trilinear_b(const VelocityField& u, const VelocityField& v, const VelocityField& w) {
  require_same_grid(u, v);
  require_same_grid(u, w);
  const SpectralGrid& grid = u.ux.grid();
  const auto ux = physical(u.ux);
  const auto uy = physical(u.uy);
  auto advect = [&](const SpectralField& component) {
    const auto dx = physical(apply_symbol(component, [](int kx, int) { return kI * double(kx); }));
    const auto dy = physical(apply_symbol(component, [](int, int ky) { return kI * double(ky); }));
    std::vector<double> out(grid.size());
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = ux[p] * dx[p] + uy[p] * dy[p];
    return dealias(SpectralField::from_physical(grid, out));
  };
  return inner_product(advect(v.ux), w.ux) + inner_product(advect(v.uy), w.uy);
}

double velocity_norm(const StreamFunction& stream, int n) { return norm_hn(stream.psi, n + 1); }

std::vector<ShellEnergy> velocity_energy_spectrum(const StreamFunction& stream) {
  return weighted_spectrum(stream.psi, 1);
}

}  // namespace nsesync
