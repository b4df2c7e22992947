#include "unit/oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace oracle {

namespace {

bool in_mask(int n, int kx, int ky) { return 3 * std::abs(kx) <= n && 3 * std::abs(ky) <= n; }

std::size_t flat(int n, int kx, int ky) {
  const int i = kx >= 0 ? kx : kx + n;
  const int j = ky >= 0 ? ky : ky + n;
  return std::size_t(i) * n + std::size_t(j);
}

}  // namespace

SpectralField random_dealiased(const SpectralGrid& grid, std::uint64_t seed, double decay) {
  const int n = grid.resolution();
  const int m = n / 3;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Complex> c(grid.size());
  for (int kx = -m; kx <= m; ++kx) {
    for (int ky = -m; ky <= m; ++ky) {
      // canonical half: kx > 0, or kx == 0 and ky > 0
      if (kx < 0 || (kx == 0 && ky <= 0)) continue;
      const double scale = std::pow(1.0 + kx * kx + ky * ky, -decay / 2.0);
      const Complex z(normal(rng) * scale, normal(rng) * scale);
      c[flat(n, kx, ky)] = z;
      c[flat(n, -kx, -ky)] = std::conj(z);
    }
  }
  return SpectralField(grid, std::move(c));
}

SpectralField direct_nonlinear(const SpectralField& psi) {
  const SpectralGrid& grid = psi.grid();
  const int n = grid.resolution();
  const int m = n / 3;
  struct Mode {
    int kx, ky;
    Complex v;
  };
  std::vector<Mode> modes;
  for (int kx = -m; kx <= m; ++kx) {
    for (int ky = -m; ky <= m; ++ky) {
      const Complex v = psi.coeffs()[flat(n, kx, ky)];
      if (v != Complex{}) modes.push_back({kx, ky, v});
    }
  }
  std::vector<Complex> adv(grid.size());
  const Complex I(0.0, 1.0);
  for (const Mode& p : modes) {
    // u_p = (-i p_y, i p_x) psi_p
    const Complex ux = -I * double(p.ky) * p.v;
    const Complex uy = I * double(p.kx) * p.v;
    for (const Mode& q : modes) {
      const int kx = p.kx + q.kx, ky = p.ky + q.ky;
      if (!in_mask(n, kx, ky)) continue;
      // grad omega_q = i q (-|q|^2 psi_q)
      const double q2 = double(q.kx * q.kx + q.ky * q.ky);
      const Complex w = -q2 * q.v;
      adv[flat(n, kx, ky)] += (ux * (I * double(q.kx)) + uy * (I * double(q.ky))) * w;
    }
  }
  for (int kx = -m; kx <= m; ++kx) {
    for (int ky = -m; ky <= m; ++ky) {
      const double k2 = double(kx * kx + ky * ky);
      Complex& a = adv[flat(n, kx, ky)];
      a = k2 == 0.0 ? Complex{} : -a / k2;
    }
  }
  return SpectralField(grid, std::move(adv));
}

double direct_sample(const SpectralField& field, int i, int j) {
  const SpectralGrid& grid = field.grid();
  const int n = grid.resolution();
  const double x = 2.0 * std::numbers::pi * i / n;
  const double y = 2.0 * std::numbers::pi * j / n;
  Complex sum;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const Complex c = field.coeffs()[f];
    if (c == Complex{}) continue;
    const auto k = grid.wave_vector(f);
    sum += c * std::polar(1.0, k.kx * x + k.ky * y);
  }
  return sum.real();
}

double quadrature_energy(const SpectralField& psi) {
  const SpectralGrid& grid = psi.grid();
  const int n = grid.resolution();
  std::vector<Complex> ux(grid.size()), uy(grid.size());
  const Complex I(0.0, 1.0);
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const auto k = grid.wave_vector(f);
    ux[f] = -I * double(k.ky) * psi.coeffs()[f];
    uy[f] = I * double(k.kx) * psi.coeffs()[f];
  }
  const SpectralField fx(grid, ux), fy(grid, uy);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = direct_sample(fx, i, j), b = direct_sample(fy, i, j);
      sum += a * a + b * b;
    }
  }
  const double h = 2.0 * std::numbers::pi / n;
  return sum * h * h;
}

SpectralField scalar_step(const SpectralField& psi, const SpectralField& force, double nu, double dt) {
  const SpectralGrid& grid = psi.grid();
  const int n = grid.resolution();
  const SpectralField nl = direct_nonlinear(psi);
  std::vector<Complex> out(grid.size());
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const auto k = grid.wave_vector(f);
    if (!in_mask(n, k.kx, k.ky)) continue;
    const double e = std::exp(-nu * double(k.kx * k.kx + k.ky * k.ky) * dt);
    out[f] = e * (psi.coeffs()[f] + dt * (force.coeffs()[f] - nl.coeffs()[f]));
  }
  return SpectralField(grid, std::move(out));
}

}  // namespace oracle
