#include "nsesync/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nsesync {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double mode_phase(WaveVector k, std::uint64_t seed) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ std::uint64_t(std::int64_t(k.kx)));
  h = splitmix64(h ^ std::uint64_t(std::int64_t(k.ky)));
  return 2.0 * std::numbers::pi * double(h >> 11) * 0x1.0p-53;
}

// Canonical half-plane representative: kx > 0, or kx == 0 and ky > 0.
bool canonical(WaveVector k) { return k.kx > 0 || (k.kx == 0 && k.ky > 0); }

}  // namespace

BodyForce make_band_forcing(const ForcingSpec& spec, const SpectralGrid& grid) {
  if (spec.band_low > spec.band_high) throw std::invalid_argument("forcing band is inverted (band_low > band_high)");
  if (!(spec.grashof_target > 0.0)) throw std::invalid_argument("grashof target must be positive");
  if (!(spec.viscosity > 0.0)) throw std::invalid_argument("viscosity must be positive");

  SpectralField potential(grid);
  const int reach = int(std::ceil(std::sqrt(double(std::max(spec.band_high, 0)))));
  int modes = 0;
  for (int kx = 0; kx <= reach; ++kx) {
    for (int ky = -reach; ky <= reach; ++ky) {
      const WaveVector k{kx, ky};
      const long k2 = k.norm2();
      if (!canonical(k) || k2 < spec.band_low || k2 > spec.band_high || !grid.resolved(k)) continue;
      // Unit velocity amplitude per mode: |f_k| = |k| |potential_k| = 1.
      potential.set_mode(k, std::polar(1.0 / std::sqrt(double(k2)), mode_phase(k, spec.phase_seed)));
      ++modes;
    }
  }
  if (modes == 0) throw std::invalid_argument("forcing band contains no lattice modes");

  BodyForce force{std::move(potential)};
  const double target = spec.grashof_target * spec.viscosity * spec.viscosity;
  force.potential *= target / force_norm(force, spec.norm);
  return force;
}

double force_norm(const BodyForce& f, GrashofNorm norm) {
  if (norm == GrashofNorm::L2) return norm_hn(f.potential, 1);
  const VelocityField u = f.velocity();
  const auto ux = u.ux.to_physical();
  const auto uy = u.uy.to_physical();
  double peak = 0.0;
  for (std::size_t p = 0; p < ux.size(); ++p) peak = std::max(peak, std::hypot(ux[p], uy[p]));
  return peak;
}

double grashof(const BodyForce& f, double nu, GrashofNorm norm) {
  if (!(nu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  return force_norm(f, norm) / (nu * nu);
}

double shape_factor(const BodyForce& f, int n) {
  const double base = norm_hn(f.potential, 1);
  if (base == 0.0) throw std::domain_error("shape factor of a zero force is undefined");
  return norm_hn(f.potential, n + 1) / base;
}

AbsorbingRadii absorbing_radii(const BodyForce& f, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  const double g = grashof(f, nu);
  return {nu * shape_factor(f, -1) * g, nu * g};
}

}  // namespace nsesync
