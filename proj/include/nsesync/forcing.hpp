#pragma once

#include <cstdint>

#include "nsesync/field_ops.hpp"
#include "nsesync/spectral_space.hpp"

namespace nsesync {

/// Which norm of f enters the Grashof number |f| / nu^2.
enum class GrashofNorm {
  L2,    ///< |f| in H, the default
  LInf,  ///< max over the physical grid of the pointwise velocity magnitude
};

struct ForcingSpec {
  int band_low = 10;   ///< smallest |k|^2 in the band
  int band_high = 12;  ///< largest |k|^2 in the band
  double grashof_target = 1.0e5;
  double viscosity = 0.0005;
  std::uint64_t phase_seed = 0;
  GrashofNorm norm = GrashofNorm::L2;

  friend bool operator==(const ForcingSpec&, const ForcingSpec&) = default;
};

/// Divergence-free, time-independent body force f = grad_perp(potential).
/// The potential is exactly the streamfunction-level forcing lap^{-1} grad_perp . f.
struct BodyForce {
  SpectralField potential;

  const SpectralGrid& grid() const { return potential.grid(); }
  VelocityField velocity() const { return velocity_from_stream(StreamFunction{potential}); }
};

/// Equal-magnitude force on every resolved mode with band_low <= |k|^2 <= band_high.
/// Phases come from a splitmix64 hash of (k, seed), so the field is
/// reproducible bit-for-bit. Scaled so grashof(f, viscosity, norm) hits the target.
/// Throws std::invalid_argument("forcing band contains no lattice modes") for an empty band.
BodyForce make_band_forcing(const ForcingSpec& spec, const SpectralGrid& grid);

double force_norm(const BodyForce& f, GrashofNorm norm = GrashofNorm::L2);
double grashof(const BodyForce& f, double nu, GrashofNorm norm = GrashofNorm::L2);

/// sigma_n = |A^{n/2} f| / |f|; throws std::domain_error for a zero force.
double shape_factor(const BodyForce& f, int n);

struct AbsorbingRadii {
  double rho0 = 0.0;  ///< nu sigma_{-1} G, bound on |u|
  double rho1 = 0.0;  ///< nu G, bound on ||u||
};

AbsorbingRadii absorbing_radii(const BodyForce& f, double nu);

}  // namespace nsesync
