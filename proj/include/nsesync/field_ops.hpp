#pragma once

// Streamfunction-level differential operators and the Navier-Stokes
// advection term. The solver state is a streamfunction psi with velocity
// u = grad_perp psi = (-d_y psi, d_x psi) and vorticity omega = lap psi.

#include <vector>

#include "nsesync/spectral_space.hpp"

namespace nsesync {

struct StreamFunction {
  SpectralField psi;

  const SpectralGrid& grid() const { return psi.grid(); }
  friend bool operator==(const StreamFunction&, const StreamFunction&) = default;
};

struct VelocityField {
  SpectralField ux;
  SpectralField uy;
};

VelocityField velocity_from_stream(const StreamFunction& stream);
SpectralField vorticity(const StreamFunction& stream);

/// Spectral divergence i k . u.
SpectralField divergence(const VelocityField& u);

SpectralField laplacian(const SpectralField& field);
/// Periodic mean-free inverse Laplacian; maps k = 0 to 0.
SpectralField inverse_laplacian(const SpectralField& field);

/// lap^{-1} (u . grad) omega with u = grad_perp psi, omega = lap psi.
/// Products are formed on the physical grid and the result is dealiased
/// with the square 2/3 mask before the inverse Laplacian.
SpectralField nse_nonlinear_term(const StreamFunction& stream);

/// Stokes operator A u = -lap u (componentwise, |k|^2 u_k).
VelocityField stokes(const VelocityField& u);

/// (u, w) = int u . w dx.
double inner_product(const VelocityField& u, const VelocityField& w);

/// (B(u, v), w) = int ((u . grad) v) . w dx, evaluated pseudo-spectrally
/// with the advection product dealiased before pairing with w.
double trilinear_b(const VelocityField& u, const VelocityField& v, const VelocityField& w);

/// |A^{n/2} u| of the velocity induced by psi, i.e. norm_hn(psi, n + 1).
double velocity_norm(const StreamFunction& stream, int n);

/// Kinetic-energy shell spectrum |u|^2 per shell of the induced velocity.
std::vector<ShellEnergy> velocity_energy_spectrum(const StreamFunction& stream);

}  // namespace nsesync
