#pragma once

// Semi-implicit integrating-factor Euler stepping of
//
//   psi_t + lap^{-1}(grad_perp psi . grad) lap psi = nu lap psi + phi + C
//
// per mode k != 0, with E = exp(-nu |k|^2 dt):
//
//   psi_k <- E (psi_k + dt ((C_k - N_k) + phi_k))
//
// where N is the streamfunction nonlinear term, phi the streamfunction-level
// force and C the coupling addition. Diffusion is exact under E; advection,
// forcing and coupling are explicit.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsesync/field_ops.hpp"
#include "nsesync/forcing.hpp"
#include "nsesync/intertwine.hpp"

namespace nsesync {

struct SimConfig {
  double nu = 0.005;
  double dt = 0.005;
  SpectralGrid grid{128};
  ForcingSpec forcing{};
  double t_end = 0.0;

  /// dt nu k_max^2 at the dealias cutoff. Informational only.
  double viscous_stiffness() const;
  /// Throws std::invalid_argument on nonpositive nu/dt or negative t_end.
  void validate() const;
  std::uint64_t steps_for(double duration) const;
};

struct PairState {
  StreamFunction psi1;
  StreamFunction psi2;
  double t = 0.0;
  std::uint64_t step = 0;

  static PairState zero(const SpectralGrid& grid) { return {{SpectralField(grid)}, {SpectralField(grid)}, 0.0, 0}; }
  friend bool operator==(const PairState&, const PairState&) = default;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double t, std::string detail, std::string last_checkpoint = {});
  double time() const { return t_; }
  const std::string& last_checkpoint() const { return last_checkpoint_; }

 private:
  double t_;
  std::string last_checkpoint_;
};

/// Precomputes the integrating factors and force potentials for one
/// configuration; stepping is then a pure function of the state.
class Integrator {
 public:
  Integrator(const SimConfig& cfg, BodyForce force1, BodyForce force2);
  /// Both copies share the force built from cfg.forcing.
  explicit Integrator(const SimConfig& cfg);

  const SimConfig& config() const { return cfg_; }
  const BodyForce& force1() const { return force1_; }
  const BodyForce& force2() const { return force2_; }

  /// Advances the pair by one step in place. Throws BlowUpError when a
  /// coefficient goes non-finite or |u| exceeds 1e6 rho_0.
  void step_pair(PairState& state, const IntertwinementSpec& spec) const;
  /// Single uncoupled step of one copy driven by force1.
  void step_single(StreamFunction& stream) const;
  /// Single uncoupled step with the given integration index (1 or 2) force.
  void step_single(StreamFunction& stream, int which) const;

 private:
  void advance(SpectralField& psi, const SpectralField& nonlinear, const SpectralField& force,
               const SpectralField* coupling) const;
  void check_health(const StreamFunction& s, double t) const;

  SimConfig cfg_;
  BodyForce force1_;
  BodyForce force2_;
  std::vector<double> decay_;  ///< E per mode, 0 outside the dealias mask
  double blowup_limit2_ = 0.0; ///< (1e6 rho_0)^2, 0 disables the bound
};

PairState step_pair(const PairState& state, const SimConfig& cfg, const IntertwinementSpec& spec,
                    const BodyForce& f1, const BodyForce& f2);
StreamFunction step_single(const StreamFunction& stream, const SimConfig& cfg, const BodyForce& f);

/// Periodic checkpoints written while spinning up.
struct CheckpointPolicy {
  std::filesystem::path directory;
  double every = 100.0;  ///< model time between checkpoints
  std::string stem = "spinup";
};

/// Path of the checkpoint a policy writes at `step`.
std::filesystem::path checkpoint_path(const CheckpointPolicy& policy, std::uint64_t step);

/// Evolves from psi = 0 for `duration` under the force of cfg.forcing.
StreamFunction spin_up(const SimConfig& cfg, double duration, const CheckpointPolicy* policy = nullptr);
/// Continues a spin-up from a saved state until total time `duration`.
StreamFunction resume_spin_up(const PairState& from, const SimConfig& cfg, double duration,
                              const CheckpointPolicy* policy = nullptr);

/// Evolves a copy of `stream` for `duration` with the uncoupled equation.
StreamFunction decorrelate(const StreamFunction& stream, const SimConfig& cfg, double duration = 100.0);

}  // namespace nsesync
