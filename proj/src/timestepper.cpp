#include "nsesync/timestepper.hpp"

#include <cmath>
#include <sstream>

#include "nsesync/checkpoint.hpp"

namespace nsesync {

double SimConfig::viscous_stiffness() const {
  const double kmax = grid.max_resolved();
  return dt * nu * 2.0 * kmax * kmax;
}

void SimConfig::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("viscosity must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("timestep must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be nonnegative");
}

std::uint64_t SimConfig::steps_for(double duration) const {
  if (!(duration >= 0.0)) throw std::invalid_argument("duration must be nonnegative");
  return std::uint64_t(std::llround(duration / dt));
}

namespace {

std::string describe(double t, const std::string& what) {
  std::ostringstream os;
  os.precision(17);
  os << "blow-up at t=" << t << ": " << what;
  return os.str();
}

}  // namespace

BlowUpError::BlowUpError(double t, std::string detail, std::string last_checkpoint)
    : std::runtime_error(describe(t, detail) +
                         (last_checkpoint.empty() ? std::string() : " (last good checkpoint: " + last_checkpoint + ")")),
      t_(t),
      last_checkpoint_(std::move(last_checkpoint)) {}

Integrator::Integrator(const SimConfig& cfg, BodyForce force1, BodyForce force2)
    : cfg_(cfg), force1_(std::move(force1)), force2_(std::move(force2)) {
  cfg_.validate();
  if (!(force1_.grid() == cfg_.grid) || !(force2_.grid() == cfg_.grid)) {
    throw std::invalid_argument("force fields do not match the simulation grid");
  }
  const SpectralGrid& grid = cfg_.grid;
  const int n = grid.resolution();
  decay_.assign(grid.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    const int kx = grid.wavenumber(i);
    for (int j = 0; j < n; ++j) {
      const int ky = grid.wavenumber(j);
      if (!grid.resolved({kx, ky})) continue;
      decay_[grid.flat(i, j)] = std::exp(-cfg_.nu * double(kx * kx + ky * ky) * cfg_.dt);
    }
  }
  double rho0 = 0.0;
  for (const BodyForce* f : {&force1_, &force2_}) {
    if (!f->potential.is_zero()) rho0 = std::max(rho0, absorbing_radii(*f, cfg_.nu).rho0);
  }
  const double limit = 1e6 * rho0;
  blowup_limit2_ = limit * limit;
}

Integrator::Integrator(const SimConfig& cfg)
    : Integrator(cfg, make_band_forcing(cfg.forcing, cfg.grid), make_band_forcing(cfg.forcing, cfg.grid)) {}

void Integrator::advance(SpectralField& psi, const SpectralField& nonlinear, const SpectralField& force,
                         const SpectralField* coupling) const {
  const double dt = cfg_.dt;
  auto p = psi.coeffs();
  const auto nl = nonlinear.coeffs();
  const auto g = force.coeffs();
  if (coupling != nullptr) {
    const auto c = coupling->coeffs();
    for (std::size_t f = 0; f < p.size(); ++f) p[f] = decay_[f] * (p[f] + dt * ((c[f] - nl[f]) + g[f]));
  } else {
    for (std::size_t f = 0; f < p.size(); ++f) p[f] = decay_[f] * (p[f] + dt * (g[f] - nl[f]));
  }
}

void Integrator::check_health(const StreamFunction& s, double t) const {
  const double energy = norm_hn_squared(s.psi, 1);
  if (!std::isfinite(energy)) throw BlowUpError(t, "non-finite coefficient");
  if (blowup_limit2_ > 0.0 && energy > blowup_limit2_) {
    throw BlowUpError(t, "|u| exceeds 1e6 rho_0");
  }
}

void Integrator::step_pair(PairState& state, const IntertwinementSpec& spec) const {
  NonlinearTerms b{nse_nonlinear_term(state.psi1), nse_nonlinear_term(state.psi2)};
  if (std::holds_alternative<coupling::Trivial>(spec.variant)) {
    advance(state.psi1.psi, b.first, force1_.potential, nullptr);
    advance(state.psi2.psi, b.second, force2_.potential, nullptr);
  } else {
    const CouplingTerms c = coupling_terms(spec, state.psi1, state.psi2, &b);
    advance(state.psi1.psi, b.first, force1_.potential, &c.first);
    advance(state.psi2.psi, b.second, force2_.potential, &c.second);
  }
  ++state.step;
  state.t = double(state.step) * cfg_.dt;
  check_health(state.psi1, state.t);
  check_health(state.psi2, state.t);
}

void Integrator::step_single(StreamFunction& stream) const { step_single(stream, 1); }

void Integrator::step_single(StreamFunction& stream, int which) const {
  const SpectralField nl = nse_nonlinear_term(stream);
  advance(stream.psi, nl, which == 2 ? force2_.potential : force1_.potential, nullptr);
}

PairState step_pair(const PairState& state, const SimConfig& cfg, const IntertwinementSpec& spec,
                    const BodyForce& f1, const BodyForce& f2) {
  PairState next = state;
  Integrator(cfg, f1, f2).step_pair(next, spec);
  return next;
}

StreamFunction step_single(const StreamFunction& stream, const SimConfig& cfg, const BodyForce& f) {
  StreamFunction next = stream;
  Integrator(cfg, f, f).step_single(next);
  return next;
}

std::filesystem::path checkpoint_path(const CheckpointPolicy& policy, std::uint64_t step) {
  std::ostringstream name;
  name << policy.stem << "_step" << step << ".ckpt";
  return policy.directory / name.str();
}

StreamFunction resume_spin_up(const PairState& from, const SimConfig& cfg, double duration,
                              const CheckpointPolicy* policy) {
  const Integrator integrator(cfg);
  const std::uint64_t total = cfg.steps_for(duration);
  if (from.step > total) throw std::invalid_argument("resume point lies beyond the requested duration");
  std::uint64_t cadence = 0;
  if (policy != nullptr) {
    cadence = std::max<std::uint64_t>(1, cfg.steps_for(policy->every));
    std::filesystem::create_directories(policy->directory);
  }
  StreamFunction psi = from.psi1;
  std::string last_good;
  for (std::uint64_t step = from.step; step < total;) {
    integrator.step_single(psi);
    ++step;
    const double t = double(step) * cfg.dt;
    if (!std::isfinite(norm_hn_squared(psi.psi, 1))) throw BlowUpError(t, "non-finite coefficient", last_good);
    if (cadence != 0 && step % cadence == 0) {
      const auto path = checkpoint_path(*policy, step);
      save_checkpoint(PairState{psi, psi, t, step}, cfg.dt, path);
      last_good = path.string();
    }
  }
  return psi;
}

StreamFunction spin_up(const SimConfig& cfg, double duration, const CheckpointPolicy* policy) {
  return resume_spin_up(PairState::zero(cfg.grid), cfg, duration, policy);
}

StreamFunction decorrelate(const StreamFunction& stream, const SimConfig& cfg, double duration) {
  const Integrator integrator(cfg);
  StreamFunction psi = stream;
  const std::uint64_t steps = cfg.steps_for(duration);
  for (std::uint64_t s = 0; s < steps; ++s) {
    integrator.step_single(psi);
    if (!std::isfinite(norm_hn_squared(psi.psi, 1))) throw BlowUpError(double(s + 1) * cfg.dt, "non-finite coefficient");
  }
  return psi;
}

}  // namespace nsesync
