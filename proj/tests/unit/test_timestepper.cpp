#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "nsesync/checkpoint.hpp"
#include "nsesync/timestepper.hpp"
#include "unit/oracles.hpp"

using namespace nsesync;

namespace {

SimConfig small_config(int n = 32) {
  SimConfig cfg;
  cfg.grid = SpectralGrid(n);
  cfg.nu = 0.01;
  cfg.dt = 0.01;
  cfg.forcing.band_low = 2;
  cfg.forcing.band_high = 5;
  cfg.forcing.grashof_target = 2000.0;
  cfg.forcing.viscosity = cfg.nu;
  return cfg;
}

BodyForce zero_force(const SpectralGrid& g) { return BodyForce{SpectralField(g)}; }

}  // namespace

TEST(SimConfig, StepsAndValidation) {
  SimConfig cfg;
  EXPECT_EQ(cfg.steps_for(200.0), 40000u);
  EXPECT_EQ(cfg.steps_for(0.0), 0u);
  cfg.dt = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Timestepper, ShearModeDecaysExactly) {
  SimConfig cfg = small_config(16);
  SpectralField psi(cfg.grid);
  psi.set_mode({1, 0}, Complex(0.5, 0.0));
  const Integrator integ(cfg, zero_force(cfg.grid), zero_force(cfg.grid));
  StreamFunction s{psi};
  const int steps = 1000;
  for (int i = 0; i < steps; ++i) integ.step_single(s);
  const double expected = 0.5 * std::exp(-cfg.nu * cfg.dt * steps);
  EXPECT_NEAR((s.psi[{1, 0}].real()), expected, 1e-12 * expected);
  EXPECT_NEAR((s.psi[{-1, 0}].real()), expected, 1e-12 * expected);
}

TEST(Timestepper, MatchesScalarReference) {
  const SimConfig cfg = small_config(8);
  const SpectralField psi = oracle::random_dealiased(cfg.grid, 21);
  const SpectralField phi = oracle::random_dealiased(cfg.grid, 22);
  const BodyForce f{phi};
  const StreamFunction next = step_single(StreamFunction{psi}, cfg, f);
  const SpectralField ref = oracle::scalar_step(psi, phi, cfg.nu, cfg.dt);
  EXPECT_LE(norm_hn(next.psi - ref, 0), 1e-13 * norm_hn(ref, 0));
}

TEST(Timestepper, SingleStepEqualsUncoupledPair) {
  const SimConfig cfg = small_config();
  const Integrator integ(cfg);
  PairState s{{oracle::random_dealiased(cfg.grid, 1)}, {oracle::random_dealiased(cfg.grid, 2)}, 0.0, 0};
  StreamFunction a = s.psi1, b = s.psi2;
  integ.step_pair(s, IntertwinementSpec{coupling::Trivial{}, 5.0});
  integ.step_single(a);
  integ.step_single(b);
  EXPECT_EQ(s.psi1, a);
  EXPECT_EQ(s.psi2, b);
  EXPECT_EQ(s.step, 1u);
  EXPECT_EQ(s.t, cfg.dt);
}

TEST(Timestepper, MutualSyncLowModesContractByIntegratingFactor) {
  const SimConfig cfg = small_config();
  const Integrator integ(cfg);
  const double cutoff = 6.0;
  PairState s{{oracle::random_dealiased(cfg.grid, 3)}, {oracle::random_dealiased(cfg.grid, 4)}, 0.0, 0};
  const SpectralField w0 = project_low(s.psi1.psi - s.psi2.psi, cutoff);
  integ.step_pair(s, IntertwinementSpec{coupling::MutualSync{0.3}, cutoff});
  const SpectralField w1 = project_low(s.psi1.psi - s.psi2.psi, cutoff);
  const SpectralGrid& g = cfg.grid;
  double err = 0.0, scale = 0.0;
  for (int i = 0; i < g.resolution(); ++i) {
    for (int j = 0; j < g.resolution(); ++j) {
      const WaveVector k{g.wavenumber(i), g.wavenumber(j)};
      const double e = std::exp(-cfg.nu * double(k.kx * k.kx + k.ky * k.ky) * cfg.dt);
      err = std::max(err, std::abs(w1[k] - e * w0[k]));
      scale = std::max(scale, std::abs(w0[k]));
    }
  }
  EXPECT_LE(err, 1e-13 * scale);
}

TEST(Timestepper, UnforcedEnergyDecreases) {
  SimConfig cfg = small_config();
  const Integrator integ(cfg, zero_force(cfg.grid), zero_force(cfg.grid));
  StreamFunction s{0.1 * oracle::random_dealiased(cfg.grid, 5)};
  double prev = norm_hn_squared(s.psi, 1);
  for (int i = 0; i < 200; ++i) {
    integ.step_single(s);
    const double e = norm_hn_squared(s.psi, 1);
    ASSERT_LE(e, prev) << "step " << i;
    prev = e;
  }
}

TEST(Timestepper, SpinUpFromRest) {
  const SimConfig cfg = small_config();
  EXPECT_TRUE(spin_up(cfg, 0.0).psi.is_zero());
  const StreamFunction s = spin_up(cfg, 0.5);
  EXPECT_GT(norm_hn(s.psi, 1), 0.0);
  EXPECT_EQ(s, spin_up(cfg, 0.5));
}

TEST(Timestepper, RestartFromCheckpointIsBitIdentical) {
  const SimConfig cfg = small_config();
  const auto dir = std::filesystem::path(::testing::TempDir()) / "nsesync_restart";
  std::filesystem::remove_all(dir);
  const CheckpointPolicy policy{dir, 0.5, "spin"};
  const StreamFunction full = spin_up(cfg, 1.0, &policy);
  const auto half = checkpoint_path(policy, 50);
  ASSERT_TRUE(std::filesystem::exists(half));
  ASSERT_TRUE(std::filesystem::exists(checkpoint_path(policy, 100)));
  const Checkpoint ck = load_checkpoint(half);
  EXPECT_EQ(ck.state.step, 50u);
  EXPECT_EQ(ck.state.t, 0.5);
  EXPECT_EQ(resume_spin_up(ck.state, cfg, 1.0), full);
  std::filesystem::remove_all(dir);
}

TEST(Timestepper, Decorrelate) {
  const SimConfig cfg = small_config();
  const StreamFunction base = spin_up(cfg, 1.0);
  EXPECT_EQ(decorrelate(base, cfg, 0.0), base);
  const StreamFunction d = decorrelate(base, cfg, 2.0);
  EXPECT_GT(norm_hn(d.psi - base.psi, 1), 0.1 * norm_hn(base.psi, 1));
  EXPECT_EQ(d, decorrelate(base, cfg, 2.0));
}

TEST(Timestepper, BlowUpIsReported) {
  const SimConfig cfg = small_config();
  const Integrator integ(cfg);
  SpectralField huge(cfg.grid);
  huge.set_mode({1, 1}, Complex(1e12, 0.0));
  PairState s{{huge}, {huge}, 0.0, 0};
  try {
    integ.step_pair(s, IntertwinementSpec{coupling::Trivial{}, 5.0});
    FAIL();
  } catch (const BlowUpError& e) {
    EXPECT_EQ(e.time(), cfg.dt);
    EXPECT_NE(std::string(e.what()).find("blow-up at t="), std::string::npos);
  }
  SpectralField bad(cfg.grid);
  bad.set_mode({2, 1}, Complex(std::nan(""), 0.0));
  PairState n{{bad}, {SpectralField(cfg.grid)}, 0.0, 0};
  EXPECT_THROW(integ.step_pair(n, IntertwinementSpec{coupling::Trivial{}, 5.0}), BlowUpError);
}
