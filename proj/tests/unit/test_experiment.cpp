#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "nsesync/checkpoint.hpp"
#include "nsesync/experiment.hpp"

using namespace nsesync;

namespace {

std::vector<ErrorRecord> synthetic(double dt, int n, double (*f)(double)) {
  std::vector<ErrorRecord> out;
  for (int i = 0; i <= n; ++i) {
    ErrorRecord r;
    r.t = i * dt;
    r.err_h = f(r.t);
    out.push_back(r);
  }
  return out;
}

ExperimentConfig small_experiment() {
  ExperimentConfig cfg;
  cfg.sim.grid = SpectralGrid(32);
  cfg.sim.nu = 0.01;
  cfg.sim.dt = 0.01;
  cfg.sim.t_end = 0.5;
  cfg.sim.forcing.band_low = 2;
  cfg.sim.forcing.band_high = 5;
  cfg.sim.forcing.grashof_target = 2000.0;
  cfg.sim.forcing.viscosity = cfg.sim.nu;
  cfg.intertwinement = {coupling::MutualSync{0.5}, 5.0};
  cfg.spinup_duration = 0.5;
  cfg.record_every = 5;
  return cfg;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / "nsesync_exp" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(RateFit, ExactExponential) {
  const auto s = synthetic(0.1, 100, [](double t) { return std::exp(-2.0 * t); });
  const RateFit fit = fit_decay_rate(s);
  EXPECT_NEAR(fit.rate, -2.0, 1e-9);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_EQ(fit.samples, 51u);
  EXPECT_DOUBLE_EQ(fit.window.first, 5.0);
}

TEST(RateFit, Constant) {
  const auto s = synthetic(0.1, 50, [](double) { return 3.0; });
  const RateFit fit = fit_decay_rate(s);
  EXPECT_EQ(fit.rate, 0.0);
  EXPECT_EQ(fit.r_squared, 1.0);
}

TEST(RateFit, PerturbedExponential) {
  const auto s = synthetic(0.05, 400, [](double t) { return std::exp(-2.0 * t) * (1.0 + 0.05 * std::sin(7.0 * t)); });
  const RateFit fit = fit_decay_rate(s, std::pair{0.0, 20.0});
  EXPECT_NEAR(fit.rate, -2.0, 0.02);
  EXPECT_GT(fit.stderr_rate, 0.0);
  EXPECT_LT(fit.r_squared, 1.0);
}

TEST(RateFit, RejectsBadInput) {
  auto s = synthetic(0.1, 100, [](double t) { return std::exp(-t); });
  s[80].err_h = 0.0;
  EXPECT_THROW(fit_decay_rate(s), std::domain_error);
  EXPECT_NO_THROW(fit_decay_rate(s, std::pair{0.0, 7.0}));
  EXPECT_THROW(fit_decay_rate(s, std::pair{0.0, 0.8}), std::invalid_argument);
  EXPECT_THROW(fit_decay_rate({}), std::invalid_argument);
}

TEST(RateFit, DecayWindowStopsAtFloor) {
  auto s = synthetic(0.1, 200, [](double t) { return std::max(std::exp(-4.0 * t), 1e-16); });
  const auto w = decay_window(s);
  // exp(-4t) < 1e-13 first at t = 7.5
  EXPECT_NEAR(w.second, 7.5, 1e-9);
  EXPECT_NEAR(w.first, 3.75, 1e-9);
  EXPECT_NEAR(fit_decay_rate(s, w).rate, -4.0, 1e-9);
  const auto flat = synthetic(0.1, 100, [](double) { return 1.0; });
  EXPECT_EQ(decay_window(flat), std::pair(5.0, 10.0));
}

TEST(Experiment, MeasureErrorPythagoras) {
  const auto cfg = small_experiment();
  const PairState s = initial_pair([&] {
    auto c = cfg;
    c.init.mode = InitMode::Decorrelated;
    c.init.decorrelate_time = 1.0;
    return c;
  }());
  const ErrorRecord r = measure_error(s, 5.0);
  EXPECT_GT(r.err_h, 0.0);
  EXPECT_NEAR(r.err_h * r.err_h, r.err_low * r.err_low + r.err_high * r.err_high, 1e-12 * r.err_h * r.err_h);
  EXPECT_EQ(r.energy1, norm_hn_squared(s.psi1.psi, 1));
}

TEST(Experiment, ProjectedLowInit) {
  const auto cfg = small_experiment();
  const StreamFunction base = base_state(cfg);
  const PairState s = initial_pair(cfg, &base);
  EXPECT_EQ(s.psi1, base);
  EXPECT_EQ(s.psi2.psi, project_low(base.psi, 5.0));
  EXPECT_EQ(s.t, 0.0);
}

TEST(Experiment, IdenticalCheckpointStartsStayIdentical) {
  auto cfg = small_experiment();
  const auto dir = scratch("identical");
  const StreamFunction base = base_state(cfg);
  const auto ck = dir / "base.ckpt";
  save_checkpoint(PairState{base, base, 0.5, 50}, cfg.sim.dt, ck);
  cfg.init = {InitMode::FromCheckpoints, 100.0, ck, ck};
  cfg.intertwinement = {coupling::Trivial{}, 5.0};
  cfg.output_dir = dir / "run";
  const ExperimentResult r = run_experiment(cfg);
  ASSERT_EQ(r.series.size(), 11u);
  for (const auto& rec : r.series) EXPECT_EQ(rec.err_h, 0.0);
  EXPECT_EQ(r.final.psi1, r.final.psi2);
  EXPECT_EQ(r.final.step, 50u);
  EXPECT_TRUE(std::filesystem::exists(cfg.output_dir / "series.csv"));
  EXPECT_TRUE(std::filesystem::exists(cfg.output_dir / "manifest.ini"));
  EXPECT_EQ(load_checkpoint(cfg.output_dir / "final.ckpt").state, r.final);
  EXPECT_EQ(slurp(cfg.output_dir / "series.csv").rfind(std::string(kSeriesHeader) + "\n", 0), 0u);
}

TEST(Experiment, MissingCheckpoint) {
  auto cfg = small_experiment();
  cfg.init = {InitMode::FromCheckpoints, 100.0, scratch("missing") / "nope.ckpt", {}};
  EXPECT_THROW(run_experiment(cfg), CheckpointMissing);
}

TEST(Experiment, RecordsIncludeFinalStep) {
  auto cfg = small_experiment();
  cfg.sim.t_end = 0.23;
  const StreamFunction base = base_state(cfg);
  const auto r = run_experiment(cfg, &base);
  ASSERT_EQ(r.series.size(), 6u);
  EXPECT_DOUBLE_EQ(r.series.back().t, 0.23);
  EXPECT_DOUBLE_EQ(r.series[4].t, 0.2);
}

TEST(Sweep, EmptyAxisWritesHeaderOnly) {
  auto cfg = small_experiment();
  cfg.output_dir = scratch("empty");
  const auto rows = sweep(cfg, SweepAxis::Theta1, {});
  EXPECT_TRUE(rows.empty());
  EXPECT_EQ(slurp(cfg.output_dir / "summary.csv"),
            "theta1,final_err_h,rate,rate_stderr,r_squared,threshold_verdict,error\n");
}

TEST(Sweep, SerialAndConcurrentAgree) {
  auto cfg = small_experiment();
  cfg.base_checkpoint.clear();
  const auto serial_dir = scratch("serial"), concurrent_dir = scratch("concurrent");
  cfg.output_dir = serial_dir;
  const auto a = sweep(cfg, SweepAxis::Theta1, {0.0, 0.5, 1.0}, SweepOptions{false});
  cfg.output_dir = concurrent_dir;
  const auto b = sweep(cfg, SweepAxis::Theta1, {0.0, 0.5, 1.0}, SweepOptions{true});
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(a[i].error.empty()) << a[i].error;
    EXPECT_EQ(a[i].final_err_h, b[i].final_err_h);
    EXPECT_EQ(slurp(a[i].directory / "series.csv"), slurp(b[i].directory / "series.csv"));
  }
  EXPECT_EQ(slurp(serial_dir / "summary.csv"), slurp(concurrent_dir / "summary.csv"));
}

TEST(Sweep, AxisMustApply) {
  const auto cfg = small_experiment();
  EXPECT_THROW(with_axis_value(cfg, SweepAxis::Mu2, 1.0), std::invalid_argument);
  EXPECT_EQ(with_axis_value(cfg, SweepAxis::Cutoff, 3.0).intertwinement.cutoff, 3.0);
  EXPECT_EQ(parse_sweep_axis("mu2"), SweepAxis::Mu2);
  EXPECT_THROW(parse_sweep_axis("nu"), std::invalid_argument);
  auto bad = cfg;
  EXPECT_EQ(sweep(bad, SweepAxis::Cutoff, {100.0})[0].error, "observation cutoff exceeds resolved band");
}
