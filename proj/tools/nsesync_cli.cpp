// nsesync: batch driver for intertwined Navier-Stokes synchronization runs.
//
//   nsesync spinup     --preset desk --out runs/base
//   nsesync run        --config exp.ini --set intertwinement.mu2=25 --out runs/a
//   nsesync sweep      --axis theta1 --values 0,0.25,0.5 --out runs/theta
//   nsesync thresholds --config exp.ini
//   nsesync spectrum   --checkpoint runs/base/spinup.ckpt

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nsesync/checkpoint.hpp"
#include "nsesync/config.hpp"
#include "nsesync/experiment.hpp"

namespace {

using namespace nsesync;

constexpr int kExitMissingCheckpoint = 2;

struct Common {
  std::string preset = "desk";
  std::string config;
  std::vector<std::string> sets;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool needs_out) {
  cmd->add_option("--preset", c.preset, "desk, paper-text or paper-figure")
      ->check(CLI::IsMember({"desk", "paper-text", "paper-figure"}));
  cmd->add_option("--config", c.config, "INI config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.sets, "override, section.key=value (repeatable)");
  auto* out = cmd->add_option("--out", c.out, "output directory");
  if (needs_out) out->required();
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = resolve_config({c.preset, c.config, c.sets});
  cfg.output_dir = c.out;
  return cfg;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("bad sweep value: " + item);
    out.push_back(v);
  }
  return out;
}

int cmd_spinup(const Common& c, const std::string& resume) {
  ExperimentConfig cfg = resolve(c);
  const std::filesystem::path dir = c.out;
  std::filesystem::create_directories(dir);
  write_manifest(dir / "manifest.ini", cfg);
  CheckpointPolicy policy{dir / "checkpoints", cfg.checkpoint_every, "spinup"};
  StreamFunction psi = [&] {
    if (resume.empty()) return spin_up(cfg.sim, cfg.spinup_duration, &policy);
    const Checkpoint ck = load_checkpoint(resume);
    require_resolution(ck, cfg.sim.grid);
    return resume_spin_up(ck.state, cfg.sim, cfg.spinup_duration, &policy);
  }();
  const std::uint64_t steps = cfg.sim.steps_for(cfg.spinup_duration);
  save_checkpoint(PairState{psi, psi, double(steps) * cfg.sim.dt, steps}, cfg.sim.dt, dir / "spinup.ckpt");
  std::cout << "wrote " << (dir / "spinup.ckpt").string() << " (t=" << num(double(steps) * cfg.sim.dt)
            << ", energy=" << num(norm_hn_squared(psi.psi, 1)) << ")\n";
  return 0;
}

int cmd_run(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const ExperimentResult r = run_experiment(cfg);
  const ErrorRecord& last = r.series.back();
  std::cout << "t=" << num(last.t) << " err_h=" << num(last.err_h) << " err_low=" << num(last.err_low)
            << " err_high=" << num(last.err_high) << '\n';
  try {
    const RateFit fit = fit_decay_rate(r.series, decay_window(r.series));
    std::cout << "rate=" << num(fit.rate) << " +- " << num(fit.stderr_rate) << " r2=" << num(fit.r_squared) << '\n';
  } catch (const std::exception& e) {
    std::cout << "rate fit unavailable: " << e.what() << '\n';
  }
  return 0;
}

int cmd_sweep(const Common& c, const std::string& axis_name, const std::string& values, bool serial) {
  const ExperimentConfig cfg = resolve(c);
  const SweepAxis axis = parse_sweep_axis(axis_name);
  const std::vector<double> list = parse_values(values);
  for (double v : list) with_axis_value(cfg, axis, v).validate();
  std::filesystem::create_directories(c.out);
  write_manifest(std::filesystem::path(c.out) / "manifest.ini", cfg);
  const auto rows = sweep(cfg, axis, list, SweepOptions{!serial});
  int failed = 0;
  for (const auto& row : rows) {
    std::cout << axis_name << '=' << num(row.value) << ' ';
    if (!row.error.empty()) {
      ++failed;
      std::cout << "failed: " << row.error << '\n';
      continue;
    }
    std::cout << "final_err_h=" << num(*row.final_err_h);
    if (row.fit) std::cout << " rate=" << num(row.fit->rate);
    std::cout << '\n';
  }
  std::cout << "summary: " << (std::filesystem::path(c.out) / "summary.csv").string() << '\n';
  return failed == 0 ? 0 : 1;
}

int cmd_thresholds(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const ThresholdReport report = threshold_report(cfg);
  std::cout << "variant = " << variant_name(cfg.intertwinement.variant) << '\n';
  for (const auto& e : report.entries) std::cout << e.key << " = " << num(e.value) << '\n';
  std::cout << "cutoff_satisfied = "
            << (report.cutoff_satisfied ? (*report.cutoff_satisfied ? "yes" : "no") : "n/a") << '\n';
  for (const auto& n : report.notes) std::cout << "note = " << n << '\n';
  std::cout << "note = constants C_L, C_A, C_S are unknown; thresholds are scale estimates\n";
  return 0;
}

int cmd_spectrum(const std::string& path, int field, const std::string& out) {
  const Checkpoint ck = load_checkpoint(path);
  const PairState& s = ck.state;
  const auto spectrum = velocity_energy_spectrum(field == 2 ? s.psi2 : s.psi1);
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw std::runtime_error("cannot write " + out);
  }
  std::ostream& os = out.empty() ? std::cout : file;
  os << "shell,energy\n";
  for (const auto& e : spectrum) os << e.shell << ',' << num(e.energy) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchronization experiments for intertwined 2D Navier-Stokes pairs"};
  app.require_subcommand(1);

  Common spin_c, run_c, sweep_c, thr_c;
  std::string resume;
  auto* spin = app.add_subcommand("spinup", "evolve from rest and write spinup.ckpt");
  add_common(spin, spin_c, true);
  spin->add_option("--resume", resume, "continue from a spin-up checkpoint");

  auto* run = app.add_subcommand("run", "single experiment: series.csv, final.ckpt, manifest.ini");
  add_common(run, run_c, true);

  std::string axis, values;
  bool serial = false;
  auto* sw = app.add_subcommand("sweep", "one run per axis value plus summary.csv");
  add_common(sw, sweep_c, true);
  sw->add_option("--axis", axis, "theta1, mu2 or cutoff")->required()->check(CLI::IsMember({"theta1", "mu2", "cutoff"}));
  sw->add_option("--values", values, "comma-separated axis values")->required();
  sw->add_flag("--serial", serial, "run sequentially");

  auto* thr = app.add_subcommand("thresholds", "print threshold bounds for a config");
  add_common(thr, thr_c, false);

  std::string ckpt, spec_out;
  int field = 1;
  auto* spec = app.add_subcommand("spectrum", "shell energy spectrum of a checkpoint as CSV");
  spec->add_option("--checkpoint", ckpt, "checkpoint file")->required();
  spec->add_option("--field", field, "1 or 2")->check(CLI::IsMember({1, 2}));
  spec->add_option("--out", spec_out, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*spin) return cmd_spinup(spin_c, resume);
    if (*run) return cmd_run(run_c);
    if (*sw) return cmd_sweep(sweep_c, axis, values, serial);
    if (*thr) return cmd_thresholds(thr_c);
    if (*spec) return cmd_spectrum(ckpt, field, spec_out);
  } catch (const CheckpointMissing& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMissingCheckpoint;
  } catch (const BlowUpError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
