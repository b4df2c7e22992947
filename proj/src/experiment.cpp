#include "nsesync/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <ostream>

#include "nsesync/checkpoint.hpp"
#include "nsesync/config.hpp"

namespace nsesync {

namespace {

std::string num17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

StreamFunction load_field(const std::filesystem::path& path, const SpectralGrid& grid, int which) {
  const Checkpoint ck = load_checkpoint(path);
  require_resolution(ck, grid);
  return which == 2 ? ck.state.psi2 : ck.state.psi1;
}

}  // namespace

void ExperimentConfig::validate() const {
  sim.validate();
  if (record_every < 1) throw std::invalid_argument("record_every must be at least 1");
  nsesync::validate(intertwinement, sim.grid);
  if (!(init.decorrelate_time >= 0.0)) throw std::invalid_argument("decorrelate_time must be nonnegative");
  if (!(spinup_duration >= 0.0)) throw std::invalid_argument("spinup_duration must be nonnegative");
  if (!(checkpoint_every > 0.0)) throw std::invalid_argument("checkpoint_every must be positive");
  if (init.mode == InitMode::FromCheckpoints && init.checkpoint1.empty()) {
    throw std::invalid_argument("checkpoint init needs experiment.checkpoint1");
  }
  if (!(thresholds.split >= 0.0 && thresholds.split <= 1.0)) throw std::invalid_argument("thresholds.split must lie in [0, 1]");
  for (const ForcingSpec* f : {&sim.forcing, forcing2 ? &*forcing2 : nullptr}) {
    if (f == nullptr) continue;
    if (f->band_low < 0 || f->band_high < f->band_low) throw std::invalid_argument("forcing band must satisfy 0 <= low <= high");
    if (!(f->grashof_target >= 0.0)) throw std::invalid_argument("forcing grashof must be nonnegative");
  }
}

std::pair<BodyForce, BodyForce> build_forces(const ExperimentConfig& cfg) {
  BodyForce f1 = make_band_forcing(cfg.sim.forcing, cfg.sim.grid);
  if (!cfg.forcing2) return {f1, f1};
  return {std::move(f1), make_band_forcing(*cfg.forcing2, cfg.sim.grid)};
}

ErrorRecord measure_error(const PairState& state, double cutoff) {
  const SpectralField w = state.psi1.psi - state.psi2.psi;
  ErrorRecord r;
  r.t = state.t;
  r.err_h = norm_hn(w, 1);
  r.err_v = norm_hn(w, 2);
  r.err_low = norm_hn(project_low(w, cutoff), 1);
  r.err_high = norm_hn(project_high(w, cutoff), 1);
  r.energy1 = norm_hn_squared(state.psi1.psi, 1);
  r.energy2 = norm_hn_squared(state.psi2.psi, 1);
  return r;
}

void write_series_csv(std::ostream& out, const std::vector<ErrorRecord>& series) {
  out << kSeriesHeader << '\n';
  for (const auto& r : series) {
    out << num17(r.t) << ',' << num17(r.err_h) << ',' << num17(r.err_v) << ',' << num17(r.err_low) << ','
        << num17(r.err_high) << ',' << num17(r.energy1) << ',' << num17(r.energy2) << '\n';
  }
}

void write_series_csv(const std::filesystem::path& path, const std::vector<ErrorRecord>& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write series: " + path.string());
  write_series_csv(out, series);
  if (!out) throw std::runtime_error("failed writing series: " + path.string());
}

double error_value(const ErrorRecord& r, ErrorField field) {
  switch (field) {
    case ErrorField::H:
      return r.err_h;
    case ErrorField::V:
      return r.err_v;
    case ErrorField::Low:
      return r.err_low;
    case ErrorField::High:
      return r.err_high;
  }
  return r.err_h;
}

std::pair<double, double> decay_window(const std::vector<ErrorRecord>& series, ErrorField field,
                                       double floor_ratio) {
  if (series.empty()) throw std::invalid_argument("cannot fit an empty series");
  const double t0 = series.front().t;
  double tb = series.back().t;
  const double e0 = error_value(series.front(), field);
  for (const auto& r : series) {
    if (error_value(r, field) < floor_ratio * e0) {
      tb = r.t;
      break;
    }
  }
  return {t0 + 0.5 * (tb - t0), tb};
}

RateFit fit_decay_rate(const std::vector<ErrorRecord>& series, std::optional<std::pair<double, double>> window,
                       ErrorField field) {
  if (series.empty()) throw std::invalid_argument("cannot fit an empty series");
  if (!window) {
    const double t0 = series.front().t;
    const double t1 = series.back().t;
    window = std::pair{t0 + 0.5 * (t1 - t0), t1};
  }
  const auto [ta, tb] = *window;
  std::vector<double> xs, ys;
  for (const auto& r : series) {
    if (r.t < ta || r.t > tb) continue;
    const double e = error_value(r, field);
    if (!(e > 0.0)) {
      throw std::domain_error("nonpositive error sample at t=" + num17(r.t) + "; shrink the fit window to exclude it");
    }
    xs.push_back(r.t);
    ys.push_back(std::log(e));
  }
  if (xs.size() < 10) {
    throw std::invalid_argument("fit window holds " + std::to_string(xs.size()) + " samples; at least 10 are needed");
  }
  // shift by the first sample so a constant series has exactly zero spread
  const double y0 = ys.front();
  for (double& y : ys) y -= y0;
  const double n = double(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit window spans a single time");
  RateFit fit;
  fit.rate = sxy / sxx;
  const double ssr = std::max(0.0, syy - fit.rate * sxy);
  fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  fit.stderr_rate = std::sqrt(ssr / (n - 2.0) / sxx);
  fit.window = {xs.front(), xs.back()};
  fit.samples = xs.size();
  return fit;
}

StreamFunction base_state(const ExperimentConfig& cfg) {
  if (!cfg.base_checkpoint.empty()) return load_field(cfg.base_checkpoint, cfg.sim.grid, 1);
  return spin_up(cfg.sim, cfg.spinup_duration);
}

PairState initial_pair(const ExperimentConfig& cfg, const StreamFunction* base) {
  const SpectralGrid& grid = cfg.sim.grid;
  if (cfg.init.mode == InitMode::FromCheckpoints) {
    StreamFunction v1 = load_field(cfg.init.checkpoint1, grid, 1);
    StreamFunction v2 = cfg.init.checkpoint2.empty() ? load_field(cfg.init.checkpoint1, grid, 2)
                                                     : load_field(cfg.init.checkpoint2, grid, 1);
    return {std::move(v1), std::move(v2), 0.0, 0};
  }
  StreamFunction v1 = base != nullptr ? *base : base_state(cfg);
  if (!(v1.grid() == grid)) throw std::invalid_argument("base state does not match the configured grid");
  StreamFunction v2 = cfg.init.mode == InitMode::ProjectedLow
                          ? StreamFunction{project_low(v1.psi, cfg.intertwinement.cutoff)}
                          : decorrelate(v1, cfg.sim, cfg.init.decorrelate_time);
  return {std::move(v1), std::move(v2), 0.0, 0};
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const StreamFunction* base) {
  cfg.validate();
  const bool write = !cfg.output_dir.empty();
  if (write) {
    std::filesystem::create_directories(cfg.output_dir);
    write_manifest(cfg.output_dir / "manifest.ini", cfg);
  }
  auto [f1, f2] = build_forces(cfg);
  const Integrator integrator(cfg.sim, std::move(f1), std::move(f2));

  ExperimentResult result{{}, initial_pair(cfg, base)};
  PairState& state = result.final;
  const double cutoff = cfg.intertwinement.cutoff;
  const std::uint64_t total = cfg.sim.steps_for(cfg.sim.t_end);
  result.series.push_back(measure_error(state, cutoff));
  try {
    for (std::uint64_t s = 0; s < total; ++s) {
      integrator.step_pair(state, cfg.intertwinement);
      if (state.step % cfg.record_every == 0 || state.step == total) result.series.push_back(measure_error(state, cutoff));
    }
  } catch (const BlowUpError&) {
    if (write) write_series_csv(cfg.output_dir / "series.csv", result.series);
    throw;
  }
  if (write) {
    write_series_csv(cfg.output_dir / "series.csv", result.series);
    save_checkpoint(state, cfg.sim.dt, cfg.output_dir / "final.ckpt");
  }
  return result;
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "theta1") return SweepAxis::Theta1;
  if (name == "mu2") return SweepAxis::Mu2;
  if (name == "cutoff") return SweepAxis::Cutoff;
  throw std::invalid_argument("unknown sweep axis: " + name + " (expected theta1, mu2 or cutoff)");
}

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Theta1:
      return "theta1";
    case SweepAxis::Mu2:
      return "mu2";
    case SweepAxis::Cutoff:
      return "cutoff";
  }
  return "";
}

ExperimentConfig with_axis_value(const ExperimentConfig& cfg, SweepAxis axis, double value) {
  ExperimentConfig out = cfg;
  auto& variant = out.intertwinement.variant;
  switch (axis) {
    case SweepAxis::Theta1:
      if (auto* s = std::get_if<coupling::MutualSync>(&variant)) {
        s->theta1 = value;
        break;
      }
      throw std::invalid_argument("theta1 axis needs mutual_sync coupling");
    case SweepAxis::Mu2:
      if (auto* s = std::get_if<coupling::MutualNudge>(&variant)) {
        s->mu2 = value;
        break;
      }
      if (auto* s = std::get_if<coupling::SymmetricNudge>(&variant)) {
        s->mu2 = value;
        break;
      }
      throw std::invalid_argument("mu2 axis needs mutual_nudge or symmetric_nudge coupling");
    case SweepAxis::Cutoff:
      out.intertwinement.cutoff = value;
      break;
  }
  return out;
}

ThresholdReport threshold_report(const ExperimentConfig& cfg) {
  const auto& th = cfg.thresholds;
  if (th.grashof) return evaluate_thresholds(cfg.intertwinement, GrashofBundle::uniform_value(*th.grashof, cfg.sim.nu), th.constants);
  const auto [f1, f2] = build_forces(cfg);
  return evaluate_thresholds(cfg.intertwinement,
                             GrashofBundle::from_forces(f1, f2, cfg.sim.nu, th.tilde_mu, th.split), th.constants);
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                            const SweepOptions& options) {
  std::vector<SweepRow> rows(values.size());
  if (values.empty()) {
    if (!cfg.output_dir.empty()) write_summary_csv(cfg.output_dir / "summary.csv", axis, rows);
    return rows;
  }
  std::optional<StreamFunction> base;
  if (cfg.init.mode != InitMode::FromCheckpoints) base = base_state(cfg);

  auto run_one = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.value = values[i];
    try {
      ExperimentConfig c = with_axis_value(cfg, axis, values[i]);
      if (!cfg.output_dir.empty()) {
        char name[64];
        std::snprintf(name, sizeof name, "%02zu_%s_%g", i, sweep_axis_name(axis).c_str(), values[i]);
        c.output_dir = cfg.output_dir / name;
        row.directory = c.output_dir;
      }
      ExperimentResult r = run_experiment(c, base ? &*base : nullptr);
      row.series = std::move(r.series);
      row.final_err_h = row.series.back().err_h;
      try {
        row.fit = fit_decay_rate(row.series, decay_window(row.series));
      } catch (const std::exception&) {
      }
      try {
        row.verdict = threshold_report(c).cutoff_satisfied;
      } catch (const std::exception&) {
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  if (options.concurrent) {
    std::vector<std::future<void>> jobs;
    for (std::size_t i = 0; i < values.size(); ++i) jobs.push_back(std::async(std::launch::async, run_one, i));
    for (auto& j : jobs) j.get();
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) run_one(i);
  }
  if (!cfg.output_dir.empty()) write_summary_csv(cfg.output_dir / "summary.csv", axis, rows);
  return rows;
}

void write_summary_csv(const std::filesystem::path& path, SweepAxis axis, const std::vector<SweepRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary: " + path.string());
  out << sweep_axis_name(axis) << ",final_err_h,rate,rate_stderr,r_squared,threshold_verdict,error\n";
  for (const auto& r : rows) {
    out << num17(r.value) << ',' << (r.final_err_h ? num17(*r.final_err_h) : "") << ','
        << (r.fit ? num17(r.fit->rate) : "") << ',' << (r.fit ? num17(r.fit->stderr_rate) : "") << ','
        << (r.fit ? num17(r.fit->r_squared) : "") << ','
        << (r.verdict ? (*r.verdict ? "satisfied" : "violated") : "n/a") << ',';
    std::string msg = r.error;
    for (char& ch : msg) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out << msg << '\n';
  }
}

}  // namespace nsesync
