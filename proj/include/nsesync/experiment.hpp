#pragma once

// Experiment protocols for an intertwined pair: initialization, recording of
// the synchronization error, decay-rate fitting and parameter sweeps.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsesync/intertwine.hpp"
#include "nsesync/timestepper.hpp"

namespace nsesync {

enum class InitMode {
  ProjectedLow,     ///< v_2(0) = P_N v_1(0)
  Decorrelated,     ///< v_2(0) = v_1(0) evolved uncoupled for decorrelate_time
  FromCheckpoints,  ///< fields read from checkpoint files
};

struct InitSpec {
  InitMode mode = InitMode::ProjectedLow;
  double decorrelate_time = 100.0;
  /// FromCheckpoints: v_1 is field 1 of checkpoint1; v_2 is field 1 of
  /// checkpoint2 when given, otherwise field 2 of checkpoint1.
  std::filesystem::path checkpoint1;
  std::filesystem::path checkpoint2;
};

/// Threshold-evaluation knobs that do not affect the dynamics.
struct ThresholdOptions {
  AnalysisConstants constants;
  std::optional<double> grashof;  ///< replaces every Grashof quantity when set
  double split = 0.0;             ///< symmetric-nudge force split, see GrashofBundle::from_forces
  double tilde_mu = 1.0;
};

struct ExperimentConfig {
  SimConfig sim;
  std::optional<ForcingSpec> forcing2;  ///< nullopt: both copies share sim.forcing
  IntertwinementSpec intertwinement;
  InitSpec init;
  std::uint64_t record_every = 10;
  std::filesystem::path output_dir;
  /// Base state for ProjectedLow / Decorrelated. Empty: spin up inline.
  std::filesystem::path base_checkpoint;
  double spinup_duration = 200.0;
  double checkpoint_every = 100.0;
  ThresholdOptions thresholds;
  std::string preset;

  /// Throws std::invalid_argument; called before any compute.
  void validate() const;
  ForcingSpec forcing_second() const { return forcing2.value_or(sim.forcing); }
};

/// Forces of both copies, built from the config.
std::pair<BodyForce, BodyForce> build_forces(const ExperimentConfig& cfg);

struct ErrorRecord {
  double t = 0.0;
  double err_h = 0.0;     ///< |w|, w = v_1 - v_2
  double err_v = 0.0;     ///< ||w||
  double err_low = 0.0;   ///< |P_N w|
  double err_high = 0.0;  ///< |Q_N w|
  double energy1 = 0.0;   ///< |v_1|^2
  double energy2 = 0.0;   ///< |v_2|^2
};

ErrorRecord measure_error(const PairState& state, double cutoff);

inline constexpr const char* kSeriesHeader = "t,err_h,err_v,err_low,err_high,energy1,energy2";
void write_series_csv(std::ostream& out, const std::vector<ErrorRecord>& series);
void write_series_csv(const std::filesystem::path& path, const std::vector<ErrorRecord>& series);

enum class ErrorField { H, V, Low, High };
double error_value(const ErrorRecord& r, ErrorField field);

struct RateFit {
  double rate = 0.0;       ///< slope of ln(error) against t
  double stderr_rate = 0.0;
  double r_squared = 1.0;
  std::pair<double, double> window{0.0, 0.0};
  std::size_t samples = 0;
};

/// Least-squares fit over records with t in [window.first, window.second]
/// (default: the last half of the recorded time span). Needs at least 10
/// samples, all strictly positive.
RateFit fit_decay_rate(const std::vector<ErrorRecord>& series, std::optional<std::pair<double, double>> window = {},
                       ErrorField field = ErrorField::H);

/// Default window for decay fits that stops before round-off: ends at the first
/// record below floor_ratio times the initial error (or at the last record)
/// and starts halfway there.
std::pair<double, double> decay_window(const std::vector<ErrorRecord>& series, ErrorField field = ErrorField::H,
                                       double floor_ratio = 1e-13);

struct ExperimentResult {
  std::vector<ErrorRecord> series;
  PairState final;
};

/// Base state shared by ProjectedLow and Decorrelated runs.
StreamFunction base_state(const ExperimentConfig& cfg);
PairState initial_pair(const ExperimentConfig& cfg, const StreamFunction* base = nullptr);

/// Steps to sim.t_end recording every record_every steps (plus the final step).
/// When output_dir is set, writes series.csv, final.ckpt and manifest.ini
/// there. A BlowUpError is rethrown after the partial series is written.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const StreamFunction* base = nullptr);

enum class SweepAxis { Theta1, Mu2, Cutoff };
SweepAxis parse_sweep_axis(const std::string& name);
std::string sweep_axis_name(SweepAxis axis);
/// Copy of cfg with the axis parameter set. Throws std::invalid_argument when
/// the axis does not apply to the coupling variant.
ExperimentConfig with_axis_value(const ExperimentConfig& cfg, SweepAxis axis, double value);

struct SweepRow {
  double value = 0.0;
  std::filesystem::path directory;
  std::vector<ErrorRecord> series;
  std::optional<double> final_err_h;
  std::optional<RateFit> fit;
  std::optional<bool> verdict;  ///< threshold check for the run's configuration
  std::string error;            ///< empty on success
};

struct SweepOptions {
  bool concurrent = true;
};

/// One run per axis value, each into output_dir/<axis>_<index>. Failures are
/// recorded per row. Writes summary.csv into output_dir when set.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                            const SweepOptions& options = {});
void write_summary_csv(const std::filesystem::path& path, SweepAxis axis, const std::vector<SweepRow>& rows);

/// Threshold report for the configuration's coupling and forces.
ThresholdReport threshold_report(const ExperimentConfig& cfg);

}  // namespace nsesync
