#pragma once

// Run orchestration: configuration, one seeded closed-loop run, and Monte
// Carlo batches with an ordered reduction over run indices.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fwsim/airframe.hpp"
#include "fwsim/config.hpp"
#include "fwsim/control.hpp"
#include "fwsim/flight.hpp"
#include "fwsim/metrics.hpp"
#include "fwsim/navigation.hpp"
#include "fwsim/scenarios.hpp"
#include "fwsim/sensors.hpp"
#include "fwsim/traces.hpp"

namespace fwsim {

inline constexpr double kTruthStep = 0.002;  ///< [s]
inline constexpr int kSensingDivider = 5;    ///< 100 Hz
inline constexpr int kControlDivider = 10;   ///< 50 Hz
inline constexpr int kCameraDivider = 50;    ///< 10 Hz
inline constexpr int kGnssDivider = 500;     ///< 1 Hz

enum class TruthTrace { Full, None };

struct RunConfig {
  MasterSeed master;
  int n_ex = 100;
  int scenario = 1;
  std::string zone = "DS";
  Integrator integrator = Integrator::SO3;
  std::string navigation = "ideal";
  TurbulenceSeverity turbulence = TurbulenceSeverity::Light;
  bool sensor_errors = true;
  bool geo_perturbation = true;
  std::optional<double> t_end;  ///< shortens the scenario
  std::map<SeedId, std::uint64_t> seed_overrides;
  ClassificationThresholds thresholds;

  std::filesystem::path airframe_file;  ///< empty: built-in values
  std::filesystem::path sensors_file;
  std::filesystem::path control_file;

  // Artifact plumbing; none of these enter the config hash.
  std::filesystem::path output_dir = "out";
  int parallelism = 1;
  /// Subset of run indices for a batch; empty means 1..n_ex.
  std::vector<int> run_indices;
  bool write_traces = true;
  TruthTrace truth_trace = TruthTrace::Full;
  int time_aggregate_stride = 100;  ///< epochs between rows of the time-aggregate file
};

/// Reads a run configuration; relative file paths resolve against the
/// directory of the file. Throws ConfigError on unknown keys, bad values or
/// missing referenced files.
RunConfig load_run_config(const KeyValueFile& file,
                          const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
/// Applies "key=value" overrides on top of a parsed file before loading.
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides);

/// Canonical text of every setting that influences results, including the
/// contents of the referenced model files.
std::string canonical_config(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

/// The twelve navigation error variables, in report order.
inline constexpr std::size_t kErrorVariableCount = 12;
struct ErrorVariable {
  const char* name;
  bool angular;
};
inline constexpr std::array<ErrorVariable, kErrorVariableCount> kErrorVariables = {{
    {"pos_north", false}, {"pos_east", false}, {"pos_hor", false}, {"h", false},
    {"v_north", false},   {"v_east", false},   {"v_down", false},  {"yaw", true},
    {"pitch", true},      {"roll", true},      {"Hp", false},      {"vtas", false},
}};
std::array<double, kErrorVariableCount> navigation_errors(const EstimatedState& est,
                                                          const EstimatedState& truth);

/// Flight technical error over one guidance segment, measured on the
/// estimate against the active target once `settle` seconds have elapsed.
struct SegmentFte {
  std::size_t index = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  std::string description;
  double vtas_target = 0.0;
  double max_vtas_error = 0.0;     ///< signed, largest magnitude after settling
  bool holds_hp = false;
  double hp_target = 0.0;
  double max_hp_error = 0.0;
  std::size_t settled_samples = 0;
};

struct VariableResult {
  TrajectoryMetrics metrics;
  double final_value = 0.0;
};

struct RunResult {
  int run_index = 0;
  TrajectorySeedSet seeds;
  bool ok = false;
  std::string failure;       ///< error class and message when !ok
  double failure_time = 0.0;
  std::size_t truth_epochs = 0;
  std::size_t estimate_epochs = 0;
  std::size_t control_epochs = 0;
  std::size_t camera_frames = 0;
  std::size_t gnss_fixes = 0;
  std::array<VariableResult, kErrorVariableCount> variables{};
  /// Error series per variable; filled only when requested.
  std::array<std::vector<double>, kErrorVariableCount> series;
  std::vector<SegmentFte> segments;
  double ground_distance = 0.0;     ///< flown over the ground [m]
  double max_radial_distance = 0.0; ///< from the start point [m]
  std::uint64_t digest = 0;         ///< hash of every propagated, estimated and control value
  double wall_seconds = 0.0;
};

/// Settling time ignored at the start of every segment for FTE.
inline constexpr double kFteSettle = 60.0;

struct RunOptions {
  bool write_traces = true;
  TruthTrace truth_trace = TruthTrace::Full;
  bool keep_series = false;
  std::filesystem::path run_dir;  ///< defaults to <output_dir>/run_XXXX
};

/// Resolved models shared by every run of a batch.
struct RunModels {
  Airframe airframe;
  SensorSpecs sensors;
  AutopilotGains gains;
  std::string config_hash;
};
RunModels load_models(const RunConfig& cfg);

/// One closed-loop run of run index j (1-based). Divergence and envelope
/// failures are reported in the result instead of thrown.
RunResult run_single(const RunConfig& cfg, int j, const RunOptions& opt);
RunResult run_single(const RunConfig& cfg, const RunModels& models, int j, const RunOptions& opt);

struct VariableReport {
  std::string name;
  AggregatedMetrics aggregated;
  FinalStateMetrics final_state;
  Classification classification;
};

struct MonteCarloReport {
  RunConfig config;
  std::string config_hash;
  std::vector<RunResult> runs;     ///< by run index; series released
  std::vector<int> failed;         ///< run indices excluded from aggregates
  std::vector<VariableReport> variables;
  std::array<TimeAggregatedMetrics, kErrorVariableCount> time;
};

/// Runs 1..n_ex, or the configured subset, on `parallelism` worker threads.
/// Results are reduced in list order, so reports do not depend on the degree
/// of parallelism.
/// When `write_outputs` is set, report files go to the output directory.
MonteCarloReport run_monte_carlo(const RunConfig& cfg, bool write_outputs = true);

void write_report(const MonteCarloReport& report, const std::filesystem::path& dir);
/// Human-readable metrics table.
std::string format_report(const MonteCarloReport& report);

/// Recomputes per-run metrics from stored estimated and truth_nav traces.
struct StoredRunMetrics {
  Provenance provenance;
  std::array<VariableResult, kErrorVariableCount> variables{};
  std::size_t epochs = 0;
};
StoredRunMetrics metrics_from_traces(const std::filesystem::path& run_dir);

}  // namespace fwsim
