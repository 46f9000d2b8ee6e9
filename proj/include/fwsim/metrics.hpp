#pragma once

// Error-series statistics: per-seed trajectory metrics, cross-seed
// aggregates, final-state aggregates, per-epoch (time) aggregates and the
// drift / bias classification built on them.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fwsim {

struct ErrorSeries {
  std::string variable;
  bool angular = false;
  std::vector<double> values;
};

/// est - truth per epoch; angular variables are differenced on the circle
/// and land in (-pi, pi]. Throws Error when lengths differ.
ErrorSeries error_series(std::span<const double> estimate, std::span<const double> truth,
                         std::string variable, bool angular = false);

/// Signed value with the largest magnitude (the first one on ties).
double signed_max_abs(std::span<const double> v);

struct TrajectoryMetrics {
  double mean = 0.0;
  double std = 0.0;  ///< population
  double max = 0.0;  ///< signed, largest magnitude
};
TrajectoryMetrics trajectory_metrics(std::span<const double> series);

/// Mean, population std and maximum magnitude of one quantity across seeds.
struct Spread {
  double mean = 0.0;
  double std = 0.0;
  double max = 0.0;
};

/// Cross-seed statistics of the per-seed mean, std and max. The max row is
/// aggregated over |max_j|.
struct AggregatedMetrics {
  Spread of_mean;
  Spread of_std;
  Spread of_max;
  std::size_t runs = 0;
};
AggregatedMetrics aggregate(std::span<const TrajectoryMetrics> per_seed);

struct FinalStateMetrics {
  double mean = 0.0;
  double std = 0.0;
  double max = 0.0;  ///< signed, largest magnitude
  std::size_t runs = 0;
};
FinalStateMetrics aggregate_final_state(std::span<const double> final_values);

struct TimeAggregatedMetrics {
  std::vector<double> mean;
  std::vector<double> std;
  std::size_t runs = 0;
};

/// Streaming per-epoch mean / population std across runs added in order.
class TimeAggregator {
 public:
  /// Throws Error if `series` does not match the epoch count of earlier runs.
  void add(std::span<const double> series);
  std::size_t runs() const { return runs_; }
  std::size_t epochs() const { return mean_.size(); }
  TimeAggregatedMetrics result() const;

 private:
  std::vector<double> mean_;  ///< running mean for the M2 update
  std::vector<double> m2_;
  std::vector<double> sum_;   ///< compensated sum for the reported mean
  std::vector<double> comp_;
  std::size_t runs_ = 0;
};

/// Throws Error on ragged input or an empty list.
TimeAggregatedMetrics time_aggregate(std::span<const std::vector<double>> series);

struct ClassificationThresholds {
  /// Bias ratios at or above this mark the estimate as biased.
  double bias_ratio = 0.3;
  /// Relative growth of the RMS envelope over the final half that counts as drift.
  double drift_growth = 0.1;
};

struct Classification {
  bool drift = false;
  bool biased = false;
  double drift_growth = 0.0;  ///< LS slope x half-run length / mean envelope
  double ratio_to_std = 0.0;  ///< |mean| / std  (trajectory or final-state family)
  double ratio_to_max = 0.0;  ///< |mean| / |max|
};

/// Least-squares growth of sqrt(mean_n^2 + std_n^2) over the final half of
/// the epochs, relative to its average there.
double envelope_growth(const TimeAggregatedMetrics& time);

/// Bounded estimates are judged on the aggregated trajectory metrics and
/// drifting ones on the final-state metrics. Zero over zero counts as zero.
Classification classify(const AggregatedMetrics& agg, const FinalStateMetrics& fin,
                        const TimeAggregatedMetrics& time,
                        const ClassificationThresholds& thr = {});

}  // namespace fwsim
