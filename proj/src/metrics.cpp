#include "fwsim/metrics.hpp"

#include <cmath>

#include "fwsim/error.hpp"
#include "fwsim/math.hpp"

namespace fwsim {

ErrorSeries error_series(std::span<const double> est, std::span<const double> truth,
                         std::string variable, bool angular) {
  if (est.size() != truth.size())
    throw Error("error_series: estimate and truth lengths differ for " + variable);
  ErrorSeries s{std::move(variable), angular, std::vector<double>(est.size())};
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double d = est[i] - truth[i];
    s.values[i] = angular ? wrap_pi(d) : d;
  }
  return s;
}

double signed_max_abs(std::span<const double> v) {
  double best = 0.0;
  for (double x : v)
    if (std::abs(x) > std::abs(best)) best = x;
  return best;
}

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_std(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size()));
}

Spread spread_of(const std::vector<double>& v) {
  Spread s;
  s.mean = mean_of(v);
  s.std = population_std(v, s.mean);
  for (double x : v) s.max = std::max(s.max, std::abs(x));
  return s;
}

double safe_ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  return den == 0.0 ? INFINITY : num / den;
}

}  // namespace

TrajectoryMetrics trajectory_metrics(std::span<const double> series) {
  if (series.empty()) throw Error("trajectory_metrics: empty series");
  TrajectoryMetrics m;
  m.mean = mean_of(series);
  m.std = population_std(series, m.mean);
  m.max = signed_max_abs(series);
  return m;
}

AggregatedMetrics aggregate(std::span<const TrajectoryMetrics> per_seed) {
  if (per_seed.empty()) throw Error("aggregate: no runs");
  std::vector<double> mu, sd, mx;
  for (const auto& m : per_seed) {
    mu.push_back(m.mean);
    sd.push_back(m.std);
    mx.push_back(std::abs(m.max));
  }
  return {spread_of(mu), spread_of(sd), spread_of(mx), per_seed.size()};
}

FinalStateMetrics aggregate_final_state(std::span<const double> v) {
  if (v.empty()) throw Error("aggregate_final_state: no runs");
  FinalStateMetrics f;
  f.mean = mean_of(v);
  f.std = population_std(v, f.mean);
  f.max = signed_max_abs(v);
  f.runs = v.size();
  return f;
}

void TimeAggregator::add(std::span<const double> series) {
  if (runs_ == 0) {
    mean_.assign(series.size(), 0.0);
    m2_.assign(series.size(), 0.0);
    sum_.assign(series.size(), 0.0);
    comp_.assign(series.size(), 0.0);
  } else if (series.size() != mean_.size()) {
    throw Error("time_aggregate: run has " + std::to_string(series.size()) +
                " epochs, expected " + std::to_string(mean_.size()));
  }
  ++runs_;
  const double n = static_cast<double>(runs_);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double x = series[i];
    const double d = x - mean_[i];
    mean_[i] += d / n;
    m2_[i] += d * (x - mean_[i]);
    // Neumaier summation keeps the reported mean accurate when it is small
    // compared with the individual values.
    const double t = sum_[i] + x;
    comp_[i] += std::abs(sum_[i]) >= std::abs(x) ? (sum_[i] - t) + x : (x - t) + sum_[i];
    sum_[i] = t;
  }
}

TimeAggregatedMetrics TimeAggregator::result() const {
  TimeAggregatedMetrics r;
  r.runs = runs_;
  r.mean.resize(sum_.size());
  r.std.resize(m2_.size());
  for (std::size_t i = 0; i < m2_.size(); ++i) {
    r.mean[i] = runs_ ? (sum_[i] + comp_[i]) / static_cast<double>(runs_) : 0.0;
    r.std[i] = runs_ ? std::sqrt(std::max(m2_[i], 0.0) / static_cast<double>(runs_)) : 0.0;
  }
  return r;
}

TimeAggregatedMetrics time_aggregate(std::span<const std::vector<double>> series) {
  if (series.empty()) throw Error("time_aggregate: no runs");
  TimeAggregator agg;
  for (const auto& s : series) agg.add(s);
  return agg.result();
}

double envelope_growth(const TimeAggregatedMetrics& time) {
  const std::size_t n = time.mean.size();
  if (n < 4) return 0.0;
  const std::size_t first = n / 2;
  const double count = static_cast<double>(n - first);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    sx += static_cast<double>(i);
    sy += std::hypot(time.mean[i], time.std[i]);
  }
  const double xm = sx / count, ym = sy / count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    const double dx = static_cast<double>(i) - xm;
    sxy += dx * (std::hypot(time.mean[i], time.std[i]) - ym);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  return safe_ratio(slope * static_cast<double>(n - 1 - first), ym);
}

Classification classify(const AggregatedMetrics& agg, const FinalStateMetrics& fin,
                        const TimeAggregatedMetrics& time, const ClassificationThresholds& thr) {
  Classification c;
  c.drift_growth = envelope_growth(time);
  c.drift = c.drift_growth > thr.drift_growth;
  if (c.drift) {
    c.ratio_to_std = safe_ratio(std::abs(fin.mean), fin.std);
    c.ratio_to_max = safe_ratio(std::abs(fin.mean), std::abs(fin.max));
  } else {
    c.ratio_to_std = safe_ratio(std::abs(agg.of_mean.mean), agg.of_std.mean);
    c.ratio_to_max = safe_ratio(std::abs(agg.of_mean.mean), agg.of_max.mean);
  }
  c.biased = c.ratio_to_std >= thr.bias_ratio || c.ratio_to_max >= thr.bias_ratio;
  return c;
}

}  // namespace fwsim
