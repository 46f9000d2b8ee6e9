#pragma once

// Pluggable navigation. A filter turns the sensed record stream into the
// estimated trajectory at 100 Hz. Two baselines are registered by default:
//   "ideal"         passes the truth through (it is the only filter that
//                   ever sees truth, and says so through uses_truth()),
//   "strapdown-dr"  strapdown dead reckoning reset by GNSS fixes.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fwsim/sensors.hpp"

namespace fwsim {

struct EstimatedState {
  double t = 0.0;
  GeodeticPosition pos;
  Vec3 v_n = Vec3::Zero();      ///< ground velocity, NED [m/s]
  Quat q_nb = Quat::Identity();
  Euler euler;                  ///< yaw, pitch (theta), roll (xi) [rad]
  Vec3 w_nb_b = Vec3::Zero();   ///< body rates relative to NED [rad/s]
  double Hp = 0.0;              ///< pressure altitude [m]
  double vtas = 0.0;            ///< [m/s]
  double alpha = 0.0;
  double beta = 0.0;
  double gamma_tas = 0.0;       ///< air-relative flight path angle [rad]
  double course = 0.0;          ///< ground track bearing chi [rad]
};

/// Truth expressed with the same fields as an estimate.
EstimatedState truth_view(double t, const TruthState& x, const FlightEvaluation& ev);

/// Everything a filter may know at start-up.
struct NavContext {
  InitialEstimate initial;
  const EarthModel* onboard_earth = nullptr;  ///< unperturbed gravity and magnetism
  Quat imu_mount_estimate = Quat::Identity();
  Vec3 lever_arm_estimate = Vec3::Zero();     ///< IMU relative to the cg [m]
  Quat camera_mount_estimate = Quat::Identity();
};

class NavigationFilter {
 public:
  virtual ~NavigationFilter() = default;
  virtual std::string name() const = 0;
  virtual void initialize(const NavContext& ctx) = 0;
  virtual EstimatedState step(const SensedRecord& rec) = 0;

  /// Only reference implementations may return true; the runner then calls
  /// provide_truth() before every step().
  virtual bool uses_truth() const { return false; }
  virtual void provide_truth(const EstimatedState&) {}
};

class NavigationRegistry {
 public:
  using Factory = std::function<std::unique_ptr<NavigationFilter>()>;

  void add(const std::string& name, Factory factory);
  bool contains(const std::string& name) const { return factories_.count(name) != 0; }
  /// Throws ConfigError for unknown names.
  std::unique_ptr<NavigationFilter> create(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Factory> factories_;
};

/// Registry holding "ideal" and "strapdown-dr". Returned by reference to a
/// process-wide instance so third-party filters can register at start-up
/// before any run begins.
NavigationRegistry& default_registry();

class IdealNavigation final : public NavigationFilter {
 public:
  std::string name() const override { return "ideal"; }
  void initialize(const NavContext&) override {}
  EstimatedState step(const SensedRecord& rec) override;
  bool uses_truth() const override { return true; }
  void provide_truth(const EstimatedState& truth) override { truth_ = truth; }

 private:
  EstimatedState truth_;
};

/// Strapdown inertial dead reckoning with trapezoidal integration, IMU mount
/// and lever-arm compensation, a barometric second-order vertical loop and
/// position/velocity resets on every GNSS fix.
class StrapdownDeadReckoning final : public NavigationFilter {
 public:
  struct Gains {
    double vertical_k1 = 0.02;    ///< [1/s]
    double vertical_k2 = 1e-4;    ///< [1/s^2]
  };

  StrapdownDeadReckoning() = default;
  explicit StrapdownDeadReckoning(Gains g) : gains_(g) {}

  std::string name() const override { return "strapdown-dr"; }
  void initialize(const NavContext& ctx) override;
  EstimatedState step(const SensedRecord& rec) override;

 private:
  Gains gains_{};
  NavContext ctx_;
  bool started_ = false;
  double t_prev_ = 0.0;
  GeodeticPosition pos_;
  Vec3 v_n_ = Vec3::Zero();
  Quat q_nb_ = Quat::Identity();
  Vec3 f_prev_ = Vec3::Zero();
  Vec3 w_prev_ = Vec3::Zero();
};

/// Geodetic altitude implied by a static pressure and air temperature
/// measurement, assuming zero pressure offset.
double baro_altitude(double p, double T);

}  // namespace fwsim
