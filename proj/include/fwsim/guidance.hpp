#pragma once

// Guidance targets and their triggers. A mission plan is an ordered list of
// targets; each holds one setpoint per control channel and the trigger that
// hands over to the next target.

#include <string>
#include <vector>

#include "fwsim/navigation.hpp"

namespace fwsim {

enum class ThrottleMode { None, Airspeed };
enum class ElevatorMode { Pitch, PressureAltitude, PathAngle };
enum class AileronMode { Bank, Bearing };
enum class RudderMode { Sideslip };

struct ThrottleSetpoint {
  ThrottleMode mode = ThrottleMode::Airspeed;
  double value = 0.0;  ///< vtas [m/s]
};
struct ElevatorSetpoint {
  ElevatorMode mode = ElevatorMode::PressureAltitude;
  double value = 0.0;  ///< theta [rad], Hp [m] or gamma_TAS [rad]
};
struct AileronSetpoint {
  AileronMode mode = AileronMode::Bearing;
  double value = 0.0;  ///< xi [rad] or chi [rad]
};
struct RudderSetpoint {
  RudderMode mode = RudderMode::Sideslip;
  double value = 0.0;  ///< beta [rad]
};

enum class TriggerKind { AbsoluteTime, ElapsedTime, BearingCapture, AltitudeCapture };

struct Trigger {
  TriggerKind kind = TriggerKind::AbsoluteTime;
  double value = 0.0;      ///< t [s], dt [s], chi [rad] or Hp [m]
  double direction = 1.0;  ///< +1 right turn / climb, -1 left turn / descent
};

struct GuidanceTarget {
  ThrottleSetpoint throttle;
  ElevatorSetpoint elevator;
  AileronSetpoint aileron;
  RudderSetpoint rudder;
  Trigger trigger;
};

using MissionPlan = std::vector<GuidanceTarget>;

/// Signed trigger value; the target is complete once it is >= 0.
/// `t_active` is the activation time of the target owning the trigger.
double evaluate_trigger(const Trigger& trigger, const EstimatedState& est, double t,
                        double t_active);

std::string describe(const GuidanceTarget& target);

/// Walks the plan. The active index never decreases; after the last trigger
/// fires the last target stays active.
class Guidance {
 public:
  explicit Guidance(MissionPlan plan, double t0 = 0.0);

  /// Evaluates the active trigger and advances at most one target.
  /// Returns true when the active target changed.
  bool step(const EstimatedState& est, double t);

  const GuidanceTarget& active() const { return plan_[index_]; }
  std::size_t index() const { return index_; }
  double activation_time() const { return t_active_; }
  bool exhausted() const { return exhausted_; }
  const MissionPlan& plan() const { return plan_; }

 private:
  MissionPlan plan_;
  std::size_t index_ = 0;
  double t_active_ = 0.0;
  bool exhausted_ = false;
};

}  // namespace fwsim
