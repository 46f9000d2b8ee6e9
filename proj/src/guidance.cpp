#include "fwsim/guidance.hpp"

#include <cmath>
#include <sstream>

#include "fwsim/error.hpp"

namespace fwsim {

double evaluate_trigger(const Trigger& trg, const EstimatedState& est, double t, double t_active) {
  switch (trg.kind) {
    case TriggerKind::AbsoluteTime:
      return t - trg.value;
    case TriggerKind::ElapsedTime:
      return (t - t_active) - trg.value;
    case TriggerKind::BearingCapture: {
      double v = trg.direction * wrap_180((est.course - trg.value) * kRad2Deg);
      if (v > 90.0) v -= 360.0;
      return v;
    }
    case TriggerKind::AltitudeCapture:
      return trg.direction * (est.Hp - trg.value);
  }
  return -1.0;
}

std::string describe(const GuidanceTarget& g) {
  std::ostringstream os;
  os << (g.throttle.mode == ThrottleMode::Airspeed ? "vtas=" + std::to_string(g.throttle.value)
                                                   : std::string("throttle=free"));
  switch (g.elevator.mode) {
    case ElevatorMode::Pitch: os << " theta_deg=" << g.elevator.value * kRad2Deg; break;
    case ElevatorMode::PressureAltitude: os << " Hp=" << g.elevator.value; break;
    case ElevatorMode::PathAngle: os << " gamma_deg=" << g.elevator.value * kRad2Deg; break;
  }
  os << (g.aileron.mode == AileronMode::Bank ? " xi_deg=" : " chi_deg=")
     << g.aileron.value * kRad2Deg;
  os << " beta_deg=" << g.rudder.value * kRad2Deg;
  switch (g.trigger.kind) {
    case TriggerKind::AbsoluteTime: os << " | t>=" << g.trigger.value; break;
    case TriggerKind::ElapsedTime: os << " | elapsed>=" << g.trigger.value; break;
    case TriggerKind::BearingCapture:
      os << " | chi_deg=" << g.trigger.value * kRad2Deg << " dir=" << g.trigger.direction;
      break;
    case TriggerKind::AltitudeCapture:
      os << " | Hp=" << g.trigger.value << " dir=" << g.trigger.direction;
      break;
  }
  return os.str();
}

Guidance::Guidance(MissionPlan plan, double t0) : plan_(std::move(plan)), t_active_(t0) {
  if (plan_.empty()) throw ConfigError("mission plan is empty");
}

bool Guidance::step(const EstimatedState& est, double t) {
  if (exhausted_) return false;
  if (evaluate_trigger(plan_[index_].trigger, est, t, t_active_) < 0.0) return false;
  if (index_ + 1 >= plan_.size()) {
    exhausted_ = true;
    return false;
  }
  ++index_;
  t_active_ = t;
  return true;
}

}  // namespace fwsim
