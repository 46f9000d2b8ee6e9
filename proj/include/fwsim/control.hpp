#pragma once

// Cascaded PID autopilot running at the guidance rate:
//   Hp or gamma_TAS -> theta -> elevator
//   chi -> xi -> aileron
//   vtas -> throttle
//   beta -> rudder

#include <filesystem>
#include <optional>

#include "fwsim/airframe.hpp"
#include "fwsim/config.hpp"
#include "fwsim/guidance.hpp"

namespace fwsim {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double tau_d = 0.0;      ///< derivative low-pass time constant [s]
  double ramp_rate = 0.0;  ///< setpoint slew limit [unit/s]; 0 disables
  double out_min = -1e300;
  double out_max = 1e300;
  bool angular = false;    ///< wrap setpoint error into (-pi, pi]
};

/// PID on a rate-limited internal setpoint with derivative on measurement,
/// filtered derivative, output feedforward, conditional-integration
/// anti-windup and output clamping.
class PidLoop {
 public:
  PidLoop() = default;
  explicit PidLoop(const PidGains& g) : g_(g) {}

  /// Sets the internal setpoint and clears integrator and derivative state.
  void reset(double setpoint);
  /// Moves the internal setpoint without touching the integrator.
  void reset_setpoint(double setpoint) { sp_ = setpoint; initialized_ = true; }

  /// `rate`, when given, is the measured derivative of `measurement`.
  double update(double setpoint, double measurement, double dt, double feedforward = 0.0,
                std::optional<double> rate = std::nullopt);

  double internal_setpoint() const { return sp_; }
  double integrator() const { return integ_; }
  const PidGains& gains() const { return g_; }

 private:
  PidGains g_{};
  bool initialized_ = false;
  double sp_ = 0.0;
  double integ_ = 0.0;
  double d_filt_ = 0.0;
  double prev_meas_ = 0.0;
  bool have_prev_ = false;
};

struct AutopilotGains {
  PidGains vtas_throttle;   ///< output: throttle fraction
  PidGains hp_gamma;        ///< output: gamma command [rad]
  PidGains gamma_theta;     ///< output: theta command [rad] (feedforward gamma + alpha)
  PidGains theta_elevator;  ///< output: elevator [rad]; negative gains
  PidGains chi_xi;          ///< output: bank command [rad]
  PidGains xi_aileron;      ///< output: aileron [rad]
  PidGains beta_rudder;     ///< output: rudder [rad]
};

/// Tuned for the default airframe.
const AutopilotGains& default_autopilot_gains();
AutopilotGains load_autopilot_gains(const KeyValueFile& file);
AutopilotGains load_autopilot_gains(const std::filesystem::path& path);

/// Internal commands of one control step, for logging.
struct ControlTelemetry {
  double vtas_sp = 0.0;
  double hp_sp = 0.0;
  double gamma_cmd = 0.0;
  double theta_cmd = 0.0;
  double chi_sp = 0.0;
  double xi_cmd = 0.0;
  double beta_sp = 0.0;
};

class Autopilot {
 public:
  /// `trim` is used as the output feedforward of every inner loop.
  Autopilot(const AutopilotGains& gains, const ControlInputs& trim, double surface_limit);

  /// Aligns every loop setpoint with the current estimate and target.
  void initialize(const GuidanceTarget& target, const EstimatedState& est);
  ControlInputs step(const GuidanceTarget& target, const EstimatedState& est, double dt,
                     bool target_changed);

  const ControlTelemetry& telemetry() const { return tel_; }

 private:
  void on_target_change(const GuidanceTarget& target, const EstimatedState& est);

  AutopilotGains gains_;
  ControlInputs trim_;
  double limit_;
  PidLoop vtas_, hp_, gamma_, theta_, chi_, xi_, beta_;
  GuidanceTarget prev_{};
  bool initialized_ = false;
  ControlTelemetry tel_;
};

}  // namespace fwsim
