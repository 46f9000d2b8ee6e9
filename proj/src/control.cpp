#include "fwsim/control.hpp"

#include <cmath>

namespace fwsim {

void PidLoop::reset(double setpoint) {
  sp_ = setpoint;
  initialized_ = true;
  integ_ = 0.0;
  d_filt_ = 0.0;
  have_prev_ = false;
}

double PidLoop::update(double setpoint, double meas, double dt, double ff,
                       std::optional<double> rate) {
  const auto diff = [this](double a, double b) { return g_.angular ? wrap_pi(a - b) : a - b; };
  if (!initialized_) reset(setpoint);

  const double gap = diff(setpoint, sp_);
  if (g_.ramp_rate > 0.0) {
    const double max_step = g_.ramp_rate * dt;
    sp_ += std::clamp(gap, -max_step, max_step);
  } else {
    sp_ += gap;
  }
  if (g_.angular) sp_ = wrap_pi(sp_);

  const double e = diff(sp_, meas);
  double raw = 0.0;
  if (rate) {
    raw = *rate;
  } else if (have_prev_ && dt > 0.0) {
    raw = diff(meas, prev_meas_) / dt;
  }
  prev_meas_ = meas;
  have_prev_ = true;
  d_filt_ = g_.tau_d > 0.0 ? d_filt_ + (raw - d_filt_) * dt / (g_.tau_d + dt) : raw;

  const double base = ff + g_.kp * e - g_.kd * d_filt_;
  const double integ_next = integ_ + e * dt;
  const double u_next = base + g_.ki * integ_next;
  const bool winding_up = (u_next > g_.out_max && g_.ki * e > 0.0) ||
                          (u_next < g_.out_min && g_.ki * e < 0.0);
  if (!winding_up) integ_ = integ_next;
  return std::clamp(base + g_.ki * integ_, g_.out_min, g_.out_max);
}

namespace {

AutopilotGains make_default_gains() {
  AutopilotGains g;
  g.vtas_throttle = {0.12, 0.03, 0.0, 0.0, 0.5, 0.0, 1.0, false};
  g.hp_gamma = {0.012, 0.0004, 0.0, 0.0, 3.0, -8.0 * kDeg2Rad, 8.0 * kDeg2Rad, false};
  g.gamma_theta = {0.6, 0.2, 0.0, 0.0, 2.0 * kDeg2Rad, -20.0 * kDeg2Rad, 25.0 * kDeg2Rad, false};
  g.theta_elevator = {-1.2, -0.6, -0.12, 0.05, 0.0, -1.0, 1.0, false};
  g.chi_xi = {1.0, 0.01, 0.0, 0.0, 3.0 * kDeg2Rad, -20.0 * kDeg2Rad, 20.0 * kDeg2Rad, true};
  g.xi_aileron = {0.6, 0.1, 0.05, 0.05, 10.0 * kDeg2Rad, -1.0, 1.0, false};
  g.beta_rudder = {0.6, 0.2, 0.0, 0.0, 0.0, -1.0, 1.0, false};
  return g;
}

// Gains are in SI units (radians). Setpoint ramp rates and output limits are
// read in the file unit given by `ramp_unit` / `out_unit` (degrees for angles).
void read_pid(const KeyValueFile& f, const std::string& p, PidGains& g, double ramp_unit,
              double out_unit) {
  g.kp = f.get_double(p + ".kp", g.kp);
  g.ki = f.get_double(p + ".ki", g.ki);
  g.kd = f.get_double(p + ".kd", g.kd);
  g.tau_d = f.get_double(p + ".tau_d", g.tau_d);
  g.ramp_rate = f.get_double(p + ".ramp_rate", g.ramp_rate / ramp_unit) * ramp_unit;
  g.out_min = f.get_double(p + ".out_min", g.out_min / out_unit) * out_unit;
  g.out_max = f.get_double(p + ".out_max", g.out_max / out_unit) * out_unit;
}

}  // namespace

const AutopilotGains& default_autopilot_gains() {
  static const AutopilotGains g = make_default_gains();
  return g;
}

AutopilotGains load_autopilot_gains(const KeyValueFile& f) {
  AutopilotGains g = default_autopilot_gains();
  read_pid(f, "vtas_throttle", g.vtas_throttle, 1.0, 1.0);
  read_pid(f, "hp_gamma", g.hp_gamma, 1.0, kDeg2Rad);
  read_pid(f, "gamma_theta", g.gamma_theta, kDeg2Rad, kDeg2Rad);
  read_pid(f, "theta_elevator", g.theta_elevator, kDeg2Rad, kDeg2Rad);
  read_pid(f, "chi_xi", g.chi_xi, kDeg2Rad, kDeg2Rad);
  read_pid(f, "xi_aileron", g.xi_aileron, kDeg2Rad, kDeg2Rad);
  read_pid(f, "beta_rudder", g.beta_rudder, kDeg2Rad, kDeg2Rad);
  f.reject_unused();
  return g;
}

AutopilotGains load_autopilot_gains(const std::filesystem::path& path) {
  return load_autopilot_gains(KeyValueFile::load(path));
}

Autopilot::Autopilot(const AutopilotGains& gains, const ControlInputs& trim, double limit)
    : gains_(gains), trim_(trim), limit_(limit) {
  gains_.vtas_throttle.out_min = 0.0;
  gains_.vtas_throttle.out_max = 1.0;
  for (PidGains* g : {&gains_.theta_elevator, &gains_.xi_aileron, &gains_.beta_rudder}) {
    g->out_min = std::max(g->out_min, -limit);
    g->out_max = std::min(g->out_max, limit);
  }
  vtas_ = PidLoop(gains_.vtas_throttle);
  hp_ = PidLoop(gains_.hp_gamma);
  gamma_ = PidLoop(gains_.gamma_theta);
  theta_ = PidLoop(gains_.theta_elevator);
  chi_ = PidLoop(gains_.chi_xi);
  xi_ = PidLoop(gains_.xi_aileron);
  beta_ = PidLoop(gains_.beta_rudder);
}

void Autopilot::initialize(const GuidanceTarget& target, const EstimatedState& est) {
  vtas_.reset(est.vtas);
  hp_.reset(est.Hp);
  gamma_.reset(est.gamma_tas);
  theta_.reset(est.euler.pitch);
  chi_.reset(est.course);
  xi_.reset(est.euler.roll);
  beta_.reset(est.beta);
  prev_ = target;
  initialized_ = true;
}

void Autopilot::on_target_change(const GuidanceTarget& t, const EstimatedState& est) {
  if (t.elevator.mode != prev_.elevator.mode) {
    if (t.elevator.mode == ElevatorMode::PressureAltitude) hp_.reset(est.Hp);
    if (t.elevator.mode == ElevatorMode::PathAngle) gamma_.reset_setpoint(est.gamma_tas);
  }
  if (t.aileron.mode != prev_.aileron.mode) {
    if (t.aileron.mode == AileronMode::Bearing) chi_.reset(est.course);
    if (t.aileron.mode == AileronMode::Bank) xi_.reset_setpoint(est.euler.roll);
  }
  if (t.throttle.mode != prev_.throttle.mode && t.throttle.mode == ThrottleMode::Airspeed)
    vtas_.reset(est.vtas);
  prev_ = t;
}

ControlInputs Autopilot::step(const GuidanceTarget& t, const EstimatedState& est, double dt,
                              bool target_changed) {
  if (!initialized_) initialize(t, est);
  if (target_changed) on_target_change(t, est);

  const double roll = est.euler.roll, pitch = est.euler.pitch;
  const Vec3& w = est.w_nb_b;
  const double pitch_rate = w.y() * std::cos(roll) - w.z() * std::sin(roll);
  const double roll_rate = w.x() + (w.y() * std::sin(roll) + w.z() * std::cos(roll)) * std::tan(pitch);

  ControlInputs u;
  tel_ = {};
  if (t.throttle.mode == ThrottleMode::Airspeed) {
    u.throttle = vtas_.update(t.throttle.value, est.vtas, dt, trim_.throttle);
    tel_.vtas_sp = vtas_.internal_setpoint();
  } else {
    u.throttle = trim_.throttle;
  }

  double theta_cmd = t.elevator.value;
  if (t.elevator.mode != ElevatorMode::Pitch) {
    double gamma_cmd = t.elevator.value;
    if (t.elevator.mode == ElevatorMode::PressureAltitude) {
      gamma_cmd = hp_.update(t.elevator.value, est.Hp, dt);
      tel_.hp_sp = hp_.internal_setpoint();
    }
    theta_cmd = gamma_.update(gamma_cmd, est.gamma_tas, dt, gamma_cmd + est.alpha);
    tel_.gamma_cmd = gamma_.internal_setpoint();
  }
  tel_.theta_cmd = theta_cmd;
  u.elevator = theta_.update(theta_cmd, pitch, dt, trim_.elevator, pitch_rate);

  double xi_cmd = t.aileron.value;
  if (t.aileron.mode == AileronMode::Bearing) {
    xi_cmd = chi_.update(t.aileron.value, est.course, dt);
    tel_.chi_sp = chi_.internal_setpoint();
  }
  u.aileron = xi_.update(xi_cmd, roll, dt, trim_.aileron, roll_rate);
  tel_.xi_cmd = xi_.internal_setpoint();

  u.rudder = beta_.update(t.rudder.value, est.beta, dt, trim_.rudder);
  tel_.beta_sp = t.rudder.value;
  return u;
}

}  // namespace fwsim
