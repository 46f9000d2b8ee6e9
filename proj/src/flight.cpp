#include "fwsim/flight.hpp"

#include <cmath>
#include <string>

#include "fwsim/error.hpp"

namespace fwsim {

FlightEvaluation evaluate_flight(const TruthState& x, double t, const ControlInputs& u,
                                 const FlightEnvironment& env) {
  const Airframe& af = *env.airframe;
  FlightEvaluation ev;

  const Mat3 c_nb = x.q_nb.toRotationMatrix();
  const Mat3 c_bn = c_nb.transpose();
  const Vec3 v_n = c_nb * x.v_b;

  const double fuel = x.mass - af.mass.empty_mass;
  ev.mass = mass_properties(af, fuel);

  ev.atm = insa_state_at_geopotential(geopotential_from_geodetic(x.pos.h), env.weather.dT(t),
                                      env.weather.dp(t));

  ev.wind_n = wind_lowfreq(t, env.wind);
  ev.v_air_b = x.v_b - c_bn * ev.wind_n - env.turbulence_b;
  ev.airspeed = ev.v_air_b.norm();
  if (ev.airspeed > af.aero.mach_limit * ev.atm.sound_speed)
    throw EnvelopeError("airspeed " + std::to_string(ev.airspeed) + " m/s exceeds the Mach limit");
  ev.alpha = std::atan2(ev.v_air_b.z(), ev.v_air_b.x());
  ev.beta = ev.airspeed > 0.0 ? std::asin(std::clamp(ev.v_air_b.y() / ev.airspeed, -1.0, 1.0)) : 0.0;

  ev.w_ie_n = env.earth_rotation ? earth_rate_ned(x.pos.lat, env.earth->rotation_rate) : Vec3::Zero();
  ev.w_en_n = transport_rate_ned(x.pos, v_n);
  const Vec3 w_ie_b = c_bn * ev.w_ie_n;
  const Vec3 w_nb_b = x.w_ib_b - c_bn * (ev.w_ie_n + ev.w_en_n);

  const double qbar = 0.5 * ev.atm.rho * ev.airspeed * ev.airspeed;
  Wrench w = aero_wrench(af, ev.alpha, ev.beta, u, w_nb_b, qbar, ev.airspeed, ev.mass);

  if (fuel > 0.0) ev.engine = engine_power(af, u.throttle, ev.atm.p, ev.atm.T);
  ev.propeller = powerplant(af, ev.engine.power, std::max(ev.v_air_b.x(), 0.0), ev.atm.rho);
  w.force.x() += ev.propeller.thrust;
  w.moment.x() -= ev.propeller.torque;

  ev.specific_force_b = w.force / ev.mass.mass;
  ev.gravity_n = env.earth->gravity_ned(x.pos);

  StateDerivative& d = ev.deriv;
  const auto r = curvature_radii(x.pos.lat);
  d.pos_rate = {v_n.y() / ((r.prime_vertical + x.pos.h) * std::cos(x.pos.lat)),
                v_n.x() / (r.meridian + x.pos.h), -v_n.z()};
  d.v_dot = ev.specific_force_b + c_bn * ev.gravity_n - (x.w_ib_b + w_ie_b).cross(x.v_b);
  const Mat3& inertia = ev.mass.inertia;
  d.w_dot = ev.mass.inertia_inv * (w.moment - x.w_ib_b.cross(inertia * x.w_ib_b));
  const Quat qd = x.q_nb * Quat(0.0, w_nb_b.x(), w_nb_b.y(), w_nb_b.z());
  d.q_dot = 0.5 * Eigen::Vector4d(qd.w(), qd.x(), qd.y(), qd.z());
  d.m_dot = -ev.engine.fuel_flow;
  d.w_nb_b = w_nb_b;
  return ev;
}

Integrator parse_integrator(std::string_view s) {
  if (s == "so3") return Integrator::SO3;
  if (s == "r4norm") return Integrator::R4Norm;
  throw ConfigError("unknown integrator '" + std::string(s) + "' (expected so3 or r4norm)");
}

std::string_view to_string(Integrator i) { return i == Integrator::SO3 ? "so3" : "r4norm"; }

namespace {

// Non-attitude part of x + h * k.
TruthState advance_euclidean(const TruthState& x, const StateDerivative& k, double h) {
  TruthState y = x;
  y.pos.lon += h * k.pos_rate.x();
  y.pos.lat += h * k.pos_rate.y();
  y.pos.h += h * k.pos_rate.z();
  y.v_b += h * k.v_dot;
  y.w_ib_b += h * k.w_dot;
  y.mass += h * k.m_dot;
  return y;
}

Quat add_q(const Quat& q, const Eigen::Vector4d& k, double h) {
  return Quat(q.w() + h * k[0], q.x() + h * k[1], q.y() + h * k[2], q.z() + h * k[3]);
}

StateDerivative weighted(const StateDerivative& a, const StateDerivative& b,
                         const StateDerivative& c, const StateDerivative& d) {
  StateDerivative s;
  s.pos_rate = (a.pos_rate + 2.0 * b.pos_rate + 2.0 * c.pos_rate + d.pos_rate) / 6.0;
  s.v_dot = (a.v_dot + 2.0 * b.v_dot + 2.0 * c.v_dot + d.v_dot) / 6.0;
  s.q_dot = (a.q_dot + 2.0 * b.q_dot + 2.0 * c.q_dot + d.q_dot) / 6.0;
  s.w_dot = (a.w_dot + 2.0 * b.w_dot + 2.0 * c.w_dot + d.w_dot) / 6.0;
  s.m_dot = (a.m_dot + 2.0 * b.m_dot + 2.0 * c.m_dot + d.m_dot) / 6.0;
  return s;
}

}  // namespace

TruthState rk4_step_r4norm(const TruthState& x, double t, double dt, const DerivativeFn& f) {
  const StateDerivative k1 = f(x, t);
  TruthState s = advance_euclidean(x, k1, 0.5 * dt);
  s.q_nb = add_q(x.q_nb, k1.q_dot, 0.5 * dt);
  const StateDerivative k2 = f(s, t + 0.5 * dt);
  s = advance_euclidean(x, k2, 0.5 * dt);
  s.q_nb = add_q(x.q_nb, k2.q_dot, 0.5 * dt);
  const StateDerivative k3 = f(s, t + 0.5 * dt);
  s = advance_euclidean(x, k3, dt);
  s.q_nb = add_q(x.q_nb, k3.q_dot, dt);
  const StateDerivative k4 = f(s, t + dt);

  const StateDerivative k = weighted(k1, k2, k3, k4);
  TruthState y = advance_euclidean(x, k, dt);
  y.q_nb = add_q(x.q_nb, k.q_dot, dt).normalized();
  y.pos = normalized(y.pos);
  return y;
}

TruthState rk4_step_so3(const TruthState& x, double t, double dt, const DerivativeFn& f) {
  const StateDerivative k1 = f(x, t);
  const Vec3 a1 = k1.w_nb_b;

  TruthState s = advance_euclidean(x, k1, 0.5 * dt);
  Vec3 theta = 0.5 * dt * a1;
  s.q_nb = x.q_nb * quat_exp(theta);
  const StateDerivative k2 = f(s, t + 0.5 * dt);
  const Vec3 a2 = so3_dexpinv(theta, k2.w_nb_b);

  s = advance_euclidean(x, k2, 0.5 * dt);
  theta = 0.5 * dt * a2;
  s.q_nb = x.q_nb * quat_exp(theta);
  const StateDerivative k3 = f(s, t + 0.5 * dt);
  const Vec3 a3 = so3_dexpinv(theta, k3.w_nb_b);

  s = advance_euclidean(x, k3, dt);
  theta = dt * a3;
  s.q_nb = x.q_nb * quat_exp(theta);
  const StateDerivative k4 = f(s, t + dt);
  const Vec3 a4 = so3_dexpinv(theta, k4.w_nb_b);

  TruthState y = advance_euclidean(x, weighted(k1, k2, k3, k4), dt);
  y.q_nb = x.q_nb * quat_exp(dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4));
  y.pos = normalized(y.pos);
  return y;
}

TruthState rk4_step(Integrator which, const TruthState& x, double t, double dt,
                    const DerivativeFn& f) {
  return which == Integrator::SO3 ? rk4_step_so3(x, t, dt, f) : rk4_step_r4norm(x, t, dt, f);
}

bool is_finite(const TruthState& x) {
  return std::isfinite(x.pos.lon) && std::isfinite(x.pos.lat) && std::isfinite(x.pos.h) &&
         x.v_b.allFinite() && x.q_nb.coeffs().allFinite() && x.w_ib_b.allFinite() &&
         std::isfinite(x.mass);
}

std::vector<TruthState> propagate_truth(const TruthState& x0, const ControlLaw& control,
                                        const FlightEnvironment& env, double t_end, double dt,
                                        Integrator integrator) {
  const auto steps = static_cast<long long>(std::llround(t_end / dt));
  std::vector<TruthState> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(x0);
  TruthState x = x0;
  for (long long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const ControlInputs u = control(t, x);
    const DerivativeFn f = [&](const TruthState& s, double ts) {
      return state_derivative(s, ts, u, env);
    };
    x = rk4_step(integrator, x, t, dt, f);
    if (!is_finite(x))
      throw DivergenceError("non-finite truth state at t = " + std::to_string(t + dt) + " s");
    out.push_back(x);
  }
  return out;
}

namespace {

// Trim unknowns: alpha, elevator, throttle, aileron, rudder, bank.
using Vec6 = Eigen::Matrix<double, 6, 1>;

struct TrimPoint {
  TruthState state;
  ControlInputs controls;
};

TrimPoint trim_point(const TrimTarget& tg, const FlightEnvironment& env, const Vec6& z) {
  const double alpha = z[0], bank = z[5];
  TrimPoint p;
  p.controls = {z[2], z[1], z[3], z[4]};
  TruthState& x = p.state;
  x.pos = normalized({tg.lon, tg.lat, tg.h});
  x.mass = env.airframe->mass.empty_mass + tg.fuel;
  x.v_b = tg.airspeed * Vec3(std::cos(alpha), 0.0, std::sin(alpha));
  // Pitch that keeps the velocity horizontal at this bank, then the heading
  // that points the horizontal velocity along the target direction.
  const double pitch = std::atan(std::cos(bank) * std::tan(alpha));
  const Vec3 v0 = quat_from_euler({0.0, pitch, bank}) * x.v_b;
  const double yaw = tg.heading - std::atan2(v0.y(), v0.x());
  x.q_nb = quat_from_euler({yaw, pitch, bank});
  const Vec3 v_n = x.q_nb * x.v_b;
  const Vec3 w_in = (env.earth_rotation ? earth_rate_ned(tg.lat, env.earth->rotation_rate)
                                        : Vec3::Zero()) +
                    transport_rate_ned(x.pos, v_n);
  x.w_ib_b = x.q_nb.conjugate() * w_in;
  return p;
}

Vec6 trim_residual(const TrimTarget& tg, const FlightEnvironment& env, const Vec6& z) {
  const TrimPoint p = trim_point(tg, env, z);
  const FlightEvaluation ev = evaluate_flight(p.state, tg.t, p.controls, env);
  Vec6 r;
  r.head<3>() = ev.mass.mass * ev.deriv.v_dot;
  r.tail<3>() = ev.mass.inertia * ev.deriv.w_dot;
  return r;
}

}  // namespace

TrimResult trim(const TrimTarget& target, const FlightEnvironment& env_in) {
  FlightEnvironment env = env_in;
  env.wind = {};
  env.turbulence_b = Vec3::Zero();

  Vec6 z;
  z << 4.0 * kDeg2Rad, 0.0, 0.3, 0.0, 0.0, 0.0;
  Vec6 r = trim_residual(target, env, z);
  int it = 0;
  for (; it < 50 && r.norm() > 1e-9; ++it) {
    Eigen::Matrix<double, 6, 6> jac;
    for (int i = 0; i < 6; ++i) {
      Vec6 zp = z;
      const double h = 1e-7;
      zp[i] += h;
      jac.col(i) = (trim_residual(target, env, zp) - r) / h;
    }
    Vec6 step = jac.fullPivLu().solve(-r);
    // Damp large steps so alpha and the controls stay in their envelope.
    const double biggest = step.cwiseAbs().maxCoeff();
    if (biggest > 0.1) step *= 0.1 / biggest;
    z += step;
    r = trim_residual(target, env, z);
  }
  const double limit = env.airframe->control_limit;
  if (!(r.norm() < 1e-6) || z[2] < 0.0 || z[2] > 1.0 || std::abs(z[1]) > limit ||
      std::abs(z[3]) > limit || std::abs(z[4]) > limit)
    throw EnvelopeError("no trim at airspeed " + std::to_string(target.airspeed) +
                        " m/s, altitude " + std::to_string(target.h) + " m");

  const TrimPoint p = trim_point(target, env, z);
  TrimResult res;
  res.state = p.state;
  res.controls = p.controls;
  res.alpha = z[0];
  res.bank = z[5];
  res.residual_force = r.head<3>().norm();
  res.residual_moment = r.tail<3>().norm();
  res.iterations = it;
  return res;
}

TruthState crab_into_wind(const TrimResult& trimmed, double course, const Vec3& wind_n) {
  TruthState x = trimmed.state;
  const Vec3 v_air_n = x.q_nb * x.v_b;
  const double speed = std::hypot(v_air_n.x(), v_air_n.y());
  const double heading = std::atan2(v_air_n.y(), v_air_n.x());
  const double cross = -wind_n.x() * std::sin(course) + wind_n.y() * std::cos(course);
  if (std::abs(cross) >= speed)
    throw EnvelopeError("crosswind exceeds airspeed; no heading reaches the requested course");
  const double target_heading = course - std::asin(cross / speed);
  const Quat turn(Eigen::AngleAxisd(target_heading - heading, Vec3::UnitZ()));
  x.q_nb = (turn * x.q_nb).normalized();
  const Vec3 v_n = turn * v_air_n + wind_n;
  x.v_b = x.q_nb.conjugate() * v_n;
  // Keep the attitude fixed relative to NED: only the transport rate changes.
  const TruthState& t0 = trimmed.state;
  const Vec3 w_ie_n = t0.q_nb * t0.w_ib_b - transport_rate_ned(t0.pos, v_air_n);
  x.w_ib_b = x.q_nb.conjugate() * (w_ie_n + transport_rate_ned(x.pos, v_n));
  return x;
}

}  // namespace fwsim
