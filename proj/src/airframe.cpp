#include "fwsim/airframe.hpp"

#include <cmath>
#include <string>

#include "fwsim/atmosphere.hpp"
#include "fwsim/error.hpp"

namespace fwsim {

const Airframe& default_airframe() {
  static const Airframe af{};
  return af;
}

namespace {

void read(const KeyValueFile& f, const std::string& key, double& v) { v = f.get_double(key, v); }

void read_vec(const KeyValueFile& f, const std::string& key, auto& v) {
  if (!f.has(key)) return;
  const auto vals = f.get_doubles(key, static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = vals[static_cast<std::size_t>(i)];
}

}  // namespace

Airframe load_airframe(const KeyValueFile& f) {
  Airframe af = default_airframe();
  auto& g = af.geometry;
  read(f, "wing_area", g.wing_area);
  read(f, "span", g.span);
  read(f, "chord", g.chord);
  read_vec(f, "aero_reference", g.aero_reference);

  auto& m = af.mass;
  read(f, "empty_mass", m.empty_mass);
  read(f, "fuel_capacity", m.fuel_capacity);
  read_vec(f, "cg_full", m.cg_full);
  read_vec(f, "cg_empty", m.cg_empty);
  read_vec(f, "inertia_full", m.inertia_full);
  read_vec(f, "inertia_empty", m.inertia_empty);

  auto& a = af.aero;
  read(f, "cl0", a.cl0);
  read(f, "cl_alpha", a.cl_alpha);
  read(f, "cl_elevator", a.cl_elevator);
  read(f, "cl_q", a.cl_q);
  read(f, "cd0", a.cd0);
  read(f, "cd_k", a.cd_k);
  read(f, "cm0", a.cm0);
  read(f, "cm_alpha", a.cm_alpha);
  read(f, "cm_elevator", a.cm_elevator);
  read(f, "cm_q", a.cm_q);
  read(f, "cy_beta", a.cy_beta);
  read(f, "cy_rudder", a.cy_rudder);
  read(f, "croll_beta", a.cl_beta);
  read(f, "croll_p", a.cl_p);
  read(f, "croll_r", a.cl_r);
  read(f, "croll_aileron", a.cl_aileron);
  read(f, "croll_rudder", a.cl_rudder);
  read(f, "cn_beta", a.cn_beta);
  read(f, "cn_p", a.cn_p);
  read(f, "cn_r", a.cn_r);
  read(f, "cn_aileron", a.cn_aileron);
  read(f, "cn_rudder", a.cn_rudder);
  double alpha_deg = a.alpha_limit * kRad2Deg, beta_deg = a.beta_limit * kRad2Deg;
  read(f, "alpha_limit_deg", alpha_deg);
  read(f, "beta_limit_deg", beta_deg);
  a.alpha_limit = alpha_deg * kDeg2Rad;
  a.beta_limit = beta_deg * kDeg2Rad;
  read(f, "mach_limit", a.mach_limit);

  read(f, "max_power", af.engine.max_power);
  read(f, "lapse_offset", af.engine.lapse_offset);
  double bsfc_kg_per_kwh = af.engine.bsfc * 3.6e6;
  read(f, "bsfc_kg_per_kwh", bsfc_kg_per_kwh);
  af.engine.bsfc = bsfc_kg_per_kwh / 3.6e6;

  read(f, "prop_diameter", af.propeller.diameter);
  read_vec(f, "prop_ct", af.propeller.ct);
  read_vec(f, "prop_cp", af.propeller.cp);

  double limit_deg = af.control_limit * kRad2Deg;
  read(f, "control_limit_deg", limit_deg);
  af.control_limit = limit_deg * kDeg2Rad;

  f.reject_unused();
  if (af.mass.empty_mass <= 0.0 || af.mass.fuel_capacity < 0.0)
    throw ConfigError(f.source() + ": mass entries must be positive");
  if (af.propeller.diameter <= 0.0) throw ConfigError(f.source() + ": prop_diameter must be positive");
  return af;
}

Airframe load_airframe(const std::filesystem::path& path) {
  return load_airframe(KeyValueFile::load(path));
}

MassProperties mass_properties(const Airframe& af, double fuel) {
  const auto& m = af.mass;
  const double w = m.fuel_capacity > 0.0 ? std::clamp(fuel / m.fuel_capacity, 0.0, 1.0) : 0.0;
  MassProperties mp;
  mp.mass = m.empty_mass + std::clamp(fuel, 0.0, m.fuel_capacity);
  mp.cg = m.cg_empty + w * (m.cg_full - m.cg_empty);
  const Eigen::Vector4d i = m.inertia_empty + w * (m.inertia_full - m.inertia_empty);
  mp.inertia << i[0], 0.0, -i[3],
                0.0, i[1], 0.0,
                -i[3], 0.0, i[2];
  mp.inertia_inv = mp.inertia.inverse();
  return mp;
}

Wrench aero_wrench(const Airframe& af, double alpha, double beta, const ControlInputs& u,
                   const Vec3& rates, double qbar, double airspeed, const MassProperties& mp) {
  const auto& c = af.aero;
  if (std::abs(alpha) > c.alpha_limit || std::abs(beta) > c.beta_limit)
    throw EnvelopeError("aerodynamic angles outside the model envelope (alpha " +
                        std::to_string(alpha * kRad2Deg) + " deg, beta " +
                        std::to_string(beta * kRad2Deg) + " deg)");
  Wrench w;
  if (qbar == 0.0) return w;

  const auto& g = af.geometry;
  const double v = std::max(airspeed, 1e-3);
  const double p_hat = rates.x() * g.span / (2.0 * v);
  const double q_hat = rates.y() * g.chord / (2.0 * v);
  const double r_hat = rates.z() * g.span / (2.0 * v);

  const double cl = c.cl0 + c.cl_alpha * alpha + c.cl_elevator * u.elevator + c.cl_q * q_hat;
  const double cd = c.cd0 + c.cd_k * cl * cl;
  const double cy = c.cy_beta * beta + c.cy_rudder * u.rudder;
  const double c_roll = c.cl_beta * beta + c.cl_p * p_hat + c.cl_r * r_hat +
                        c.cl_aileron * u.aileron + c.cl_rudder * u.rudder;
  const double c_pitch = c.cm0 + c.cm_alpha * alpha + c.cm_elevator * u.elevator + c.cm_q * q_hat;
  const double c_yaw = c.cn_beta * beta + c.cn_p * p_hat + c.cn_r * r_hat +
                       c.cn_aileron * u.aileron + c.cn_rudder * u.rudder;

  const double qs = qbar * g.wing_area;
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double cb = std::cos(beta), sb = std::sin(beta);
  // Wind axes (-D, Y, -L) into body axes.
  const double fd = -qs * cd, fy = qs * cy, fl = -qs * cl;
  w.force = {ca * cb * fd - ca * sb * fy - sa * fl,
             sb * fd + cb * fy,
             sa * cb * fd - sa * sb * fy + ca * fl};
  w.moment = {qs * g.span * c_roll, qs * g.chord * c_pitch, qs * g.span * c_yaw};
  w.moment += (g.aero_reference - mp.cg).cross(w.force);
  return w;
}

EngineOutput engine_power(const Airframe& af, double throttle, double p, double T) {
  const auto& e = af.engine;
  const double sigma = (p / (isa::kR * T)) / (isa::kP0 / (isa::kR * isa::kT0));
  const double lapse = std::max((sigma - e.lapse_offset) / (1.0 - e.lapse_offset), 0.0);
  EngineOutput out;
  out.power = e.max_power * std::clamp(throttle, 0.0, 1.0) * lapse;
  out.fuel_flow = e.bsfc * out.power;
  return out;
}

PropellerOutput propeller_wrench(const Airframe& af, double n, double airspeed, double rho) {
  PropellerOutput out;
  out.shaft_speed = n;
  if (n <= 0.0) return out;
  const auto& pr = af.propeller;
  const double d = pr.diameter;
  const double j = airspeed / (n * d);
  const double ct = pr.ct[0] + j * (pr.ct[1] + j * pr.ct[2]);
  const double cp = pr.cp[0] + j * (pr.cp[1] + j * (pr.cp[2] + j * pr.cp[3]));
  const double d4 = d * d * d * d;
  out.thrust = rho * n * n * d4 * ct;
  out.torque = rho * n * n * d4 * d * cp / (2.0 * kPi);
  return out;
}

double solve_shaft_speed(const Airframe& af, double power, double airspeed, double rho) {
  if (power <= 0.0) return 0.0;
  const auto& cp = af.propeller.cp;
  const double d = af.propeller.diameter;
  const double c = std::max(airspeed, 0.0) / d;
  const double target = power / (rho * std::pow(d, 5));
  // rho n^3 D^5 CP(c / n) is a cubic in n: g(n) = a3 n^3 + a2 n^2 + a1 n + a0.
  const double a3 = cp[0], a2 = cp[1] * c, a1 = cp[2] * c * c, a0 = cp[3] * c * c * c - target;
  // Start right of the largest root, where g is increasing and convex, so
  // Newton decreases monotonically onto it.
  double cp_min = cp[0];
  for (double j = 0.0; j <= 0.5; j += 0.05)
    cp_min = std::min(cp_min, cp[0] + j * (cp[1] + j * (cp[2] + j * cp[3])));
  if (cp_min <= 0.0) throw ConfigError("propeller power coefficient must be positive for J <= 0.5");
  double n = std::max(2.0 * c, std::cbrt(target / cp_min)) + 1.0;
  for (int i = 0; i < 60; ++i) {
    const double g = ((a3 * n + a2) * n + a1) * n + a0;
    const double dg = (3.0 * a3 * n + 2.0 * a2) * n + a1;
    const double step = g / dg;
    n -= step;
    if (std::abs(step) < 1e-12 * n) break;
  }
  return n;
}

PropellerOutput powerplant(const Airframe& af, double power, double airspeed, double rho) {
  return propeller_wrench(af, solve_shaft_speed(af, power, airspeed, rho), airspeed, rho);
}

}  // namespace fwsim
