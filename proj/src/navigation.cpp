#include "fwsim/navigation.hpp"

#include <cmath>

#include "fwsim/error.hpp"

namespace fwsim {

namespace {

double flight_path_angle(const Vec3& v_air_n) {
  const double v = v_air_n.norm();
  return v > 0.0 ? -std::asin(std::clamp(v_air_n.z() / v, -1.0, 1.0)) : 0.0;
}

}  // namespace

EstimatedState truth_view(double t, const TruthState& x, const FlightEvaluation& ev) {
  EstimatedState e;
  e.t = t;
  e.pos = x.pos;
  e.v_n = x.q_nb * x.v_b;
  e.q_nb = x.q_nb;
  e.euler = euler_from_quat(x.q_nb);
  e.w_nb_b = ev.deriv.w_nb_b;
  e.Hp = ev.atm.Hp;
  e.vtas = ev.airspeed;
  e.alpha = ev.alpha;
  e.beta = ev.beta;
  e.gamma_tas = flight_path_angle(x.q_nb * ev.v_air_b);
  e.course = std::atan2(e.v_n.y(), e.v_n.x());
  return e;
}

void NavigationRegistry::add(const std::string& name, Factory factory) {
  factories_[name] = std::move(factory);
}

std::unique_ptr<NavigationFilter> NavigationRegistry::create(const std::string& name) const {
  const auto it = factories_.find(name);
  if (it == factories_.end()) throw ConfigError("unknown navigation implementation '" + name + "'");
  return it->second();
}

std::vector<std::string> NavigationRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : factories_) out.push_back(k);
  return out;
}

NavigationRegistry& default_registry() {
  static NavigationRegistry reg = [] {
    NavigationRegistry r;
    r.add("ideal", [] { return std::make_unique<IdealNavigation>(); });
    r.add("strapdown-dr", [] { return std::make_unique<StrapdownDeadReckoning>(); });
    return r;
  }();
  return reg;
}

EstimatedState IdealNavigation::step(const SensedRecord& rec) {
  EstimatedState e = truth_;
  e.t = rec.t;
  return e;
}

double baro_altitude(double p, double T) {
  const double hp = pressure_altitude_from_pressure(p);
  const double dT = T - (isa::kT0 + isa::kBetaT * hp);
  return geodetic_from_geopotential(geopotential_from_pressure_altitude(hp, dT, 0.0));
}

void StrapdownDeadReckoning::initialize(const NavContext& ctx) {
  if (!ctx.onboard_earth) throw ConfigError("strapdown-dr needs an onboard Earth model");
  ctx_ = ctx;
  pos_ = ctx.initial.pos;
  v_n_ = ctx.initial.v_n;
  q_nb_ = ctx.initial.q_nb;
  started_ = false;
}

EstimatedState StrapdownDeadReckoning::step(const SensedRecord& rec) {
  const EarthModel& earth = *ctx_.onboard_earth;
  const Vec3 w = ctx_.imu_mount_estimate * (rec.w_ib_b - ctx_.initial.gyr_bias);
  const Vec3 f_imu = ctx_.imu_mount_estimate * (rec.f_ib_b - ctx_.initial.acc_bias);
  const double dt = started_ ? rec.t - t_prev_ : 0.0;
  const Vec3 w_dot = dt > 0.0 ? Vec3((w - w_prev_) / dt) : Vec3::Zero();
  const Vec3 r = ctx_.lever_arm_estimate;
  const Vec3 f = f_imu - w_dot.cross(r) - w.cross(w.cross(r));

  if (started_ && dt > 0.0) {
    const Vec3 w_ie = earth_rate_ned(pos_.lat, earth.rotation_rate);
    const Vec3 w_en = transport_rate_ned(pos_, v_n_);
    const Vec3 w_in = w_ie + w_en;
    const Quat q_old = q_nb_;
    const Vec3 w_nb = 0.5 * (w_prev_ + w) - q_old.conjugate() * w_in;
    q_nb_ = (q_old * quat_exp(w_nb * dt)).normalized();

    const Vec3 g = earth.gravity_ned(pos_);
    const Vec3 cor = (2.0 * w_ie + w_en).cross(v_n_);
    const Vec3 a_old = q_old * f_prev_ + g - cor;
    const Vec3 a_new = q_nb_ * f + g - cor;
    Vec3 v_new = v_n_ + 0.5 * dt * (a_old + a_new);

    const double h_err = pos_.h - baro_altitude(rec.p, rec.T);
    v_new.z() += gains_.vertical_k2 * h_err * dt;

    const Vec3 v_mid = 0.5 * (v_n_ + v_new);
    const auto radii = curvature_radii(pos_.lat);
    pos_.lat += dt * v_mid.x() / (radii.meridian + pos_.h);
    pos_.lon += dt * v_mid.y() / ((radii.prime_vertical + pos_.h) * std::cos(pos_.lat));
    pos_.h += -dt * v_mid.z() - gains_.vertical_k1 * h_err * dt;
    pos_ = normalized(pos_);
    v_n_ = v_new;
  }
  if (rec.gnss) {
    pos_ = rec.gnss->pos;
    v_n_ = rec.gnss->v_n;
  }
  started_ = true;
  t_prev_ = rec.t;
  f_prev_ = f;
  w_prev_ = w;

  EstimatedState e;
  e.t = rec.t;
  e.pos = pos_;
  e.v_n = v_n_;
  e.q_nb = q_nb_;
  e.euler = euler_from_quat(q_nb_);
  const Vec3 w_in = earth_rate_ned(pos_.lat, earth.rotation_rate) + transport_rate_ned(pos_, v_n_);
  e.w_nb_b = w - q_nb_.conjugate() * w_in;
  e.Hp = pressure_altitude_from_pressure(rec.p);
  e.vtas = rec.vtas;
  e.alpha = rec.alpha;
  e.beta = rec.beta;
  const double ca = std::cos(rec.alpha), cb = std::cos(rec.beta);
  const Vec3 v_air_b = rec.vtas * Vec3(ca * cb, std::sin(rec.beta), std::sin(rec.alpha) * cb);
  e.gamma_tas = flight_path_angle(q_nb_ * v_air_b);
  e.course = std::atan2(v_n_.y(), v_n_.x());
  return e;
}

}  // namespace fwsim
