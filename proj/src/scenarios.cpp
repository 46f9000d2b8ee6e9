#include "fwsim/scenarios.hpp"

#include <cmath>

#include "fwsim/error.hpp"

namespace fwsim {

namespace {

double bearing_draw(Sampler& s) { return static_cast<double>(s.discrete_uniform(-179, 180)); }

double bearing_change(double from, double to) { return wrap_180(to - from); }

double bearing_not_near(Sampler& s, double previous) {
  return s.constrained([](Sampler& r) { return bearing_draw(r); },
                       [&](double c) { return std::abs(bearing_change(previous, c)) > 10.0; });
}

double normal_above(Sampler& s, double mean, double std, double lower) {
  return s.constrained([&](Sampler& r) { return r.normal(mean, std); },
                       [&](double v) { return v > lower; });
}

double airspeed_draw(Sampler& s) {
  return s.constrained([](Sampler& r) { return r.normal(29.0, 1.5); },
                       [](double v) { return v > 24.0 && v < 34.0; });
}

double turn_sign(double from, double to) { return bearing_change(from, to) >= 0.0 ? 1.0 : -1.0; }

}  // namespace

Scenario1Mission sample_scenario1_mission(Sampler& s) {
  Scenario1Mission m;
  m.vtas_ini = airspeed_draw(s);
  m.hp_ini = s.normal(2700.0, 200.0);
  m.chi_ini = bearing_draw(s);
  m.t_turn = m.t_gnss + normal_above(s, 30.0, 50.0, 15.0);
  m.chi_end = bearing_not_near(s, m.chi_ini);
  m.dt_op_tas = normal_above(s, 500.0, 100.0, 150.0);
  m.vtas_end = s.constrained([&](Sampler& r) { return r.normal(m.vtas_ini, 1.5); },
                             [&](double v) {
                               return v > 24.0 && v < 34.0 && std::abs(v - m.vtas_ini) > 0.5;
                             });
  m.dt_op_hp = s.constrained([](Sampler& r) { return r.normal(500.0, 100.0); },
                             [&](double v) { return v > 150.0 && m.dt_op_tas + v < 2500.0; });
  m.hp_end = s.constrained([&](Sampler& r) { return r.normal(m.hp_ini, 300.0); },
                           [&](double v) { return std::abs(v - m.hp_ini) > 100.0; });
  m.xi_turn = 10.0 * turn_sign(m.chi_ini, m.chi_end);
  m.gamma_climb = m.hp_end > m.hp_ini ? 2.0 : -2.0;
  return m;
}

Scenario1WeatherWind sample_scenario1_weather(Sampler& weather, Sampler& wind) {
  Scenario1WeatherWind w;
  w.t_ini_dT = normal_above(weather, 400.0, 600.0, 50.0);
  w.t_end_dT = normal_above(weather, w.t_ini_dT + 1200.0, 600.0, w.t_ini_dT + 600.0);
  w.dT_ini = weather.normal(0.0, 10.0);
  w.dT_end = weather.normal(w.dT_ini, 3.0);
  w.t_ini_dp = normal_above(weather, 400.0, 600.0, 50.0);
  w.t_end_dp = normal_above(weather, w.t_ini_dp + 1200.0, 600.0, w.t_ini_dp + 600.0);
  w.dp_ini = weather.normal(0.0, 1500.0);
  w.dp_end = weather.normal(w.dp_ini, 300.0);

  w.t_ini_wind = normal_above(wind, 400.0, 600.0, 50.0);
  w.t_end_wind = normal_above(wind, w.t_ini_dT + 1200.0, 600.0, w.t_ini_wind + 300.0);
  w.v_wind_ini = wind.normal(0.0, 7.0);
  w.v_wind_end = wind.normal(w.v_wind_ini, 3.0);
  w.chi_wind_ini = bearing_draw(wind);
  w.chi_wind_end = wind.normal(w.chi_wind_ini, 15.0);
  return w;
}

WeatherProfile Scenario1WeatherWind::weather() const {
  return {{t_ini_dT, t_end_dT, dT_ini, dT_end}, {t_ini_dp, t_end_dp, dp_ini, dp_end}};
}

WindProfile Scenario1WeatherWind::wind() const {
  return {{t_ini_wind, t_end_wind, v_wind_ini, v_wind_end},
          {t_ini_wind, t_end_wind, chi_wind_ini * kDeg2Rad, chi_wind_end * kDeg2Rad}};
}

Scenario2Mission sample_scenario2_mission(Sampler& s) {
  Scenario2Mission m;
  m.vtas_ini = airspeed_draw(s);
  m.hp_ini = s.normal(2700.0, 200.0);
  m.chi[0] = bearing_draw(s);
  for (std::size_t i = 1; i < m.chi.size(); ++i) m.chi[i] = bearing_not_near(s, m.chi[i - 1]);
  m.t_turn1 = m.t_gnss + normal_above(s, 30.0, 50.0, 15.0);
  for (auto& dt : m.dt_turn) dt = static_cast<double>(s.discrete_uniform(10, 50));
  for (std::size_t i = 0; i < m.xi_turn.size(); ++i)
    m.xi_turn[i] = 10.0 * turn_sign(m.chi[i], m.chi[i + 1]);
  return m;
}

Scenario2Weather sample_scenario2_weather(Sampler& weather, Sampler& wind) {
  const Scenario1WeatherWind w = sample_scenario1_weather(weather, wind);
  return {w.dT_ini, w.dp_ini, w.v_wind_ini, w.chi_wind_ini};
}

WeatherProfile Scenario2Weather::weather() const { return {Ramp::constant(dT), Ramp::constant(dp)}; }

WindProfile Scenario2Weather::wind() const {
  return {Ramp::constant(v_wind), Ramp::constant(chi_wind * kDeg2Rad)};
}

namespace {

GuidanceTarget target(double vtas, ElevatorSetpoint elev, AileronSetpoint ail, Trigger trg) {
  GuidanceTarget g;
  g.throttle = {ThrottleMode::Airspeed, vtas};
  g.elevator = elev;
  g.aileron = ail;
  g.rudder = {RudderMode::Sideslip, 0.0};
  g.trigger = trg;
  return g;
}

ElevatorSetpoint hold_hp(double hp) { return {ElevatorMode::PressureAltitude, hp}; }
AileronSetpoint hold_chi(double deg) { return {AileronMode::Bearing, wrap_pi(deg * kDeg2Rad)}; }
AileronSetpoint bank(double deg) { return {AileronMode::Bank, deg * kDeg2Rad}; }
Trigger at_time(double t) { return {TriggerKind::AbsoluteTime, t, 1.0}; }
Trigger after(double dt) { return {TriggerKind::ElapsedTime, dt, 1.0}; }
Trigger capture_chi(double deg, double dir) {
  return {TriggerKind::BearingCapture, wrap_pi(deg * kDeg2Rad), dir};
}

}  // namespace

MissionPlan build_mission_plan(const Scenario1Mission& m) {
  const double turn_dir = m.xi_turn > 0.0 ? 1.0 : -1.0;
  const double climb_dir = m.gamma_climb > 0.0 ? 1.0 : -1.0;
  return {
      target(m.vtas_ini, hold_hp(m.hp_ini), hold_chi(m.chi_ini), at_time(m.t_turn)),
      target(m.vtas_ini, hold_hp(m.hp_ini), bank(m.xi_turn), capture_chi(m.chi_end, turn_dir)),
      target(m.vtas_ini, hold_hp(m.hp_ini), hold_chi(m.chi_end), after(m.dt_op_tas)),
      target(m.vtas_end, hold_hp(m.hp_ini), hold_chi(m.chi_end), after(m.dt_op_hp)),
      target(m.vtas_end, {ElevatorMode::PathAngle, m.gamma_climb * kDeg2Rad}, hold_chi(m.chi_end),
             {TriggerKind::AltitudeCapture, m.hp_end, climb_dir}),
      target(m.vtas_end, hold_hp(m.hp_end), hold_chi(m.chi_end), at_time(m.t_end)),
  };
}

MissionPlan build_mission_plan(const Scenario2Mission& m) {
  MissionPlan plan;
  plan.push_back(target(m.vtas_ini, hold_hp(m.hp_ini), hold_chi(m.chi[0]), at_time(m.t_turn1)));
  for (std::size_t i = 1; i <= 8; ++i) {
    const double xi = m.xi_turn[i - 1];
    plan.push_back(target(m.vtas_ini, hold_hp(m.hp_ini), bank(xi),
                          capture_chi(m.chi[i], xi > 0.0 ? 1.0 : -1.0)));
    const Trigger next = i < 8 ? after(m.dt_turn[i - 1]) : at_time(m.t_end);
    plan.push_back(target(m.vtas_ini, hold_hp(m.hp_ini), hold_chi(m.chi[i]), next));
  }
  return plan;
}

const std::array<TerrainZone, 6>& terrain_zones() {
  static const std::array<TerrainZone, 6> zones = {{
      {"DS", wrap_180(248.001185), 32.157903, 661.0, 9.6},
      {"FM", wrap_180(272.122371), 38.865625, 144.0, -3.2},
      {"FR", wrap_180(287.490805), 43.354486, 200.0, -14.3},
      {"MX", wrap_180(270.984538), 34.720636, 133.0, -1.0},
      {"PR", wrap_180(279.088834), 25.855172, 10.0, -6.7},
      {"UR", wrap_180(241.799731), 33.924426, 26.0, 11.8},
  }};
  return zones;
}

const TerrainZone& terrain_zone(std::string_view code) {
  for (const auto& z : terrain_zones())
    if (z.code == code) return z;
  throw ConfigError("unknown terrain zone '" + std::string(code) + "'");
}

ScenarioInstance materialize_scenario(int id, const TrajectorySeedSet& seeds) {
  Sampler mission(seeds[SeedId::MISSION]);
  Sampler weather(seeds[SeedId::WEATHER]);
  Sampler wind(seeds[SeedId::WIND]);
  ScenarioInstance sc;
  sc.id = id;
  auto& p = sc.parameters;
  if (id == 1) {
    const auto m = sample_scenario1_mission(mission);
    const auto w = sample_scenario1_weather(weather, wind);
    sc.t_end = m.t_end;
    sc.t_gnss = m.t_gnss;
    sc.vtas_ini = m.vtas_ini;
    sc.hp_ini = m.hp_ini;
    sc.chi_ini = wrap_pi(m.chi_ini * kDeg2Rad);
    sc.weather = w.weather();
    sc.wind = w.wind();
    sc.plan = build_mission_plan(m);
    p = {{"vtas_ini", m.vtas_ini},     {"hp_ini", m.hp_ini},         {"chi_ini_deg", m.chi_ini},
         {"t_gnss", m.t_gnss},         {"t_turn", m.t_turn},         {"xi_turn_deg", m.xi_turn},
         {"chi_end_deg", m.chi_end},   {"dt_op_tas", m.dt_op_tas},   {"vtas_end", m.vtas_end},
         {"dt_op_hp", m.dt_op_hp},     {"gamma_climb_deg", m.gamma_climb},
         {"hp_end", m.hp_end},         {"t_end", m.t_end},
         {"t_ini_dT", w.t_ini_dT},     {"t_end_dT", w.t_end_dT},     {"dT_ini", w.dT_ini},
         {"dT_end", w.dT_end},         {"t_ini_dp", w.t_ini_dp},     {"t_end_dp", w.t_end_dp},
         {"dp_ini", w.dp_ini},         {"dp_end", w.dp_end},         {"t_ini_wind", w.t_ini_wind},
         {"t_end_wind", w.t_end_wind}, {"v_wind_ini", w.v_wind_ini}, {"v_wind_end", w.v_wind_end},
         {"chi_wind_ini_deg", w.chi_wind_ini}, {"chi_wind_end_deg", w.chi_wind_end}};
  } else if (id == 2) {
    const auto m = sample_scenario2_mission(mission);
    const auto w = sample_scenario2_weather(weather, wind);
    sc.t_end = m.t_end;
    sc.t_gnss = m.t_gnss;
    sc.vtas_ini = m.vtas_ini;
    sc.hp_ini = m.hp_ini;
    sc.chi_ini = wrap_pi(m.chi[0] * kDeg2Rad);
    sc.weather = w.weather();
    sc.wind = w.wind();
    sc.plan = build_mission_plan(m);
    p = {{"vtas_ini", m.vtas_ini}, {"hp_ini", m.hp_ini}, {"t_gnss", m.t_gnss}};
    for (std::size_t i = 0; i < m.chi.size(); ++i)
      p.emplace_back("chi_" + std::to_string(i) + "_deg", m.chi[i]);
    for (std::size_t i = 0; i < m.xi_turn.size(); ++i)
      p.emplace_back("xi_turn_" + std::to_string(i + 1) + "_deg", m.xi_turn[i]);
    p.emplace_back("t_turn_1", m.t_turn1);
    for (std::size_t i = 0; i < m.dt_turn.size(); ++i)
      p.emplace_back("dt_turn_" + std::to_string(i + 2), m.dt_turn[i]);
    p.emplace_back("t_end", m.t_end);
    p.emplace_back("dT", w.dT);
    p.emplace_back("dp", w.dp);
    p.emplace_back("v_wind", w.v_wind);
    p.emplace_back("chi_wind_deg", w.chi_wind);
  } else {
    throw ConfigError("scenario must be 1 or 2, got " + std::to_string(id));
  }
  return sc;
}

}  // namespace fwsim
