#pragma once

// The two GNSS-denied scenarios: seeded mission, weather and wind sampling,
// their translation into mission plans, and the six terrain-zone presets.
// Parameters are drawn in table row order; each restriction is enforced by
// redrawing only the offending parameter.

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fwsim/guidance.hpp"
#include "fwsim/seedtree.hpp"
#include "fwsim/wind.hpp"

namespace fwsim {

/// Angles in degrees.
struct Scenario1Mission {
  double vtas_ini = 0.0;
  double hp_ini = 0.0;
  double chi_ini = 0.0;
  double t_gnss = 100.0;
  double t_turn = 0.0;
  double xi_turn = 0.0;     ///< +-10, sign of the shortest turn
  double chi_end = 0.0;
  double dt_op_tas = 0.0;
  double vtas_end = 0.0;
  double dt_op_hp = 0.0;
  double gamma_climb = 0.0; ///< +-2, sign of the altitude change
  double hp_end = 0.0;
  double t_end = 3800.0;
};

struct Scenario1WeatherWind {
  double t_ini_dT = 0.0, t_end_dT = 0.0, dT_ini = 0.0, dT_end = 0.0;
  double t_ini_dp = 0.0, t_end_dp = 0.0, dp_ini = 0.0, dp_end = 0.0;
  double t_ini_wind = 0.0, t_end_wind = 0.0, v_wind_ini = 0.0, v_wind_end = 0.0;
  double chi_wind_ini = 0.0, chi_wind_end = 0.0;  ///< [deg]

  WeatherProfile weather() const;
  WindProfile wind() const;
};

struct Scenario2Mission {
  double vtas_ini = 0.0;
  double hp_ini = 0.0;
  std::array<double, 9> chi{};     ///< chi_0 .. chi_8 [deg]
  std::array<double, 8> xi_turn{}; ///< xi_1 .. xi_8 [deg]
  double t_turn1 = 0.0;
  std::array<double, 7> dt_turn{}; ///< dt_TURN,2 .. dt_TURN,8 [s]
  double t_gnss = 100.0;
  double t_end = 500.0;
};

struct Scenario2Weather {
  double dT = 0.0, dp = 0.0, v_wind = 0.0, chi_wind = 0.0;  ///< chi_wind [deg]

  WeatherProfile weather() const;
  WindProfile wind() const;
};

Scenario1Mission sample_scenario1_mission(Sampler& mission);
/// `weather` feeds the temperature and pressure rows, `wind` the wind rows.
/// The final wind ramp time is centred on the temperature ramp start plus
/// 1200 s, not on the wind ramp start.
Scenario1WeatherWind sample_scenario1_weather(Sampler& weather, Sampler& wind);
Scenario2Mission sample_scenario2_mission(Sampler& mission);
/// The initial values of the scenario-1 weather and wind draws.
Scenario2Weather sample_scenario2_weather(Sampler& weather, Sampler& wind);

MissionPlan build_mission_plan(const Scenario1Mission& m);
MissionPlan build_mission_plan(const Scenario2Mission& m);

struct TerrainZone {
  std::string_view code;
  double lon_deg = 0.0;   ///< wrapped to (-180, 180]
  double lat_deg = 0.0;
  double ground_altitude = 0.0;  ///< [m]
  double declination_deg = 0.0;  ///< magnetic declination at the zone origin
};

const std::array<TerrainZone, 6>& terrain_zones();
/// Throws ConfigError for unknown codes.
const TerrainZone& terrain_zone(std::string_view code);

/// A scenario ready to fly.
struct ScenarioInstance {
  int id = 1;
  double t_end = 0.0;
  double t_gnss = 0.0;
  double vtas_ini = 0.0;
  double hp_ini = 0.0;
  double chi_ini = 0.0;   ///< [rad]
  WeatherProfile weather;
  WindProfile wind;
  MissionPlan plan;
  /// Every sampled parameter as (name, value) for the audit dump.
  std::vector<std::pair<std::string, double>> parameters;
};

/// Samples scenario `id` (1 or 2) from the MISSION, WEATHER and WIND seeds.
ScenarioInstance materialize_scenario(int id, const TrajectorySeedSet& seeds);

}  // namespace fwsim
