#pragma once

// Rigid-body equations of motion over the rotating WGS84 ellipsoid and the
// two fourth-order Runge-Kutta integrators used to propagate them.

#include <functional>
#include <string_view>
#include <vector>

#include "fwsim/airframe.hpp"
#include "fwsim/atmosphere.hpp"
#include "fwsim/earth.hpp"
#include "fwsim/wind.hpp"

namespace fwsim {

struct TruthState {
  GeodeticPosition pos;
  Vec3 v_b = Vec3::Zero();          ///< velocity relative to the Earth, body axes [m/s]
  Quat q_nb = Quat::Identity();     ///< body to NED: v_n = q_nb * v_b
  Vec3 w_ib_b = Vec3::Zero();       ///< inertial angular rate, body axes [rad/s]
  double mass = 0.0;                ///< [kg]
};

struct StateDerivative {
  Vec3 pos_rate = Vec3::Zero();     ///< (lon, lat, h) rates
  Vec3 v_dot = Vec3::Zero();
  Eigen::Vector4d q_dot = Eigen::Vector4d::Zero();  ///< (w, x, y, z)
  Vec3 w_dot = Vec3::Zero();
  double m_dot = 0.0;
  Vec3 w_nb_b = Vec3::Zero();       ///< body rate relative to NED, body axes
};

/// Everything the truth environment provides at (x, t).
struct FlightEnvironment {
  const Airframe* airframe = &default_airframe();
  const EarthModel* earth = nullptr;  ///< required
  WeatherProfile weather;
  WindProfile wind;
  Vec3 turbulence_b = Vec3::Zero();   ///< held over the integration step
  bool earth_rotation = true;
};

/// Air data and forces that accompany one derivative evaluation.
struct FlightEvaluation {
  StateDerivative deriv;
  AtmosphericState atm;
  double airspeed = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  Vec3 v_air_b = Vec3::Zero();
  Vec3 wind_n = Vec3::Zero();        ///< low-frequency wind
  Vec3 specific_force_b = Vec3::Zero();  ///< at the cg
  Vec3 gravity_n = Vec3::Zero();
  Vec3 w_ie_n = Vec3::Zero();
  Vec3 w_en_n = Vec3::Zero();
  PropellerOutput propeller;
  EngineOutput engine;
  MassProperties mass;
};

/// Full nonlinear evaluation. Throws EnvelopeError when the airframe or
/// atmosphere model is evaluated outside its domain.
FlightEvaluation evaluate_flight(const TruthState& x, double t, const ControlInputs& u,
                                 const FlightEnvironment& env);

inline StateDerivative state_derivative(const TruthState& x, double t, const ControlInputs& u,
                                        const FlightEnvironment& env) {
  return evaluate_flight(x, t, u, env).deriv;
}

/// Derivative callback used by the integrators; controls and environment are
/// bound by the caller.
using DerivativeFn = std::function<StateDerivative(const TruthState&, double)>;

enum class Integrator { SO3, R4Norm };
Integrator parse_integrator(std::string_view s);
std::string_view to_string(Integrator i);

/// Classical RK4 with the quaternion treated as a 4-vector, normalised after
/// the step.
TruthState rk4_step_r4norm(const TruthState& x, double t, double dt, const DerivativeFn& f);
/// Runge-Kutta-Munthe-Kaas RK4: the attitude moves on SO(3) through the
/// exponential map of body-rate increments, everything else is classical.
TruthState rk4_step_so3(const TruthState& x, double t, double dt, const DerivativeFn& f);
TruthState rk4_step(Integrator which, const TruthState& x, double t, double dt,
                    const DerivativeFn& f);

bool is_finite(const TruthState& x);

/// Control law evaluated at every step start and held over the step.
using ControlLaw = std::function<ControlInputs(double t, const TruthState& x)>;

/// Integrates from t = 0 to t_end at fixed dt; returns states at every step
/// (including the initial one). Throws DivergenceError on non-finite state.
std::vector<TruthState> propagate_truth(const TruthState& x0, const ControlLaw& control,
                                        const FlightEnvironment& env, double t_end, double dt,
                                        Integrator integrator = Integrator::SO3);

/// Steady straight flight condition to trim for.
struct TrimTarget {
  double airspeed = 29.0;  ///< [m/s]
  double h = 2700.0;       ///< geodetic altitude [m]
  double lon = 0.0;        ///< [rad]
  double lat = 0.0;        ///< [rad]
  double heading = 0.0;    ///< direction of the air-relative velocity [rad]
  double fuel = 2.0;       ///< [kg]
  double t = 0.0;          ///< weather evaluation time [s]
};

struct TrimResult {
  TruthState state;
  ControlInputs controls;
  double alpha = 0.0;
  double bank = 0.0;
  double residual_force = 0.0;   ///< |m v_dot| [N]
  double residual_moment = 0.0;  ///< |I w_dot| [N m]
  int iterations = 0;
};

/// Newton trim of alpha, the four controls and the bank angle with zero
/// sideslip and zero flight-path angle, ignoring low-frequency wind and
/// turbulence. Throws EnvelopeError when no trim is found.
TrimResult trim(const TrimTarget& target, const FlightEnvironment& env);

/// Places a trimmed condition into a wind field: keeps the air-relative
/// velocity, rotates the heading so that the ground course equals `course`,
/// and adds the wind to the ground velocity.
TruthState crab_into_wind(const TrimResult& trimmed, double course, const Vec3& wind_n);

}  // namespace fwsim
