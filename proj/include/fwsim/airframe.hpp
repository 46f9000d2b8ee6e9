#pragma once

// Parametric fixed-wing airframe: mass/inertia versus fuel, a linear
// stability-derivative aerodynamic model, a piston engine power map and a
// fixed-pitch propeller. No seeds enter this module.

#include <filesystem>

#include "fwsim/config.hpp"
#include "fwsim/math.hpp"

namespace fwsim {

/// Throttle fraction and surface deflections [rad]. Positive elevator
/// pitches the nose down, positive aileron rolls right, positive rudder yaws
/// left.
struct ControlInputs {
  double throttle = 0.0;
  double elevator = 0.0;
  double aileron = 0.0;
  double rudder = 0.0;
};

struct Geometry {
  double wing_area = 0.85;   ///< S [m^2]
  double span = 2.68;        ///< b [m]
  double chord = 0.32;       ///< mean aerodynamic chord [m]
  Vec3 aero_reference = Vec3::Zero();  ///< moment reference point, body axes [m]
};

struct MassModel {
  double empty_mass = 17.715;    ///< [kg]
  double fuel_capacity = 2.0;    ///< [kg]
  Vec3 cg_full = Vec3::Zero();   ///< body axes relative to the body origin [m]
  Vec3 cg_empty = Vec3(0.005, 0.0, 0.0);
  /// Ixx, Iyy, Izz, Ixz [kg m^2]
  Eigen::Vector4d inertia_full = Eigen::Vector4d(1.95, 1.55, 3.20, 0.08);
  Eigen::Vector4d inertia_empty = Eigen::Vector4d(1.80, 1.48, 3.00, 0.075);
};

struct MassProperties {
  double mass = 0.0;
  Vec3 cg = Vec3::Zero();
  Mat3 inertia = Mat3::Identity();
  Mat3 inertia_inv = Mat3::Identity();
};

struct AeroCoefficients {
  double cl0 = 0.25, cl_alpha = 5.2, cl_elevator = 0.4, cl_q = 0.0;
  double cd0 = 0.03, cd_k = 0.047;
  double cm0 = 0.03, cm_alpha = -0.8, cm_elevator = -1.1, cm_q = -12.0;
  double cy_beta = -0.35, cy_rudder = 0.15;
  double cl_beta = -0.08, cl_p = -0.5, cl_r = 0.12, cl_aileron = 0.25, cl_rudder = 0.005;
  double cn_beta = 0.07, cn_p = -0.05, cn_r = -0.12, cn_aileron = -0.01, cn_rudder = -0.06;
  double alpha_limit = 30.0 * kDeg2Rad;
  double beta_limit = 30.0 * kDeg2Rad;
  double mach_limit = 0.3;
};

struct EngineModel {
  double max_power = 4180.0;          ///< at sea level standard [W]
  double lapse_offset = 0.117;        ///< P ~ (sigma - offset) / (1 - offset)
  double bsfc = 0.5 / 3.6e6;          ///< specific fuel consumption [kg/J]
};

struct PropellerModel {
  double diameter = 0.51;  ///< [m]
  /// CT(J) = ct[0] + ct[1] J + ct[2] J^2
  Eigen::Vector3d ct = Eigen::Vector3d(0.11, -0.04, -0.12);
  /// CP(J) = cp[0] + cp[1] J + cp[2] J^2 + cp[3] J^3
  Eigen::Vector4d cp = Eigen::Vector4d(0.045, 0.01, -0.02, -0.03);
};

struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
};

struct EngineOutput {
  double power = 0.0;      ///< [W]
  double fuel_flow = 0.0;  ///< [kg/s]
};

struct PropellerOutput {
  double shaft_speed = 0.0;  ///< n [rev/s]
  double thrust = 0.0;       ///< [N]
  double torque = 0.0;       ///< [N m]
};

struct Airframe {
  Geometry geometry;
  MassModel mass;
  AeroCoefficients aero;
  EngineModel engine;
  PropellerModel propeller;
  double control_limit = 20.0 * kDeg2Rad;  ///< symmetric surface limit [rad]

  double full_mass() const { return mass.empty_mass + mass.fuel_capacity; }
};

/// Built-in stand-in airframe (identical to config/airframe.txt).
const Airframe& default_airframe();
/// Default airframe overridden by the entries of a key-value file.
Airframe load_airframe(const KeyValueFile& file);
Airframe load_airframe(const std::filesystem::path& path);

/// Linear interpolation between the empty and full configurations.
MassProperties mass_properties(const Airframe& af, double fuel);

/// Aerodynamic force and moment about the current cg in body axes.
/// `rates` are body rates relative to the air mass [rad/s]. Throws
/// EnvelopeError when alpha or beta exceed the model limits.
Wrench aero_wrench(const Airframe& af, double alpha, double beta, const ControlInputs& u,
                   const Vec3& rates, double qbar, double airspeed, const MassProperties& mp);

EngineOutput engine_power(const Airframe& af, double throttle, double p, double T);

/// Thrust and torque at a given shaft speed; n = 0 yields zero output.
PropellerOutput propeller_wrench(const Airframe& af, double n, double airspeed, double rho);
/// Shaft speed at which the propeller absorbs `power` (largest root of the
/// power balance). Zero power gives n = 0.
double solve_shaft_speed(const Airframe& af, double power, double airspeed, double rho);
/// Engine plus propeller: thrust along body x applied at the cg and the
/// torque reaction as a rolling moment.
PropellerOutput powerplant(const Airframe& af, double power, double airspeed, double rho);

}  // namespace fwsim
