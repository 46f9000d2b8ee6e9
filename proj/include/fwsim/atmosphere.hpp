#pragma once

// International standard atmosphere with temperature and pressure offsets
// (troposphere only).
//
// Pressure altitude Hp is a pure function of pressure through the standard
// relation. The temperature offset shifts the temperature profile, and the
// pressure offset shifts the pressure found at zero geopotential altitude, so
// geopotential H and Hp differ by the hydrostatic integral of T / T_std.

namespace fwsim {

namespace isa {
inline constexpr double kT0 = 288.15;       // [K]
inline constexpr double kP0 = 101325.0;     // [Pa]
inline constexpr double kBetaT = -0.0065;   // troposphere lapse rate [K/m]
inline constexpr double kR = 287.05287;     // specific gas constant [J/(kg K)]
inline constexpr double kG0 = 9.80665;      // [m/s^2]
inline constexpr double kGamma = 1.4;
inline constexpr double kHpMin = -2000.0;   // modelled Hp range [m]
inline constexpr double kHpMax = 11000.0;
}  // namespace isa

struct AtmosphericState {
  double T = isa::kT0;    ///< temperature [K]
  double p = isa::kP0;    ///< pressure [Pa]
  double Hp = 0.0;        ///< pressure altitude [m]
  double H = 0.0;         ///< geopotential altitude [m]
  double dT = 0.0;        ///< temperature offset [K]
  double dp = 0.0;        ///< pressure offset [Pa]
  double rho = 0.0;       ///< density [kg/m^3]
  double sound_speed = 0.0;  ///< [m/s]
};

double pressure_from_pressure_altitude(double Hp);
/// Exact inverse of pressure_from_pressure_altitude.
double pressure_altitude_from_pressure(double p);

/// Geopotential altitude at pressure altitude Hp under the given offsets.
double geopotential_from_pressure_altitude(double Hp, double dT, double dp);
/// Inverse of geopotential_from_pressure_altitude (Newton iteration).
double pressure_altitude_from_geopotential(double H, double dT, double dp);

/// Full state at pressure altitude Hp. Throws EnvelopeError outside the
/// modelled layer.
AtmosphericState insa_state(double Hp, double dT, double dp);
/// Full state at geopotential altitude H.
AtmosphericState insa_state_at_geopotential(double H, double dT, double dp);

}  // namespace fwsim
