#include "fwsim/atmosphere.hpp"

#include <cmath>
#include <string>

#include "fwsim/error.hpp"

namespace fwsim {

namespace {

using namespace isa;

constexpr double kExponent = -kG0 / (kBetaT * kR);  // ~5.2559

double standard_temperature(double Hp) { return kT0 + kBetaT * Hp; }

void check_range(double Hp) {
  if (!(Hp >= kHpMin && Hp <= kHpMax))
    throw EnvelopeError("pressure altitude " + std::to_string(Hp) +
                        " m outside the modelled troposphere");
}

}  // namespace

double pressure_from_pressure_altitude(double Hp) {
  return kP0 * std::pow(standard_temperature(Hp) / kT0, kExponent);
}

double pressure_altitude_from_pressure(double p) {
  return kT0 / kBetaT * (std::pow(p / kP0, 1.0 / kExponent) - 1.0);
}

double geopotential_from_pressure_altitude(double Hp, double dT, double dp) {
  const double hp0 = pressure_altitude_from_pressure(kP0 + dp);
  return (Hp - hp0) +
         dT / kBetaT * std::log(standard_temperature(Hp) / standard_temperature(hp0));
}

double pressure_altitude_from_geopotential(double H, double dT, double dp) {
  const double hp0 = pressure_altitude_from_pressure(kP0 + dp);
  const double t0 = standard_temperature(hp0);
  double hp = hp0 + H * t0 / (t0 + dT);
  for (int i = 0; i < 20; ++i) {
    const double ts = standard_temperature(hp);
    const double f = (hp - hp0) + dT / kBetaT * std::log(ts / t0) - H;
    const double step = f * ts / (ts + dT);
    hp -= step;
    if (std::abs(step) < 1e-10) break;
  }
  return hp;
}

AtmosphericState insa_state(double Hp, double dT, double dp) {
  check_range(Hp);
  AtmosphericState s;
  s.Hp = Hp;
  s.dT = dT;
  s.dp = dp;
  s.T = standard_temperature(Hp) + dT;
  if (!(s.T > 0.0)) throw EnvelopeError("non-positive temperature");
  s.p = pressure_from_pressure_altitude(Hp);
  s.H = geopotential_from_pressure_altitude(Hp, dT, dp);
  s.rho = s.p / (kR * s.T);
  s.sound_speed = std::sqrt(kGamma * kR * s.T);
  return s;
}

AtmosphericState insa_state_at_geopotential(double H, double dT, double dp) {
  AtmosphericState s = insa_state(pressure_altitude_from_geopotential(H, dT, dp), dT, dp);
  s.H = H;
  return s;
}

}  // namespace fwsim
