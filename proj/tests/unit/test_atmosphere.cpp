#include <cmath>

#include "doctest.h"
#include "fwsim/atmosphere.hpp"
#include "fwsim/error.hpp"

using namespace fwsim;
using doctest::Approx;

namespace {

// Composite Simpson integration of dH/dHp = (T_std + dT) / T_std.
double geopotential_by_quadrature(double Hp, double dT, double dp) {
  const double hp0 = pressure_altitude_from_pressure(isa::kP0 + dp);
  const int n = 2000;
  const double h = (Hp - hp0) / n;
  auto f = [&](double x) {
    const double ts = isa::kT0 + isa::kBetaT * x;
    return (ts + dT) / ts;
  };
  double s = f(hp0) + f(Hp);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(hp0 + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_SUITE("atmosphere") {

TEST_CASE("sea level standard values") {
  const auto s = insa_state(0.0, 0.0, 0.0);
  CHECK(s.T == Approx(288.15));
  CHECK(s.p == Approx(101325.0));
  CHECK(s.rho == Approx(1.225).epsilon(1e-3));
  CHECK(s.sound_speed == Approx(340.294).epsilon(1e-4));
  CHECK(s.H == Approx(0.0));
}

TEST_CASE("tropopause pressure") {
  CHECK(pressure_from_pressure_altitude(11000.0) == Approx(22632.0).epsilon(1e-4));
  CHECK(insa_state(11000.0, 0.0, 0.0).T == Approx(216.65));
}

TEST_CASE("pressure altitude round trip") {
  for (double hp = -2000.0; hp <= 11000.0; hp += 250.0)
    CHECK(std::abs(pressure_altitude_from_pressure(pressure_from_pressure_altitude(hp)) - hp) < 1e-6);
}

TEST_CASE("geopotential altitude matches hydrostatic quadrature") {
  for (double dT : {-15.0, 0.0, 12.0})
    for (double dp : {-2000.0, 0.0, 1500.0})
      for (double hp : {-500.0, 1200.0, 2700.0, 6000.0})
        CHECK(geopotential_from_pressure_altitude(hp, dT, dp) ==
              Approx(geopotential_by_quadrature(hp, dT, dp)).epsilon(1e-9));
}

TEST_CASE("offsets shift zero geopotential and the temperature") {
  const double dp = 1200.0;
  const double hp0 = pressure_altitude_from_pressure(isa::kP0 + dp);
  CHECK(std::abs(geopotential_from_pressure_altitude(hp0, 7.0, dp)) < 1e-9);
  CHECK(insa_state(2000.0, 7.0, dp).T == Approx(288.15 - 13.0 + 7.0));
  // Warmer air: a given pressure level sits higher.
  CHECK(geopotential_from_pressure_altitude(3000.0, 10.0, 0.0) >
        geopotential_from_pressure_altitude(3000.0, 0.0, 0.0));
}

TEST_CASE("geopotential to pressure altitude inverts") {
  for (double dT : {-20.0, 5.0})
    for (double dp : {-1500.0, 900.0})
      for (double H : {0.0, 1500.0, 3200.0, 8000.0}) {
        const double hp = pressure_altitude_from_geopotential(H, dT, dp);
        CHECK(std::abs(geopotential_from_pressure_altitude(hp, dT, dp) - H) < 1e-6);
        CHECK(insa_state_at_geopotential(H, dT, dp).H == H);
      }
}

TEST_CASE("outside the modelled layer throws") {
  CHECK_THROWS_AS(insa_state(11500.0, 0.0, 0.0), EnvelopeError);
  CHECK_THROWS_AS(insa_state(-2500.0, 0.0, 0.0), EnvelopeError);
  CHECK_NOTHROW(insa_state(11000.0, 0.0, 0.0));
}

}
