#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "fwsim/airframe.hpp"
#include "fwsim/atmosphere.hpp"
#include "fwsim/error.hpp"

using namespace fwsim;
using doctest::Approx;

TEST_SUITE("airframe") {

TEST_CASE("mass properties interpolate with fuel") {
  const Airframe& af = default_airframe();
  const auto full = mass_properties(af, af.mass.fuel_capacity);
  const auto empty = mass_properties(af, 0.0);
  const auto half = mass_properties(af, 0.5 * af.mass.fuel_capacity);
  CHECK(full.mass == Approx(af.full_mass()));
  CHECK(empty.mass == Approx(af.mass.empty_mass));
  CHECK(half.mass == Approx(0.5 * (full.mass + empty.mass)));
  CHECK(half.inertia(0, 0) == Approx(0.5 * (full.inertia(0, 0) + empty.inertia(0, 0))));
  CHECK(half.inertia(0, 2) == Approx(-0.5 * (af.mass.inertia_full[3] + af.mass.inertia_empty[3])));
  CHECK((half.inertia * half.inertia_inv - Mat3::Identity()).norm() < 1e-12);
  CHECK(mass_properties(af, 99.0).mass == Approx(af.full_mass()));
}

TEST_CASE("engine power lapses with density") {
  const Airframe& af = default_airframe();
  const auto sl = engine_power(af, 1.0, isa::kP0, isa::kT0);
  CHECK(sl.power == Approx(af.engine.max_power));
  CHECK(sl.fuel_flow == Approx(af.engine.max_power * af.engine.bsfc));
  const auto s = insa_state(3000.0, 0.0, 0.0);
  const double sigma = s.rho / 1.2250;
  const double expected = af.engine.max_power * 0.5 *
                          (sigma - af.engine.lapse_offset) / (1.0 - af.engine.lapse_offset);
  CHECK(engine_power(af, 0.5, s.p, s.T).power == Approx(expected).epsilon(1e-3));
  CHECK(engine_power(af, -1.0, s.p, s.T).power == 0.0);
}

TEST_CASE("shaft speed balances absorbed power") {
  const Airframe& af = default_airframe();
  const double rho = 0.95;
  for (double power : {300.0, 1200.0, 3500.0})
    for (double v : {0.0, 22.0, 32.0}) {
      const double n = solve_shaft_speed(af, power, v, rho);
      const auto out = propeller_wrench(af, n, v, rho);
      CHECK(2.0 * kPi * n * out.torque == Approx(power).epsilon(1e-9));
    }
  CHECK(solve_shaft_speed(af, 0.0, 25.0, rho) == 0.0);
  CHECK(propeller_wrench(af, 0.0, 25.0, rho).thrust == 0.0);
}

TEST_CASE("lift and pitching moment follow the derivatives") {
  const Airframe& af = default_airframe();
  const auto mp = mass_properties(af, af.mass.fuel_capacity);
  const double qbar = 400.0, alpha = 0.05;
  const Wrench w = aero_wrench(af, alpha, 0.0, {}, Vec3::Zero(), qbar, 26.0, mp);
  const auto& c = af.aero;
  const double cl = c.cl0 + c.cl_alpha * alpha;
  const double cd = c.cd0 + c.cd_k * cl * cl;
  const double qs = qbar * af.geometry.wing_area;
  // Lift and drag rotated into body axes.
  CHECK(w.force.z() == Approx(-qs * (cl * std::cos(alpha) + cd * std::sin(alpha))));
  CHECK(w.force.x() == Approx(qs * (cl * std::sin(alpha) - cd * std::cos(alpha))));
  CHECK(std::abs(w.force.y()) < 1e-12);
  const Vec3 arm = af.geometry.aero_reference - mp.cg;
  const double my = qs * af.geometry.chord * (c.cm0 + c.cm_alpha * alpha) + arm.cross(w.force).y();
  CHECK(w.moment.y() == Approx(my));
}

TEST_CASE("envelope violations throw") {
  const Airframe& af = default_airframe();
  const auto mp = mass_properties(af, 1.0);
  CHECK_THROWS_AS(aero_wrench(af, 0.7, 0.0, {}, Vec3::Zero(), 300.0, 25.0, mp), EnvelopeError);
  CHECK_THROWS_AS(aero_wrench(af, 0.0, -0.6, {}, Vec3::Zero(), 300.0, 25.0, mp), EnvelopeError);
}

TEST_CASE("airframe file overrides and rejects unknown keys") {
  const auto f = KeyValueFile::parse_string("empty_mass = 20\nprop_ct = 0.1 0 -0.1\ncontrol_limit_deg = 25\n");
  const Airframe af = load_airframe(f);
  CHECK(af.mass.empty_mass == 20.0);
  CHECK(af.propeller.ct[2] == -0.1);
  CHECK(af.control_limit == Approx(25.0 * kDeg2Rad));
  CHECK_THROWS_AS(load_airframe(KeyValueFile::parse_string("wingarea = 1\n")), ConfigError);
  CHECK_THROWS_AS(load_airframe(KeyValueFile::parse_string("prop_ct = 1 2\n")), ConfigError);
}

TEST_CASE("shipped airframe file equals the built-in model") {
  const auto path = std::filesystem::path(FWSIM_DEFAULT_CONFIG_DIR) / "airframe.txt";
  const Airframe af = load_airframe(path);
  const Airframe& d = default_airframe();
  CHECK(af.mass.empty_mass == d.mass.empty_mass);
  CHECK(af.aero.cm_alpha == d.aero.cm_alpha);
  CHECK(af.engine.max_power == d.engine.max_power);
  CHECK(af.propeller.cp == d.propeller.cp);
  CHECK(af.control_limit == Approx(d.control_limit));
}

}
