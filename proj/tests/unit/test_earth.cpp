#include <cmath>

#include "doctest.h"
#include "fwsim/earth.hpp"

using namespace fwsim;
using doctest::Approx;

TEST_SUITE("earth") {

TEST_CASE("normal gravity matches the ellipsoid values at equator and pole") {
  CHECK(normal_gravity(0.0, 0.0).magnitude == Approx(9.7803253359).epsilon(1e-12));
  CHECK(normal_gravity(kPi / 2, 0.0).magnitude == Approx(9.8321849378).epsilon(1e-12));
  const Gravity g = normal_gravity(0.7, 1000.0);
  CHECK(g.ned.x() == 0.0);
  CHECK(g.ned.z() == g.magnitude);
}

TEST_CASE("free-air gradient is about -3.09e-6 per metre") {
  const double lat = 0.5;
  const double grad = (normal_gravity(lat, 1000.0).magnitude - normal_gravity(lat, 0.0).magnitude) / 1000.0;
  CHECK(grad == Approx(-3.086e-6).epsilon(0.01));
}

TEST_CASE("geodetic to ECEF on the axes") {
  const Vec3 e = geodetic_to_ecef({0.0, 0.0, 0.0});
  CHECK(e.x() == Approx(wgs84::kA));
  CHECK(std::abs(e.y()) < 1e-9);
  const Vec3 p = geodetic_to_ecef({0.3, kPi / 2, 100.0});
  CHECK(p.z() == Approx(wgs84::kB + 100.0).epsilon(1e-12));
  CHECK(std::hypot(p.x(), p.y()) < 1e-6);
}

TEST_CASE("curvature radii at the equator") {
  const auto r = curvature_radii(0.0);
  CHECK(r.prime_vertical == Approx(wgs84::kA));
  CHECK(r.meridian == Approx(wgs84::kA * (1.0 - wgs84::kE2)));
}

TEST_CASE("NED offsets agree with ECEF displacement") {
  const GeodeticPosition p{-1.9, 0.6, 2500.0};
  const Vec3 d(120.0, -80.0, 15.0);
  const GeodeticPosition q = offset_ned(p, d);
  const Vec3 de = ecef_from_ned(p.lon, p.lat).transpose() * (geodetic_to_ecef(q) - geodetic_to_ecef(p));
  CHECK((de - d).norm() < 0.01);
}

TEST_CASE("geopotential and geodetic altitudes convert both ways") {
  CHECK(geopotential_from_geodetic(1000.0) == Approx(6356766.0 * 1000.0 / 6357766.0));
  for (double h : {-500.0, 0.0, 3000.0, 11000.0})
    CHECK(geodetic_from_geopotential(geopotential_from_geodetic(h)) == Approx(h).epsilon(1e-13));
}

TEST_CASE("Earth and transport rates") {
  const Vec3 w = earth_rate_ned(0.0);
  CHECK(w.x() == Approx(wgs84::kOmega));
  CHECK(w.z() == Approx(0.0));
  const GeodeticPosition p{0.0, 0.0, 0.0};
  const Vec3 t = transport_rate_ned(p, Vec3(100.0, 0.0, 0.0));
  CHECK(t.y() == Approx(-100.0 / curvature_radii(0.0).meridian));
  CHECK(t.x() == Approx(0.0));
}

TEST_CASE("degree-1 field equals the dipole vector formula") {
  const DipoleCoefficients c{};
  const MagneticModel m(c, 0.0);
  for (const GeodeticPosition p : {GeodeticPosition{-1.95, 0.56, 3000.0},
                                   GeodeticPosition{0.4, -0.9, 0.0},
                                   GeodeticPosition{2.8, 1.2, 500.0}}) {
    const Vec3 r = geodetic_to_ecef(p);
    const Vec3 g(c.g11, c.h11, c.g10);
    const double rn = r.norm();
    const Vec3 rh = r / rn;
    const double a3 = std::pow(c.reference_radius / rn, 3);
    const Vec3 b_ecef = a3 * (3.0 * g.dot(rh) * rh - g);
    const Vec3 b_ned = ecef_from_ned(p.lon, p.lat).transpose() * b_ecef;
    CHECK((m.field_ned(p) - b_ned).norm() < 1e-6 * b_ned.norm());
  }
}

TEST_CASE("anchored model reproduces the requested declination") {
  const GeodeticPosition ref{-1.9198, 0.5613, 0.0};
  const double target = 9.6 * kDeg2Rad;
  const MagneticModel m = MagneticModel::anchored(ref, target);
  const Vec3 b = m.field_ned(ref);
  CHECK(std::atan2(b.y(), b.x()) == Approx(target).epsilon(1e-12));
  CHECK(b.norm() > 40000.0);
  CHECK(b.norm() < 60000.0);
  CHECK(b.z() > 0.0);  // dips downward in the northern hemisphere
}

TEST_CASE("geo perturbation draws six normals in order") {
  Sampler s(77);
  const GeoPerturbation p = apply_geo_perturbation(s, {});
  CHECK(s.words_consumed() == 12);
  Sampler r(77);
  CHECK(p.gravity_ned.x() == r.normal(0.0, 5e-5));
  CHECK(p.gravity_ned.y() == r.normal(0.0, 5e-5));
  CHECK(p.gravity_ned.z() == r.normal(0.0, 2e-4));
  CHECK(p.magnetic_ned.x() == r.normal(0.0, 150.0));
  Sampler z(77);
  const GeoPerturbation zero = apply_geo_perturbation(z, {0.0, 0.0, 0.0});
  CHECK(zero.gravity_ned.isZero());
  CHECK(zero.magnetic_ned.isZero());
}

}
