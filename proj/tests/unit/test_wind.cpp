#include <cmath>
#include <vector>

#include "doctest.h"
#include "fwsim/error.hpp"
#include "fwsim/wind.hpp"

using namespace fwsim;
using doctest::Approx;

TEST_SUITE("wind") {

TEST_CASE("ramp holds, interpolates and holds") {
  const Ramp r{100.0, 300.0, 2.0, 6.0};
  CHECK(r(0.0) == 2.0);
  CHECK(r(100.0) == 2.0);
  CHECK(r(200.0) == Approx(4.0));
  CHECK(r(300.0) == 6.0);
  CHECK(r(1e6) == 6.0);
  CHECK(Ramp::constant(3.5)(42.0) == 3.5);
}

TEST_CASE("low-frequency wind points along its bearing") {
  WindProfile w{Ramp::constant(10.0), Ramp::constant(kPi / 2)};
  const Vec3 v = wind_lowfreq(0.0, w);
  CHECK(std::abs(v.x()) < 1e-12);
  CHECK(v.y() == Approx(10.0));
  CHECK(v.z() == 0.0);
  w.speed = Ramp::constant(-4.0);
  w.bearing = Ramp::constant(0.0);
  CHECK(wind_lowfreq(0.0, w).x() == Approx(-4.0));
}

TEST_CASE("severity names parse") {
  CHECK(parse_turbulence_severity("moderate") == TurbulenceSeverity::Moderate);
  CHECK(to_string(TurbulenceSeverity::Severe) == "severe");
  CHECK_THROWS_AS(parse_turbulence_severity("extreme"), ConfigError);
}

TEST_CASE("Dryden parameters above 2000 ft") {
  const auto p = dryden_parameters(2700.0, TurbulenceSeverity::Light);
  CHECK(p.length.x() == Approx(533.4));
  CHECK(p.length.z() == Approx(533.4));
  CHECK(p.sigma.x() == Approx(1.5));
  CHECK(dryden_parameters(2700.0, TurbulenceSeverity::Severe).sigma.z() == Approx(4.5));
}

TEST_CASE("Dryden parameters at 1000 ft") {
  const auto p = dryden_parameters(304.8, TurbulenceSeverity::Light);
  const double w20 = 15.0 * 1852.0 / 3600.0;
  CHECK(p.sigma.z() == Approx(0.1 * w20));
  CHECK(p.sigma.x() == Approx(0.1 * w20).epsilon(1e-9));  // the altitude factor equals 1 here
  CHECK(p.length.x() == Approx(304.8));
  CHECK(p.length.z() == Approx(304.8));
  const auto mid = dryden_parameters(1500.0 * 0.3048, TurbulenceSeverity::Light);
  CHECK(mid.length.x() == Approx(0.5 * (304.8 + 533.4)));
}

TEST_CASE("each step consumes five normals") {
  Sampler s(5);
  DrydenTurbulence d(TurbulenceSeverity::Off);
  d.initialize(29.0, 2700.0, s);
  CHECK(s.words_consumed() == 10);
  d.step(0.002, 29.0, 2700.0, s);
  d.step(0.002, 29.0, 2700.0, s);
  CHECK(s.words_consumed() == 30);
  CHECK(d.velocity_body().isZero());
}

TEST_CASE("ensemble variance and lag correlation") {
  const int n = 4000;
  const double V = 30.0, h = 2700.0, dt = 1.0;
  std::vector<Vec3> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    Sampler s(1000 + i);
    DrydenTurbulence d(TurbulenceSeverity::Moderate);
    d.initialize(V, h, s);
    for (int k = 0; k < 50; ++k) d.step(0.02, V, h, s);
    a[i] = d.velocity_body();
    d.step(dt, V, h, s);
    b[i] = d.velocity_body();
  }
  Vec3 var = Vec3::Zero();
  double cov_u = 0.0;
  for (int i = 0; i < n; ++i) {
    var += a[i].cwiseProduct(a[i]);
    cov_u += a[i].x() * b[i].x();
  }
  var /= n;
  cov_u /= n;
  for (int c = 0; c < 3; ++c) CHECK(var[c] == Approx(9.0).epsilon(0.08));
  CHECK(cov_u / 9.0 == Approx(std::exp(-V * dt / 533.4)).epsilon(0.03));
}

}
