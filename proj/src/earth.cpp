#include "fwsim/earth.hpp"

#include <cmath>

namespace fwsim {

GeodeticPosition normalized(GeodeticPosition p) {
  p.lon = wrap_pi(p.lon);
  p.lat = std::clamp(p.lat, -kPi / 2.0, kPi / 2.0);
  return p;
}

CurvatureRadii curvature_radii(double lat) {
  const double s = std::sin(lat);
  const double w2 = 1.0 - wgs84::kE2 * s * s;
  const double w = std::sqrt(w2);
  return {wgs84::kA * (1.0 - wgs84::kE2) / (w2 * w), wgs84::kA / w};
}

Vec3 geodetic_to_ecef(const GeodeticPosition& p) {
  const double n = curvature_radii(p.lat).prime_vertical;
  const double cl = std::cos(p.lat), sl = std::sin(p.lat);
  return {(n + p.h) * cl * std::cos(p.lon), (n + p.h) * cl * std::sin(p.lon),
          (n * (1.0 - wgs84::kE2) + p.h) * sl};
}

Mat3 ecef_from_ned(double lon, double lat) {
  const double so = std::sin(lon), co = std::cos(lon);
  const double sa = std::sin(lat), ca = std::cos(lat);
  Mat3 r;
  r << -sa * co, -so, -ca * co,
       -sa * so,  co, -ca * so,
        ca,      0.0, -sa;
  return r;
}

GeodeticPosition offset_ned(const GeodeticPosition& p, const Vec3& d) {
  const auto r = curvature_radii(p.lat);
  GeodeticPosition q = p;
  q.lat += d.x() / (r.meridian + p.h);
  q.lon += d.y() / ((r.prime_vertical + p.h) * std::cos(p.lat));
  q.h -= d.z();
  return normalized(q);
}

Vec3 earth_rate_ned(double lat, double omega) {
  return {omega * std::cos(lat), 0.0, -omega * std::sin(lat)};
}

Vec3 transport_rate_ned(const GeodeticPosition& p, const Vec3& v) {
  const auto r = curvature_radii(p.lat);
  const double rn = r.prime_vertical + p.h;
  return {v.y() / rn, -v.x() / (r.meridian + p.h), -v.y() * std::tan(p.lat) / rn};
}

Gravity normal_gravity(double lat, double h) {
  using namespace wgs84;
  constexpr double k = (kB * kGammaPole - kA * kGammaEquator) / (kA * kGammaEquator);
  constexpr double m = kOmega * kOmega * kA * kA * kB / kGM;
  const double s2 = std::sin(lat) * std::sin(lat);
  const double gamma0 = kGammaEquator * (1.0 + k * s2) / std::sqrt(1.0 - kE2 * s2);
  const double g = gamma0 * (1.0 - 2.0 / kA * (1.0 + kF + m - 2.0 * kF * s2) * h +
                             3.0 * h * h / (kA * kA));
  return {g, Vec3(0.0, 0.0, g)};
}

double geopotential_from_geodetic(double h) {
  return kEarthRadiusGeopotential * h / (kEarthRadiusGeopotential + h);
}

double geodetic_from_geopotential(double H) {
  return kEarthRadiusGeopotential * H / (kEarthRadiusGeopotential - H);
}

Vec3 MagneticModel::dipole_ned(const GeodeticPosition& p) const {
  const Vec3 e = geodetic_to_ecef(p);
  const double r = e.norm();
  const double lat_c = std::asin(e.z() / r);  // geocentric latitude
  const double ct = std::sin(lat_c), st = std::cos(lat_c);  // colatitude cos/sin
  const double cl = std::cos(p.lon), sl = std::sin(p.lon);
  const double ar3 = std::pow(coeffs_.reference_radius / r, 3);
  const double eq = coeffs_.g11 * cl + coeffs_.h11 * sl;
  const double b_r = 2.0 * ar3 * (coeffs_.g10 * ct + eq * st);
  const double b_theta = ar3 * (coeffs_.g10 * st - eq * ct);
  const double b_lambda = ar3 * (coeffs_.g11 * sl - coeffs_.h11 * cl);
  // Geocentric NED, then rotate by the geodetic-geocentric latitude gap.
  const double xc = -b_theta, yc = b_lambda, zc = -b_r;
  const double psi = p.lat - lat_c;
  return {xc * std::cos(psi) + zc * std::sin(psi), yc,
          -xc * std::sin(psi) + zc * std::cos(psi)};
}

Vec3 MagneticModel::field_ned(const GeodeticPosition& p) const {
  const Vec3 b = dipole_ned(p);
  if (declination_correction_ == 0.0) return b;
  const double c = std::cos(declination_correction_), s = std::sin(declination_correction_);
  return {c * b.x() - s * b.y(), s * b.x() + c * b.y(), b.z()};
}

MagneticModel MagneticModel::anchored(const GeodeticPosition& ref, double target_declination,
                                      DipoleCoefficients c) {
  const MagneticModel plain(c, 0.0);
  const Vec3 b = plain.dipole_ned(ref);
  const double dipole_declination = std::atan2(b.y(), b.x());
  return MagneticModel(c, wrap_pi(target_declination - dipole_declination));
}

GeoPerturbation apply_geo_perturbation(Sampler& geo, const GeoPerturbationSpec& spec) {
  GeoPerturbation p;
  p.gravity_ned.x() = geo.normal(0.0, spec.gravity_horizontal_std);
  p.gravity_ned.y() = geo.normal(0.0, spec.gravity_horizontal_std);
  p.gravity_ned.z() = geo.normal(0.0, spec.gravity_vertical_std);
  for (int i = 0; i < 3; ++i) p.magnetic_ned[i] = geo.normal(0.0, spec.magnetic_std);
  return p;
}

}  // namespace fwsim
