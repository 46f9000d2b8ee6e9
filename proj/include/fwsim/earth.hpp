#pragma once

// WGS84 ellipsoid, Somigliana normal gravity, geodetic/geopotential altitude
// conversion, a tilted-dipole magnetic field, and the seeded truth-vs-onboard
// gravity and magnetic discrepancy.

#include "fwsim/math.hpp"
#include "fwsim/seedtree.hpp"

namespace fwsim {

namespace wgs84 {
inline constexpr double kA = 6378137.0;                 // semi-major axis [m]
inline constexpr double kF = 1.0 / 298.257223563;       // flattening
inline constexpr double kB = kA * (1.0 - kF);           // semi-minor axis [m]
inline constexpr double kE2 = kF * (2.0 - kF);          // first eccentricity^2
inline constexpr double kOmega = 7.292115e-5;           // Earth rate [rad/s]
inline constexpr double kGM = 3.986004418e14;           // [m^3/s^2]
inline constexpr double kGammaEquator = 9.7803253359;   // normal gravity [m/s^2]
inline constexpr double kGammaPole = 9.8321849378;
}  // namespace wgs84

/// Spherical Earth radius used for the geopotential altitude ratio [m].
inline constexpr double kEarthRadiusGeopotential = 6356766.0;

struct GeodeticPosition {
  double lon = 0.0;  ///< longitude [rad], (-pi, pi]
  double lat = 0.0;  ///< geodetic latitude [rad], [-pi/2, pi/2]
  double h = 0.0;    ///< geodetic altitude [m]
};

GeodeticPosition normalized(GeodeticPosition p);

/// Meridian (M) and prime-vertical (N) radii of curvature [m].
struct CurvatureRadii {
  double meridian = 0.0;
  double prime_vertical = 0.0;
};
CurvatureRadii curvature_radii(double lat);

Vec3 geodetic_to_ecef(const GeodeticPosition& p);
/// Rotation taking NED components into ECEF components at (lon, lat).
Mat3 ecef_from_ned(double lon, double lat);
/// Displaces p by a small NED offset [m] (first order in offset / radius).
GeodeticPosition offset_ned(const GeodeticPosition& p, const Vec3& d_ned);

/// Earth angular velocity in NED [rad/s].
Vec3 earth_rate_ned(double lat, double omega = wgs84::kOmega);
/// Transport rate of the NED frame for ground velocity v_ned [rad/s].
Vec3 transport_rate_ned(const GeodeticPosition& p, const Vec3& v_ned);

struct Gravity {
  double magnitude = 0.0;  ///< [m/s^2]
  Vec3 ned;                ///< along geodetic down
};
/// Somigliana normal gravity with the WGS84 second-order altitude correction.
Gravity normal_gravity(double lat, double h);

/// Geopotential altitude over a spherical Earth: H = R h / (R + h).
double geopotential_from_geodetic(double h);
double geodetic_from_geopotential(double H);

/// Geocentric tilted-dipole coefficients (degree-1 Gauss coefficients, nT).
struct DipoleCoefficients {
  double g10 = -29404.8;
  double g11 = -1450.9;
  double h11 = 4652.5;
  double reference_radius = 6371200.0;
};

/// Tilted dipole with an extra constant rotation of the horizontal field so
/// that the declination at a reference location matches a given value.
class MagneticModel {
 public:
  MagneticModel() = default;
  explicit MagneticModel(DipoleCoefficients c, double declination_correction = 0.0)
      : coeffs_(c), declination_correction_(declination_correction) {}

  /// Builds the model so that the declination at `ref` equals
  /// `target_declination` [rad].
  static MagneticModel anchored(const GeodeticPosition& ref, double target_declination,
                                DipoleCoefficients c = {});

  /// Field in NED [nT].
  Vec3 field_ned(const GeodeticPosition& p) const;
  double declination_correction() const { return declination_correction_; }

 private:
  Vec3 dipole_ned(const GeodeticPosition& p) const;

  DipoleCoefficients coeffs_{};
  double declination_correction_ = 0.0;
};

/// Standard deviations of the truth-vs-onboard discrepancy.
struct GeoPerturbationSpec {
  double gravity_horizontal_std = 5.0e-5;  ///< deflection of the vertical [m/s^2]
  double gravity_vertical_std = 2.0e-4;    ///< gravity anomaly [m/s^2]
  double magnetic_std = 150.0;             ///< per NED axis [nT]
};

/// Additive biases applied on the truth side only.
struct GeoPerturbation {
  Vec3 gravity_ned = Vec3::Zero();
  Vec3 magnetic_ned = Vec3::Zero();
};

/// Draws, in order, gravity N/E/D then magnetic N/E/D from the GEO stream.
GeoPerturbation apply_geo_perturbation(Sampler& geo, const GeoPerturbationSpec& spec);

/// Gravity and magnetism as used on one side of the simulation.
struct EarthModel {
  MagneticModel magnetic;
  GeoPerturbation perturbation;  ///< zero for the onboard model
  double rotation_rate = wgs84::kOmega;

  Vec3 gravity_ned(const GeodeticPosition& p) const {
    return normal_gravity(p.lat, p.h).ned + perturbation.gravity_ned;
  }
  Vec3 magnetic_ned(const GeodeticPosition& p) const {
    return magnetic.field_ned(p) + perturbation.magnetic_ned;
  }
};

}  // namespace fwsim
