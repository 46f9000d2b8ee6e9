#pragma once

#include <array>
#include <string>
#include <string_view>

#include "fwsim/math.hpp"
#include "fwsim/seedtree.hpp"

namespace fwsim {

/// Value held at `v_ini` until `t_ini`, varying linearly to `v_end` at
/// `t_end`, and held afterwards.
struct Ramp {
  double t_ini = 0.0;
  double t_end = 0.0;
  double v_ini = 0.0;
  double v_end = 0.0;

  static Ramp constant(double v) { return {0.0, 0.0, v, v}; }
  double operator()(double t) const {
    if (t <= t_ini) return v_ini;
    if (t >= t_end) return v_end;
    return v_ini + (v_end - v_ini) * (t - t_ini) / (t_end - t_ini);
  }
};

/// Temperature and pressure offsets versus time.
struct WeatherProfile {
  Ramp dT;  ///< [K]
  Ramp dp;  ///< [Pa]
};

/// Horizontal low-frequency wind. The bearing is the direction the air moves
/// toward, measured from north; speed and bearing ramp independently.
struct WindProfile {
  Ramp speed;    ///< [m/s], may be negative
  Ramp bearing;  ///< [rad]
};

/// Low-frequency wind in NED at time t [m/s]; the vertical component is zero.
Vec3 wind_lowfreq(double t, const WindProfile& profile);

enum class TurbulenceSeverity { Off, Light, Moderate, Severe };
TurbulenceSeverity parse_turbulence_severity(std::string_view s);
std::string_view to_string(TurbulenceSeverity s);

/// Intensities [m/s] and scale lengths [m] for the three Dryden channels.
struct DrydenParameters {
  Vec3 sigma = Vec3::Zero();  ///< u, v, w
  Vec3 length = Vec3::Ones();
};

/// Low-altitude (below 1000 ft) and medium/high-altitude (above 2000 ft)
/// military specification forms, blended linearly in between.
/// `h_agl` is the height above ground [m].
DrydenParameters dryden_parameters(double h_agl, TurbulenceSeverity severity);

/// Dryden turbulence realised as discretized shaping filters: a first-order
/// longitudinal channel and second-order lateral and vertical channels.
/// Every step consumes five standard normal draws regardless of intensity.
class DrydenTurbulence {
 public:
  static constexpr int kDrawsPerStep = 5;

  explicit DrydenTurbulence(TurbulenceSeverity severity = TurbulenceSeverity::Light)
      : severity_(severity) {}

  /// Draws the filter states from their stationary distribution.
  void initialize(double airspeed, double h_agl, Sampler& turb);
  void step(double dt, double airspeed, double h_agl, Sampler& turb);

  /// Turbulent velocity in body axes [m/s].
  const Vec3& velocity_body() const { return velocity_; }
  const DrydenParameters& parameters() const { return params_; }
  TurbulenceSeverity severity() const { return severity_; }

 private:
  void update_output();

  TurbulenceSeverity severity_;
  DrydenParameters params_{};
  double airspeed_ = 1.0;
  double x_u_ = 0.0;
  std::array<double, 2> x_v_{};
  std::array<double, 2> x_w_{};
  Vec3 velocity_ = Vec3::Zero();
};

}  // namespace fwsim
