#include "fwsim/wind.hpp"

#include <cmath>

#include "fwsim/error.hpp"

namespace fwsim {

Vec3 wind_lowfreq(double t, const WindProfile& profile) {
  const double v = profile.speed(t);
  const double chi = profile.bearing(t);
  return {v * std::cos(chi), v * std::sin(chi), 0.0};
}

TurbulenceSeverity parse_turbulence_severity(std::string_view s) {
  if (s == "off") return TurbulenceSeverity::Off;
  if (s == "light") return TurbulenceSeverity::Light;
  if (s == "moderate") return TurbulenceSeverity::Moderate;
  if (s == "severe") return TurbulenceSeverity::Severe;
  throw ConfigError("unknown turbulence severity '" + std::string(s) + "'");
}

std::string_view to_string(TurbulenceSeverity s) {
  switch (s) {
    case TurbulenceSeverity::Off: return "off";
    case TurbulenceSeverity::Light: return "light";
    case TurbulenceSeverity::Moderate: return "moderate";
    case TurbulenceSeverity::Severe: return "severe";
  }
  return "?";
}

namespace {

constexpr double kFt = 0.3048;
constexpr double kKnot = 1852.0 / 3600.0;

double wind_20ft(TurbulenceSeverity s) {
  switch (s) {
    case TurbulenceSeverity::Light: return 15.0 * kKnot;
    case TurbulenceSeverity::Moderate: return 30.0 * kKnot;
    case TurbulenceSeverity::Severe: return 45.0 * kKnot;
    default: return 0.0;
  }
}

double sigma_medium(TurbulenceSeverity s) {
  switch (s) {
    case TurbulenceSeverity::Light: return 1.5;
    case TurbulenceSeverity::Moderate: return 3.0;
    case TurbulenceSeverity::Severe: return 4.5;
    default: return 0.0;
  }
}

DrydenParameters low_altitude(double h_ft, TurbulenceSeverity s) {
  const double d = 0.177 + 0.000823 * h_ft;
  DrydenParameters p;
  const double sw = 0.1 * wind_20ft(s);
  const double su = sw / std::pow(d, 0.4);
  const double lu = h_ft / std::pow(d, 1.2) * kFt;
  p.sigma = {su, su, sw};
  p.length = {lu, lu, h_ft * kFt};
  return p;
}

DrydenParameters medium_altitude(TurbulenceSeverity s) {
  DrydenParameters p;
  p.sigma = Vec3::Constant(sigma_medium(s));
  p.length = Vec3::Constant(1750.0 * kFt);
  return p;
}

}  // namespace

DrydenParameters dryden_parameters(double h_agl, TurbulenceSeverity severity) {
  const double h_ft = std::max(h_agl / kFt, 10.0);
  if (h_ft <= 1000.0) return low_altitude(h_ft, severity);
  if (h_ft >= 2000.0) return medium_altitude(severity);
  const auto lo = low_altitude(1000.0, severity);
  const auto hi = medium_altitude(severity);
  const double w = (h_ft - 1000.0) / 1000.0;
  return {lo.sigma + w * (hi.sigma - lo.sigma), lo.length + w * (hi.length - lo.length)};
}

namespace {

// Critically damped second-order channel with pole a = 1 / tau driven by
// unit-intensity white noise. Stationary covariance is diag(tau^3/4, tau/4).
struct SecondOrder {
  double phi[2][2];
  double chol[3];  // lower Cholesky factor of the discrete noise covariance
};

SecondOrder second_order(double tau, double dt) {
  const double a = 1.0 / tau;
  const double e = std::exp(-a * dt);
  SecondOrder s;
  s.phi[0][0] = e * (1.0 + a * dt);
  s.phi[0][1] = e * dt;
  s.phi[1][0] = -e * a * a * dt;
  s.phi[1][1] = e * (1.0 - a * dt);
  const double p11 = tau * tau * tau / 4.0, p22 = tau / 4.0;
  // Q = P - Phi P Phi^T
  const double q11 = p11 - (s.phi[0][0] * s.phi[0][0] * p11 + s.phi[0][1] * s.phi[0][1] * p22);
  const double q12 = -(s.phi[0][0] * s.phi[1][0] * p11 + s.phi[0][1] * s.phi[1][1] * p22);
  const double q22 = p22 - (s.phi[1][0] * s.phi[1][0] * p11 + s.phi[1][1] * s.phi[1][1] * p22);
  const double l11 = std::sqrt(std::max(q11, 0.0));
  const double l21 = l11 > 0.0 ? q12 / l11 : 0.0;
  s.chol[0] = l11;
  s.chol[1] = l21;
  s.chol[2] = std::sqrt(std::max(q22 - l21 * l21, 0.0));
  return s;
}

void advance(std::array<double, 2>& x, const SecondOrder& s, double n1, double n2) {
  const double x0 = s.phi[0][0] * x[0] + s.phi[0][1] * x[1] + s.chol[0] * n1;
  const double x1 = s.phi[1][0] * x[0] + s.phi[1][1] * x[1] + s.chol[1] * n1 + s.chol[2] * n2;
  x = {x0, x1};
}

double output(const std::array<double, 2>& x, double sigma, double tau) {
  const double a = 1.0 / tau;
  return sigma * std::sqrt(tau) * (a * a * x[0] + std::sqrt(3.0) * a * x[1]);
}

}  // namespace

void DrydenTurbulence::initialize(double airspeed, double h_agl, Sampler& turb) {
  airspeed_ = std::max(airspeed, 1.0);
  params_ = dryden_parameters(h_agl, severity_);
  const double tv = params_.length.y() / airspeed_, tw = params_.length.z() / airspeed_;
  x_u_ = turb.standard_normal();
  x_v_ = {std::sqrt(tv * tv * tv / 4.0) * turb.standard_normal(),
          std::sqrt(tv / 4.0) * turb.standard_normal()};
  x_w_ = {std::sqrt(tw * tw * tw / 4.0) * turb.standard_normal(),
          std::sqrt(tw / 4.0) * turb.standard_normal()};
  update_output();
}

void DrydenTurbulence::step(double dt, double airspeed, double h_agl, Sampler& turb) {
  double n[kDrawsPerStep];
  for (double& v : n) v = turb.standard_normal();
  airspeed_ = std::max(airspeed, 1.0);
  params_ = dryden_parameters(h_agl, severity_);

  const double phi_u = std::exp(-airspeed_ * dt / params_.length.x());
  x_u_ = phi_u * x_u_ + std::sqrt(1.0 - phi_u * phi_u) * n[0];
  advance(x_v_, second_order(params_.length.y() / airspeed_, dt), n[1], n[2]);
  advance(x_w_, second_order(params_.length.z() / airspeed_, dt), n[3], n[4]);
  update_output();
}

void DrydenTurbulence::update_output() {
  velocity_ = {params_.sigma.x() * x_u_,
               output(x_v_, params_.sigma.y(), params_.length.y() / airspeed_),
               output(x_w_, params_.sigma.z(), params_.length.z() / airspeed_)};
}

}  // namespace fwsim
