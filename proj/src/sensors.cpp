#include "fwsim/sensors.hpp"

#include <cmath>

#include "fwsim/error.hpp"

namespace fwsim {

namespace {

constexpr double kSensorDt = 0.01;

SensorSpecs make_default_specs() {
  SensorSpecs s;
  s.acc = {1e-3, 5e-4, 0.02, 1e-4, 0.059};
  s.gyr = {1e-3, 5e-4, 5e-4, 5e-6, 8.7e-4};
  s.mag = {1e-3, 5e-4, 300.0, 1e-2, 50.0};
  s.osp = {100.0, 5.0};
  s.oat = {0.5, 0.1};
  s.tas = {0.3, 0.2};
  s.aoa = {0.5 * kDeg2Rad, 0.2 * kDeg2Rad};
  s.aos = {0.5 * kDeg2Rad, 0.2 * kDeg2Rad};
  s.gnss = {2.5, 5.0, 1.5, 3.0, 0.02, 0.05, 0.1, 100.0};
  s.plat.lever_arm = {0.05, 0.0, 0.02};
  s.plat.misalignment_std = 0.05 * kDeg2Rad;
  s.plat.misalignment_knowledge_std = 0.01 * kDeg2Rad;
  s.plat.lever_arm_knowledge_std = 0.002;
  s.cam.position = {0.2, 0.0, 0.1};
  s.cam.mount_std = 0.5 * kDeg2Rad;
  s.cam.mount_knowledge_std = 0.05 * kDeg2Rad;
  s.align.attitude_std = Vec3(0.05, 0.05, 0.5) * kDeg2Rad;
  s.align.position_hor_std = 2.5;
  s.align.position_ver_std = 5.0;
  s.align.velocity_std = 0.05;
  s.align.acc_bias_std = 0.002;
  s.align.gyr_bias_std = 5e-5;
  s.align.hard_iron_std = 30.0;
  return s;
}

void read(const KeyValueFile& f, const std::string& key, double& v) { v = f.get_double(key, v); }

void read_angle(const KeyValueFile& f, const std::string& key, double& rad) {
  double deg = rad * kRad2Deg;
  read(f, key, deg);
  rad = deg * kDeg2Rad;
}

void read_vec(const KeyValueFile& f, const std::string& key, Vec3& v, double unit = 1.0) {
  if (!f.has(key)) return;
  const auto vals = f.get_doubles(key, 3);
  v = Vec3(vals[0], vals[1], vals[2]) * unit;
}

void read_inertial(const KeyValueFile& f, const std::string& p, InertialSpec& s) {
  read(f, p + ".scale_std", s.scale_std);
  read(f, p + ".cross_std", s.cross_std);
  read(f, p + ".bias_std", s.bias_std);
  read(f, p + ".drift_density", s.drift_density);
  read(f, p + ".noise_std", s.noise_std);
}

void read_channel(const KeyValueFile& f, const std::string& p, AirDataChannelSpec& s,
                  bool angle = false) {
  if (angle) {
    read_angle(f, p + ".bias_std_deg", s.bias_std);
    read_angle(f, p + ".noise_std_deg", s.noise_std);
  } else {
    read(f, p + ".bias_std", s.bias_std);
    read(f, p + ".noise_std", s.noise_std);
  }
}

Vec3 normal3(Sampler& s, double std) {
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = s.normal(0.0, std);
  return v;
}

Vec3 normal3(Sampler& s, const Vec3& std) {
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = s.normal(0.0, std[i]);
  return v;
}

// I + diag(scale) + off-diagonal cross coupling; draws scale (3) then the six
// off-diagonal terms row by row.
Mat3 draw_scale_cross(Sampler& s, double scale_std, double cross_std) {
  Mat3 m = Mat3::Identity();
  for (int i = 0; i < 3; ++i) m(i, i) += s.normal(0.0, scale_std);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) m(i, j) = s.normal(0.0, cross_std);
  return m;
}

}  // namespace

SensorSpecs SensorSpecs::ideal() {
  SensorSpecs s;
  s.plat.lever_arm = default_sensor_specs().plat.lever_arm;
  s.cam.position = default_sensor_specs().cam.position;
  return s;
}

const SensorSpecs& default_sensor_specs() {
  static const SensorSpecs s = make_default_specs();
  return s;
}

SensorSpecs load_sensor_specs(const KeyValueFile& f) {
  SensorSpecs s = default_sensor_specs();
  read_inertial(f, "acc", s.acc);
  read_inertial(f, "gyr", s.gyr);
  read(f, "mag.scale_std", s.mag.scale_std);
  read(f, "mag.cross_std", s.mag.cross_std);
  read(f, "mag.hard_iron_std", s.mag.hard_iron_std);
  read(f, "mag.soft_iron_std", s.mag.soft_iron_std);
  read(f, "mag.noise_std", s.mag.noise_std);
  read_channel(f, "osp", s.osp);
  read_channel(f, "oat", s.oat);
  read_channel(f, "tas", s.tas);
  read_channel(f, "aoa", s.aoa, true);
  read_channel(f, "aos", s.aos, true);
  read(f, "gnss.noise_hor", s.gnss.noise_hor);
  read(f, "gnss.noise_ver", s.gnss.noise_ver);
  read(f, "gnss.iono_bias_hor", s.gnss.iono_bias_hor);
  read(f, "gnss.iono_bias_ver", s.gnss.iono_bias_ver);
  read(f, "gnss.iono_walk", s.gnss.iono_walk);
  read(f, "gnss.vel_noise_hor", s.gnss.vel_noise_hor);
  read(f, "gnss.vel_noise_ver", s.gnss.vel_noise_ver);
  read(f, "gnss.denial_time", s.gnss.denial_time);
  read_vec(f, "plat.lever_arm", s.plat.lever_arm);
  read_angle(f, "plat.misalignment_std_deg", s.plat.misalignment_std);
  read_angle(f, "plat.misalignment_knowledge_std_deg", s.plat.misalignment_knowledge_std);
  read(f, "plat.lever_arm_knowledge_std", s.plat.lever_arm_knowledge_std);
  read_vec(f, "cam.position", s.cam.position);
  read_angle(f, "cam.mount_pitch_deg", s.cam.mount_pitch);
  read_angle(f, "cam.mount_std_deg", s.cam.mount_std);
  read_angle(f, "cam.mount_knowledge_std_deg", s.cam.mount_knowledge_std);
  read(f, "cam.focal_length_px", s.cam.focal_length_px);
  read(f, "cam.principal_x_px", s.cam.principal_x_px);
  read(f, "cam.principal_y_px", s.cam.principal_y_px);
  s.cam.width_px = static_cast<int>(f.get_int("cam.width_px", s.cam.width_px));
  s.cam.height_px = static_cast<int>(f.get_int("cam.height_px", s.cam.height_px));
  read_vec(f, "align.attitude_std_deg", s.align.attitude_std, kDeg2Rad);
  read(f, "align.position_hor_std", s.align.position_hor_std);
  read(f, "align.position_ver_std", s.align.position_ver_std);
  read(f, "align.velocity_std", s.align.velocity_std);
  read(f, "align.acc_bias_std", s.align.acc_bias_std);
  read(f, "align.gyr_bias_std", s.align.gyr_bias_std);
  read(f, "align.hard_iron_std", s.align.hard_iron_std);
  f.reject_unused();
  return s;
}

SensorSpecs load_sensor_specs(const std::filesystem::path& path) {
  return load_sensor_specs(KeyValueFile::load(path));
}

SensorSuite::SensorSuite(const SensorSpecs& specs, const TrajectorySeedSet& seeds)
    : specs_(specs),
      acc_s_(seeds[SeedId::ACC]),
      gyr_s_(seeds[SeedId::GYR]),
      mag_s_(seeds[SeedId::MAG]),
      osp_s_(seeds[SeedId::OSP]),
      oat_s_(seeds[SeedId::OAT]),
      tas_s_(seeds[SeedId::TAS]),
      aoa_s_(seeds[SeedId::AOA]),
      aos_s_(seeds[SeedId::AOS]),
      gnss_s_(seeds[SeedId::GNSS]) {
  acc_.scale_cross = draw_scale_cross(acc_s_, specs.acc.scale_std, specs.acc.cross_std);
  acc_.bias = normal3(acc_s_, specs.acc.bias_std);
  gyr_.scale_cross = draw_scale_cross(gyr_s_, specs.gyr.scale_std, specs.gyr.cross_std);
  gyr_.bias = normal3(gyr_s_, specs.gyr.bias_std);

  mag_.scale_cross = draw_scale_cross(mag_s_, specs.mag.scale_std, specs.mag.cross_std);
  mag_.hard_iron = normal3(mag_s_, specs.mag.hard_iron_std);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      mag_.soft_iron(i, j) = (i == j ? 1.0 : 0.0) + mag_s_.normal(0.0, specs.mag.soft_iron_std);

  air_bias_ = {osp_s_.normal(0.0, specs.osp.bias_std), oat_s_.normal(0.0, specs.oat.bias_std),
               tas_s_.normal(0.0, specs.tas.bias_std), aoa_s_.normal(0.0, specs.aoa.bias_std),
               aos_s_.normal(0.0, specs.aos.bias_std)};

  const Vec3 g_std(specs.gnss.iono_bias_hor, specs.gnss.iono_bias_hor, specs.gnss.iono_bias_ver);
  gnss_.iono_bias = normal3(gnss_s_, g_std);

  Sampler plat(seeds[SeedId::PLAT]);
  const Vec3 mis = normal3(plat, specs.plat.misalignment_std);
  const Vec3 mis_err = normal3(plat, specs.plat.misalignment_knowledge_std);
  const Vec3 lever_err = normal3(plat, specs.plat.lever_arm_knowledge_std);
  plat_.imu_mount = quat_exp(mis);
  plat_.imu_mount_estimate = quat_exp(mis + mis_err);
  plat_.lever_arm_estimate = specs.plat.lever_arm + lever_err;

  Sampler cam(seeds[SeedId::CAM]);
  const Vec3 mount_err = normal3(cam, specs.cam.mount_std);
  const Vec3 know_err = normal3(cam, specs.cam.mount_knowledge_std);
  const Quat nominal(Eigen::AngleAxisd(specs.cam.mount_pitch, Vec3::UnitY()));
  cam_.mount = nominal * quat_exp(mount_err);
  cam_.mount_estimate = cam_.mount * quat_exp(know_err);
}

void SensorSuite::sense_imu(const Vec3& f_imu_b, const Vec3& w_ib_b, Vec3& f_out, Vec3& w_out) {
  const double sq = std::sqrt(kSensorDt);
  const Quat to_imu = plat_.imu_mount.conjugate();

  acc_.drift += normal3(acc_s_, specs_.acc.drift_density * sq);
  const Vec3 acc_noise = normal3(acc_s_, specs_.acc.noise_std);
  f_out = acc_.scale_cross * (to_imu * f_imu_b) + acc_.bias + acc_.drift + acc_noise;

  gyr_.drift += normal3(gyr_s_, specs_.gyr.drift_density * sq);
  const Vec3 gyr_noise = normal3(gyr_s_, specs_.gyr.noise_std);
  w_out = gyr_.scale_cross * (to_imu * w_ib_b) + gyr_.bias + gyr_.drift + gyr_noise;
}

Vec3 SensorSuite::sense_magnetometer(const Vec3& b_b) {
  const Vec3 noise = normal3(mag_s_, specs_.mag.noise_std);
  return mag_.scale_cross * (mag_.soft_iron * b_b) + mag_.hard_iron + noise;
}

SensorSuite::AirData SensorSuite::sense_airdata(double p, double T, double vtas, double alpha,
                                                double beta) {
  return {p + air_bias_[0] + osp_s_.normal(0.0, specs_.osp.noise_std),
          T + air_bias_[1] + oat_s_.normal(0.0, specs_.oat.noise_std),
          vtas + air_bias_[2] + tas_s_.normal(0.0, specs_.tas.noise_std),
          alpha + air_bias_[3] + aoa_s_.normal(0.0, specs_.aoa.noise_std),
          beta + air_bias_[4] + aos_s_.normal(0.0, specs_.aos.noise_std)};
}

std::optional<SensorSuite::GnssFix> SensorSuite::sense_gnss(double t, const GeodeticPosition& pos,
                                                            const Vec3& v_n) {
  if (t >= specs_.gnss.denial_time) return std::nullopt;
  const double dt = gnss_started_ ? t - last_gnss_t_ : 0.0;
  gnss_started_ = true;
  last_gnss_t_ = t;
  const auto& g = specs_.gnss;
  gnss_.iono_walk += normal3(gnss_s_, g.iono_walk * std::sqrt(std::max(dt, 0.0)));
  const Vec3 pos_noise = normal3(gnss_s_, Vec3(g.noise_hor, g.noise_hor, g.noise_ver));
  const Vec3 vel_noise = normal3(gnss_s_, Vec3(g.vel_noise_hor, g.vel_noise_hor, g.vel_noise_ver));
  GnssFix fix;
  fix.pos = offset_ned(pos, gnss_.iono_bias + gnss_.iono_walk + pos_noise);
  fix.v_n = v_n + vel_noise;
  return fix;
}

Vec3 specific_force_at(const Vec3& f_cg, const Vec3& w_ib, const Vec3& w_dot, const Vec3& r) {
  return f_cg + w_dot.cross(r) + w_ib.cross(w_ib.cross(r));
}

SensedRecord sense_all(SensorSuite& suite, const SensorTruth& truth, bool gnss_epoch,
                       std::optional<long long> camera_frame) {
  SensedRecord rec;
  rec.t = truth.t;
  const auto& ev = truth.ev;
  const auto& x = truth.x;
  const Vec3 r = suite.specs().plat.lever_arm - ev.mass.cg;
  const Vec3 f_imu = specific_force_at(ev.specific_force_b, x.w_ib_b, ev.deriv.w_dot, r);
  suite.sense_imu(f_imu, x.w_ib_b, rec.f_ib_b, rec.w_ib_b);
  rec.b_b = suite.sense_magnetometer(x.q_nb.conjugate() * truth.b_n);
  const auto ad = suite.sense_airdata(ev.atm.p, ev.atm.T, ev.airspeed, ev.alpha, ev.beta);
  rec.p = ad.p;
  rec.T = ad.T;
  rec.vtas = ad.vtas;
  rec.alpha = ad.alpha;
  rec.beta = ad.beta;
  if (gnss_epoch) rec.gnss = suite.sense_gnss(truth.t, x.pos, x.q_nb * x.v_b);
  rec.camera_frame = camera_frame;
  return rec;
}

CameraPose camera_pose(double t, const TruthState& x, const CameraSpec& spec,
                       const CameraErrors& err) {
  CameraPose pose;
  pose.t = t;
  pose.pos = offset_ned(x.pos, x.q_nb * spec.position);
  pose.attitude = euler_from_quat(x.q_nb * err.mount);
  return pose;
}

InitialEstimate fine_alignment(const TruthState& x0, const SensorSuite& suite,
                               const AlignmentSpec& spec, Sampler& align) {
  InitialEstimate est;
  const Vec3 att = normal3(align, spec.attitude_std);
  const Vec3 dpos = normal3(align, Vec3(spec.position_hor_std, spec.position_hor_std,
                                        spec.position_ver_std));
  const Vec3 dvel = normal3(align, spec.velocity_std);
  est.q_nb = (x0.q_nb * quat_exp(att)).normalized();
  est.pos = offset_ned(x0.pos, dpos);
  est.v_n = x0.q_nb * x0.v_b + dvel;
  est.acc_bias = suite.acc().bias + normal3(align, spec.acc_bias_std);
  est.gyr_bias = suite.gyr().bias + normal3(align, spec.gyr_bias_std);
  est.hard_iron = suite.mag().hard_iron + normal3(align, spec.hard_iron_std);
  est.attitude_error = att;
  est.position_error_ned = dpos;
  est.velocity_error_ned = dvel;
  return est;
}

}  // namespace fwsim
