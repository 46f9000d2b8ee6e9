#pragma once

// Sensor error models and the sensed trajectory: IMU, magnetometer, air data,
// GNSS, the camera pose stream, and the fine-alignment initial estimate.
// Each error source draws only from its own module seed.

#include <filesystem>
#include <optional>

#include "fwsim/config.hpp"
#include "fwsim/flight.hpp"
#include "fwsim/seedtree.hpp"

namespace fwsim {

struct InertialSpec {
  double scale_std = 0.0;     ///< scale factor [-]
  double cross_std = 0.0;     ///< cross coupling [-]
  double bias_std = 0.0;      ///< run-to-run bias offset
  double drift_density = 0.0; ///< bias random walk [unit / sqrt(s)]
  double noise_std = 0.0;     ///< white noise per 100 Hz sample
};

struct MagnetometerSpec {
  double scale_std = 0.0;
  double cross_std = 0.0;
  double hard_iron_std = 0.0;  ///< [nT]
  double soft_iron_std = 0.0;  ///< per matrix entry [-]
  double noise_std = 0.0;      ///< [nT]
};

struct AirDataChannelSpec {
  double bias_std = 0.0;
  double noise_std = 0.0;
};

struct GnssSpec {
  double noise_hor = 0.0;       ///< position white noise [m]
  double noise_ver = 0.0;
  double iono_bias_hor = 0.0;   ///< ionospheric bias offset [m]
  double iono_bias_ver = 0.0;
  double iono_walk = 0.0;       ///< ionospheric random walk [m / sqrt(s)]
  double vel_noise_hor = 0.0;   ///< [m/s]
  double vel_noise_ver = 0.0;
  double denial_time = 100.0;   ///< [s]
};

struct PlatformSpec {
  Vec3 lever_arm = Vec3::Zero();       ///< IMU position relative to the cg, body axes [m]
  double misalignment_std = 0.0;       ///< IMU mounting attitude error [rad]
  double misalignment_knowledge_std = 0.0;
  double lever_arm_knowledge_std = 0.0;  ///< [m]
};

struct CameraSpec {
  Vec3 position = Vec3::Zero();        ///< body axes [m]
  double mount_pitch = -kPi / 2.0;     ///< nominal mount, looking down [rad]
  double mount_std = 0.0;              ///< mounting attitude error [rad]
  double mount_knowledge_std = 0.0;
  double focal_length_px = 800.0;
  double principal_x_px = 640.0;
  double principal_y_px = 480.0;
  int width_px = 1280;
  int height_px = 960;
};

struct AlignmentSpec {
  Vec3 attitude_std = Vec3::Zero();    ///< roll, pitch, yaw [rad]
  double position_hor_std = 0.0;       ///< [m]
  double position_ver_std = 0.0;
  double velocity_std = 0.0;           ///< [m/s]
  double acc_bias_std = 0.0;           ///< residual after alignment
  double gyr_bias_std = 0.0;
  double hard_iron_std = 0.0;
};

struct SensorSpecs {
  InertialSpec acc;
  InertialSpec gyr;
  MagnetometerSpec mag;
  AirDataChannelSpec osp;  ///< static pressure [Pa]
  AirDataChannelSpec oat;  ///< outside air temperature [K]
  AirDataChannelSpec tas;  ///< [m/s]
  AirDataChannelSpec aoa;  ///< [rad]
  AirDataChannelSpec aos;  ///< [rad]
  GnssSpec gnss;
  PlatformSpec plat;
  CameraSpec cam;
  AlignmentSpec align;

  /// Every error source set to zero (sensed values equal truth).
  static SensorSpecs ideal();
};

/// Repository default: MEMS-grade IMU and consumer GNSS.
const SensorSpecs& default_sensor_specs();
SensorSpecs load_sensor_specs(const KeyValueFile& file);
SensorSpecs load_sensor_specs(const std::filesystem::path& path);

struct InertialErrors {
  Mat3 scale_cross = Mat3::Identity();  ///< I + diag(scale) + cross terms
  Vec3 bias = Vec3::Zero();
  Vec3 drift = Vec3::Zero();            ///< random-walk state
};

struct MagnetometerErrors {
  Mat3 scale_cross = Mat3::Identity();
  Vec3 hard_iron = Vec3::Zero();
  Mat3 soft_iron = Mat3::Identity();
};

struct GnssErrors {
  Vec3 iono_bias = Vec3::Zero();  ///< NED [m]
  Vec3 iono_walk = Vec3::Zero();
};

struct PlatformErrors {
  Quat imu_mount = Quat::Identity();           ///< body to IMU axes rotation
  Quat imu_mount_estimate = Quat::Identity();
  Vec3 lever_arm_estimate = Vec3::Zero();
};

struct CameraErrors {
  Quat mount = Quat::Identity();            ///< body to camera: v_b = mount * v_c
  Quat mount_estimate = Quat::Identity();
};

/// Per-run sensor state: fixed error terms plus drifting states and the
/// samplers that feed their white noise.
class SensorSuite {
 public:
  SensorSuite(const SensorSpecs& specs, const TrajectorySeedSet& seeds);

  const SensorSpecs& specs() const { return specs_; }
  const InertialErrors& acc() const { return acc_; }
  const InertialErrors& gyr() const { return gyr_; }
  const MagnetometerErrors& mag() const { return mag_; }
  const GnssErrors& gnss() const { return gnss_; }
  const PlatformErrors& platform() const { return plat_; }
  const CameraErrors& camera() const { return cam_; }
  /// Bias offsets of p, T, vtas, alpha, beta.
  const std::array<double, 5>& air_bias() const { return air_bias_; }

  /// Accelerometer and gyro outputs at one 100 Hz epoch; advances the drift.
  void sense_imu(const Vec3& f_imu_true_b, const Vec3& w_ib_true_b, Vec3& f_out, Vec3& w_out);
  Vec3 sense_magnetometer(const Vec3& b_true_b);
  struct AirData {
    double p, T, vtas, alpha, beta;
  };
  AirData sense_airdata(double p, double T, double vtas, double alpha, double beta);
  struct GnssFix {
    GeodeticPosition pos;
    Vec3 v_n;
  };
  /// Returns nothing once t reaches the denial time.
  std::optional<GnssFix> sense_gnss(double t, const GeodeticPosition& pos, const Vec3& v_n);

 private:
  SensorSpecs specs_;
  Sampler acc_s_, gyr_s_, mag_s_, osp_s_, oat_s_, tas_s_, aoa_s_, aos_s_, gnss_s_;
  InertialErrors acc_, gyr_;
  MagnetometerErrors mag_;
  GnssErrors gnss_;
  PlatformErrors plat_;
  CameraErrors cam_;
  std::array<double, 5> air_bias_{};
  double last_gnss_t_ = 0.0;
  bool gnss_started_ = false;
};

/// Specific force at a point displaced by r from the cg (body axes).
Vec3 specific_force_at(const Vec3& f_cg, const Vec3& w_ib, const Vec3& w_dot, const Vec3& r);

/// Every sensor output at one 100 Hz sensing epoch.
struct SensedRecord {
  double t = 0.0;
  Vec3 f_ib_b = Vec3::Zero();  ///< [m/s^2]
  Vec3 w_ib_b = Vec3::Zero();  ///< [rad/s]
  Vec3 b_b = Vec3::Zero();     ///< [nT]
  double p = 0.0, T = 0.0, vtas = 0.0, alpha = 0.0, beta = 0.0;
  std::optional<SensorSuite::GnssFix> gnss;
  std::optional<long long> camera_frame;  ///< index into the camera pose stream
};

/// Truth-derived inputs to the sensors at one epoch.
struct SensorTruth {
  double t = 0.0;
  TruthState x;
  FlightEvaluation ev;
  Vec3 b_n = Vec3::Zero();  ///< truth magnetic field [nT]
};

SensedRecord sense_all(SensorSuite& suite, const SensorTruth& truth, bool gnss_epoch,
                       std::optional<long long> camera_frame);

struct CameraPose {
  double t = 0.0;
  GeodeticPosition pos;
  Euler attitude;  ///< NED to camera axes (yaw, pitch, roll)
};

/// Camera pose = body pose composed with the (misaligned) mount.
CameraPose camera_pose(double t, const TruthState& x, const CameraSpec& spec,
                       const CameraErrors& err);

/// Initial navigation estimate produced by the fine alignment.
struct InitialEstimate {
  GeodeticPosition pos;
  Vec3 v_n = Vec3::Zero();
  Quat q_nb = Quat::Identity();
  Vec3 acc_bias = Vec3::Zero();
  Vec3 gyr_bias = Vec3::Zero();
  Vec3 hard_iron = Vec3::Zero();
  // The drawn errors, as applied to the truth.
  Vec3 attitude_error = Vec3::Zero();      ///< body-frame rotation vector [rad]
  Vec3 position_error_ned = Vec3::Zero();  ///< [m]
  Vec3 velocity_error_ned = Vec3::Zero();  ///< [m/s]
};

/// Draws, in order, attitude (3), position (3), velocity (3), accelerometer
/// bias (3), gyro bias (3) and hard-iron (3) estimation errors.
InitialEstimate fine_alignment(const TruthState& x0, const SensorSuite& suite,
                               const AlignmentSpec& spec, Sampler& align);

}  // namespace fwsim
