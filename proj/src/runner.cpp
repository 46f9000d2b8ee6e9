#include "fwsim/runner.hpp"

#include <charconv>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fwsim/error.hpp"
#include "fwsim/guidance.hpp"

namespace fwsim {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

namespace {

fs::path resolve(const std::string& p, const fs::path& base) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void require_file(const fs::path& p, const char* what) {
  if (!p.empty() && !fs::is_regular_file(p))
    throw ConfigError(std::string(what) + " '" + p.string() + "' does not exist");
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  for (std::string w; ss >> w;) out.push_back(w);
  return out;
}

std::string model_text(const fs::path& p) {
  return p.empty() ? std::string("builtin") : KeyValueFile::load(p).canonical();
}

}  // namespace

RunConfig load_run_config(const KeyValueFile& f, const fs::path& base) {
  RunConfig c;
  c.master.value = f.get_u64("master_seed", 1);
  c.n_ex = static_cast<int>(f.get_int("n_ex", 100));
  if (c.n_ex < 1) throw ConfigError("n_ex must be at least 1");
  c.scenario = static_cast<int>(f.get_int("scenario", 1));
  if (c.scenario != 1 && c.scenario != 2) throw ConfigError("scenario must be 1 or 2");
  c.zone = f.get_string("zone", "DS");
  terrain_zone(c.zone);
  c.integrator = parse_integrator(f.get_string("integrator", "so3"));
  c.navigation = f.get_string("navigation", "ideal");
  if (!default_registry().contains(c.navigation))
    throw ConfigError("unknown navigation implementation '" + c.navigation + "'");
  c.turbulence = parse_turbulence_severity(f.get_string("turbulence", "light"));
  c.sensor_errors = f.get_bool("sensor_errors", true);
  c.geo_perturbation = f.get_bool("geo_perturbation", true);
  if (f.has("t_end")) {
    c.t_end = f.get_double("t_end");
    if (!(*c.t_end > 0.0)) throw ConfigError("t_end must be positive");
  }
  for (std::size_t i = 0; i < kModuleSeedCount; ++i) {
    const std::string key = "seed_override." + std::string(kSeedNames[i]);
    if (f.has(key)) c.seed_overrides[static_cast<SeedId>(i)] = f.get_u64(key, 0);
  }
  c.thresholds.bias_ratio = f.get_double("classify.bias_ratio", c.thresholds.bias_ratio);
  c.thresholds.drift_growth = f.get_double("classify.drift_growth", c.thresholds.drift_growth);

  c.airframe_file = resolve(f.get_string("airframe_file", ""), base);
  c.sensors_file = resolve(f.get_string("sensors_file", ""), base);
  c.control_file = resolve(f.get_string("control_file", ""), base);
  require_file(c.airframe_file, "airframe_file");
  require_file(c.sensors_file, "sensors_file");
  require_file(c.control_file, "control_file");

  c.output_dir = f.get_string("output_dir", "out");
  c.parallelism = static_cast<int>(f.get_int("parallelism", 1));
  if (c.parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (f.has("runs")) {
    for (const std::string& tok : split_words(f.get_string("runs"))) {
      int j = 0;
      const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), j);
      if (ec != std::errc{} || end != tok.data() + tok.size() || j < 1 || j > c.n_ex)
        throw ConfigError("runs: '" + tok + "' is not a run index in 1.." + std::to_string(c.n_ex));
      c.run_indices.push_back(j);
    }
  }
  c.write_traces = f.get_bool("write_traces", true);
  const std::string tt = f.get_string("truth_trace", "full");
  if (tt == "full") c.truth_trace = TruthTrace::Full;
  else if (tt == "none") c.truth_trace = TruthTrace::None;
  else throw ConfigError("truth_trace must be full or none");
  c.time_aggregate_stride = static_cast<int>(f.get_int("time_aggregate_stride", 100));
  if (c.time_aggregate_stride < 1) throw ConfigError("time_aggregate_stride must be positive");
  f.reject_unused();
  return c;
}

RunConfig load_run_config(const fs::path& path) { return load_run_config(path, {}); }

RunConfig load_run_config(const fs::path& path, const std::vector<std::string>& overrides) {
  KeyValueFile f = path.empty() ? KeyValueFile{} : KeyValueFile::load(path);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    f.set(trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
  }
  return load_run_config(f, path.empty() ? fs::path{} : path.parent_path());
}

std::string canonical_config(const RunConfig& c) {
  std::ostringstream os;
  os << "master_seed = " << c.master.value << '\n'
     << "scenario = " << c.scenario << '\n'
     << "zone = " << c.zone << '\n'
     << "integrator = " << to_string(c.integrator) << '\n'
     << "navigation = " << c.navigation << '\n'
     << "turbulence = " << to_string(c.turbulence) << '\n'
     << "sensor_errors = " << c.sensor_errors << '\n'
     << "geo_perturbation = " << c.geo_perturbation << '\n'
     << "t_end = " << (c.t_end ? format_double(*c.t_end) : "scenario") << '\n';
  for (const auto& [id, v] : c.seed_overrides)
    os << "seed_override." << kSeedNames[static_cast<std::size_t>(id)] << " = " << v << '\n';
  os << "classify.bias_ratio = " << format_double(c.thresholds.bias_ratio) << '\n'
     << "classify.drift_growth = " << format_double(c.thresholds.drift_growth) << '\n'
     << "[airframe]\n" << model_text(c.airframe_file) << "[sensors]\n"
     << model_text(c.sensors_file) << "[control]\n" << model_text(c.control_file);
  return os.str();
}

std::string config_hash(const RunConfig& c) { return hex64(fnv1a64(canonical_config(c))); }

RunModels load_models(const RunConfig& c) {
  RunModels m;
  m.airframe = c.airframe_file.empty() ? default_airframe() : load_airframe(c.airframe_file);
  const SensorSpecs loaded =
      c.sensors_file.empty() ? default_sensor_specs() : load_sensor_specs(c.sensors_file);
  if (c.sensor_errors) {
    m.sensors = loaded;
  } else {
    m.sensors = SensorSpecs::ideal();
    m.sensors.plat.lever_arm = loaded.plat.lever_arm;
    m.sensors.cam.position = loaded.cam.position;
    m.sensors.cam.mount_pitch = loaded.cam.mount_pitch;
  }
  m.gains = c.control_file.empty() ? default_autopilot_gains() : load_autopilot_gains(c.control_file);
  m.config_hash = config_hash(c);
  return m;
}

// ---------------------------------------------------------------------------
// Error variables

std::array<double, kErrorVariableCount> navigation_errors(const EstimatedState& e,
                                                          const EstimatedState& t) {
  const auto r = curvature_radii(t.pos.lat);
  const double dn = (e.pos.lat - t.pos.lat) * (r.meridian + t.pos.h);
  const double de = wrap_pi(e.pos.lon - t.pos.lon) * (r.prime_vertical + t.pos.h) *
                    std::cos(t.pos.lat);
  const Vec3 dv = e.v_n - t.v_n;
  return {dn,
          de,
          std::hypot(dn, de),
          e.pos.h - t.pos.h,
          dv.x(),
          dv.y(),
          dv.z(),
          wrap_pi(e.euler.yaw - t.euler.yaw),
          wrap_pi(e.euler.pitch - t.euler.pitch),
          wrap_pi(e.euler.roll - t.euler.roll),
          e.Hp - t.Hp,
          e.vtas - t.vtas};
}

// ---------------------------------------------------------------------------
// Single run

namespace {

const std::vector<std::string> kTruthColumns = {"t",    "lon",  "lat",  "h",    "v_bx",
                                                "v_by", "v_bz", "q_w",  "q_x",  "q_y",
                                                "q_z",  "w_x",  "w_y",  "w_z",  "mass"};
const std::vector<std::string> kNavColumns = {
    "t",   "lon",   "lat",  "h",     "v_n",   "v_e",  "v_d",  "yaw",   "pitch",     "roll",
    "w_x", "w_y",   "w_z",  "Hp",    "vtas",  "alpha", "beta", "gamma_tas", "course"};
const std::vector<std::string> kSensedColumns = {
    "t",  "f_x",  "f_y",  "f_z", "w_x",  "w_y",   "w_z",        "b_x",      "b_y",
    "b_z", "p",   "T",    "vtas", "alpha", "beta", "gnss_valid", "gnss_lon", "gnss_lat",
    "gnss_h", "gnss_v_n", "gnss_v_e", "gnss_v_d", "camera_frame"};
const std::vector<std::string> kControlColumns = {
    "t",         "segment",    "throttle", "elevator", "aileron", "rudder", "vtas_sp",
    "hp_sp",     "gamma_cmd",  "theta_cmd", "chi_sp",  "xi_cmd",  "beta_sp"};

std::array<double, 19> nav_row(const EstimatedState& s) {
  return {s.t,         s.pos.lon,   s.pos.lat,     s.pos.h,       s.v_n.x(),
          s.v_n.y(),   s.v_n.z(),   s.euler.yaw,   s.euler.pitch, s.euler.roll,
          s.w_nb_b.x(), s.w_nb_b.y(), s.w_nb_b.z(), s.Hp,         s.vtas,
          s.alpha,     s.beta,      s.gamma_tas,   s.course};
}

EstimatedState nav_from_row(const TraceTable& tt, std::size_t i) {
  auto c = [&](const char* n) { return tt.column(n)[i]; };
  EstimatedState s;
  s.t = c("t");
  s.pos = {c("lon"), c("lat"), c("h")};
  s.v_n = {c("v_n"), c("v_e"), c("v_d")};
  s.euler = {c("yaw"), c("pitch"), c("roll")};
  s.q_nb = quat_from_euler(s.euler);
  s.w_nb_b = {c("w_x"), c("w_y"), c("w_z")};
  s.Hp = c("Hp");
  s.vtas = c("vtas");
  s.alpha = c("alpha");
  s.beta = c("beta");
  s.gamma_tas = c("gamma_tas");
  s.course = c("course");
  return s;
}

class Digest {
 public:
  void add(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h_ = (h_ ^ bits) * 0x100000001b3ULL;
  }
  template <class It>
  void add(It first, It last) {
    for (; first != last; ++first) add(*first);
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string error_class(const Error& e) {
  if (dynamic_cast<const DivergenceError*>(&e)) return "divergence";
  if (dynamic_cast<const EnvelopeError*>(&e)) return "envelope";
  if (dynamic_cast<const SamplingError*>(&e)) return "sampling";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  return "error";
}

std::string vec_text(const Vec3& v) {
  return format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z());
}

std::string mat_text(const Mat3& m) {
  std::string s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += (s.empty() ? "" : " ") + format_double(m(i, j));
  return s;
}

std::string quat_text(const Quat& q) {
  return format_double(q.w()) + " " + format_double(q.x()) + " " + format_double(q.y()) + " " +
         format_double(q.z());
}

void write_scenario_file(const fs::path& path, const Provenance& prov,
                         const TrajectorySeedSet& seeds, const ScenarioInstance& sc,
                         const TerrainZone& zone) {
  TraceWriter w(path, "scenario", prov, {"name", "value"},
                {{"scenario", std::to_string(sc.id)}, {"zone", std::string(zone.code)}});
  for (std::size_t i = 0; i < kModuleSeedCount; ++i)
    w.line("seed." + std::string(kSeedNames[i]) + " " + std::to_string(seeds.module_seeds[i]));
  for (const auto& [k, v] : sc.parameters) w.line(k + " " + format_double(v));
  w.line("zone_lon_deg " + format_double(zone.lon_deg));
  w.line("zone_lat_deg " + format_double(zone.lat_deg));
  w.line("zone_ground_altitude " + format_double(zone.ground_altitude));
  w.line("zone_declination_deg " + format_double(zone.declination_deg));
  for (std::size_t i = 0; i < sc.plan.size(); ++i)
    w.line("target_" + std::to_string(i + 1) + " " + describe(sc.plan[i]));
}

void write_errors_file(const fs::path& path, const Provenance& prov, const SensorSuite& s,
                       const GeoPerturbation& geo, const InitialEstimate& init) {
  TraceWriter w(path, "errors", prov, {"name", "values"});
  w.line("acc.scale_cross " + mat_text(s.acc().scale_cross));
  w.line("acc.bias " + vec_text(s.acc().bias));
  w.line("gyr.scale_cross " + mat_text(s.gyr().scale_cross));
  w.line("gyr.bias " + vec_text(s.gyr().bias));
  w.line("mag.scale_cross " + mat_text(s.mag().scale_cross));
  w.line("mag.hard_iron " + vec_text(s.mag().hard_iron));
  w.line("mag.soft_iron " + mat_text(s.mag().soft_iron));
  const auto& ab = s.air_bias();
  w.line("air.bias " + format_double(ab[0]) + " " + format_double(ab[1]) + " " +
         format_double(ab[2]) + " " + format_double(ab[3]) + " " + format_double(ab[4]));
  w.line("gnss.iono_bias " + vec_text(s.gnss().iono_bias));
  w.line("plat.imu_mount " + quat_text(s.platform().imu_mount));
  w.line("plat.imu_mount_estimate " + quat_text(s.platform().imu_mount_estimate));
  w.line("plat.lever_arm_estimate " + vec_text(s.platform().lever_arm_estimate));
  w.line("cam.mount " + quat_text(s.camera().mount));
  w.line("cam.mount_estimate " + quat_text(s.camera().mount_estimate));
  w.line("geo.gravity_ned " + vec_text(geo.gravity_ned));
  w.line("geo.magnetic_ned " + vec_text(geo.magnetic_ned));
  w.line("align.pos_error_ned " + vec_text(init.position_error_ned));
  w.line("align.vel_error_ned " + vec_text(init.velocity_error_ned));
  w.line("align.attitude_error " + vec_text(init.attitude_error));
  w.line("align.acc_bias " + vec_text(init.acc_bias));
  w.line("align.gyr_bias " + vec_text(init.gyr_bias));
  w.line("align.hard_iron " + vec_text(init.hard_iron));
}

std::string camera_line(const CameraPose& p) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.3f %.9f %.9f %.3f %.6f %.6f %.6f", p.t, p.pos.lon * kRad2Deg,
                p.pos.lat * kRad2Deg, p.pos.h, p.attitude.yaw * kRad2Deg,
                p.attitude.pitch * kRad2Deg, p.attitude.roll * kRad2Deg);
  return buf;
}

double surface_distance(const GeodeticPosition& a, const GeodeticPosition& b) {
  return (geodetic_to_ecef({a.lon, a.lat, 0.0}) - geodetic_to_ecef({b.lon, b.lat, 0.0})).norm();
}

double horizontal_step(const GeodeticPosition& a, const GeodeticPosition& b) {
  const auto r = curvature_radii(a.lat);
  const double dn = (b.lat - a.lat) * (r.meridian + a.h);
  const double de = wrap_pi(b.lon - a.lon) * (r.prime_vertical + a.h) * std::cos(a.lat);
  return std::hypot(dn, de);
}

void update_signed_max(double& best, double v) {
  if (std::abs(v) > std::abs(best)) best = v;
}

}  // namespace

RunResult run_single(const RunConfig& cfg, int j, const RunOptions& opt) {
  return run_single(cfg, load_models(cfg), j, opt);
}

RunResult run_single(const RunConfig& cfg, const RunModels& models, int j, const RunOptions& opt) {
  if (j < 1) throw ConfigError("run index must be at least 1");
  const auto wall0 = std::chrono::steady_clock::now();
  RunResult res;
  res.run_index = j;
  res.seeds = derive_seed_table(cfg.master, j).back();
  for (const auto& [id, v] : cfg.seed_overrides) res.seeds[id] = v;
  const TrajectorySeedSet& seeds = res.seeds;
  const Provenance prov{cfg.master.value, j, models.config_hash};

  fs::path run_dir = opt.run_dir;
  if (run_dir.empty()) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%04d", j);
    run_dir = cfg.output_dir / name;
  }
  if (opt.write_traces) fs::create_directories(run_dir);

  std::array<std::vector<double>, kErrorVariableCount> series;
  double t = 0.0;
  try {
    const ScenarioInstance sc = materialize_scenario(cfg.scenario, seeds);
    const double t_end = cfg.t_end ? std::min(*cfg.t_end, sc.t_end) : sc.t_end;
    const TerrainZone& zone = terrain_zone(cfg.zone);
    const GeodeticPosition origin{zone.lon_deg * kDeg2Rad, zone.lat_deg * kDeg2Rad, 0.0};

    EarthModel onboard;
    onboard.magnetic = MagneticModel::anchored(origin, zone.declination_deg * kDeg2Rad);
    EarthModel truth_earth = onboard;
    Sampler geo_s(seeds[SeedId::GEO]);
    if (cfg.geo_perturbation) truth_earth.perturbation = apply_geo_perturbation(geo_s, {});

    FlightEnvironment env;
    env.airframe = &models.airframe;
    env.earth = &truth_earth;
    env.weather = sc.weather;
    env.wind = sc.wind;

    const double h0 = geodetic_from_geopotential(
        geopotential_from_pressure_altitude(sc.hp_ini, sc.weather.dT(0.0), sc.weather.dp(0.0)));
    TrimTarget tt;
    tt.airspeed = sc.vtas_ini;
    tt.h = h0;
    tt.lon = origin.lon;
    tt.lat = origin.lat;
    tt.heading = sc.chi_ini;
    tt.fuel = models.airframe.mass.fuel_capacity;
    const TrimResult tr = trim(tt, env);
    TruthState x = crab_into_wind(tr, sc.chi_ini, wind_lowfreq(0.0, sc.wind));

    DrydenTurbulence turb(cfg.turbulence);
    Sampler turb_s(seeds[SeedId::TURB]);
    turb.initialize(sc.vtas_ini, h0 - zone.ground_altitude, turb_s);

    SensorSpecs specs = models.sensors;
    specs.gnss.denial_time = sc.t_gnss;
    SensorSuite suite(specs, seeds);
    Sampler align_s(seeds[SeedId::ALIGN]);
    const InitialEstimate init = fine_alignment(x, suite, specs.align, align_s);

    auto nav = default_registry().create(cfg.navigation);
    NavContext ctx;
    ctx.initial = init;
    ctx.onboard_earth = &onboard;
    ctx.imu_mount_estimate = suite.platform().imu_mount_estimate;
    ctx.lever_arm_estimate = suite.platform().lever_arm_estimate;
    ctx.camera_mount_estimate = suite.camera().mount_estimate;
    nav->initialize(ctx);

    Guidance guidance(sc.plan, 0.0);
    Autopilot autopilot(models.gains, tr.controls, models.airframe.control_limit);
    ControlInputs u = tr.controls;

    std::unique_ptr<TraceWriter> w_truth, w_sensed, w_est, w_tnav, w_ctrl, w_cam;
    if (opt.write_traces) {
      write_scenario_file(run_dir / "scenario.txt", prov, seeds, sc, zone);
      write_errors_file(run_dir / "errors.txt", prov, suite, truth_earth.perturbation, init);
      if (opt.truth_trace == TruthTrace::Full)
        w_truth = std::make_unique<TraceWriter>(run_dir / "truth.txt", "truth", prov,
                                                kTruthColumns);
      w_sensed = std::make_unique<TraceWriter>(run_dir / "sensed.txt", "sensed", prov,
                                               kSensedColumns);
      w_est = std::make_unique<TraceWriter>(run_dir / "estimated.txt", "estimated", prov,
                                            kNavColumns,
                                            std::vector<std::pair<std::string, std::string>>{
                                                {"navigation", cfg.navigation}});
      w_tnav = std::make_unique<TraceWriter>(run_dir / "truth_nav.txt", "truth_nav", prov,
                                             kNavColumns);
      w_ctrl = std::make_unique<TraceWriter>(run_dir / "controls.txt", "controls", prov,
                                             kControlColumns);
      const auto& cam = specs.cam;
      w_cam = std::make_unique<TraceWriter>(
          run_dir / "camera.txt", "camera", prov,
          std::vector<std::string>{"t", "lon_deg", "lat_deg", "h", "yaw_deg", "pitch_deg",
                                   "roll_deg"},
          std::vector<std::pair<std::string, std::string>>{
              {"focal_length_px", format_double(cam.focal_length_px)},
              {"principal_point_px",
               format_double(cam.principal_x_px) + " " + format_double(cam.principal_y_px)},
              {"image_size_px", std::to_string(cam.width_px) + " " + std::to_string(cam.height_px)}});
    }

    const long long n_steps = std::llround(t_end / kTruthStep);
    const std::size_t n_est = static_cast<std::size_t>(n_steps / kSensingDivider) + 1;
    for (auto& s : series) s.reserve(n_est);

    const DerivativeFn deriv = [&](const TruthState& s, double ts) {
      return state_derivative(s, ts, u, env);
    };
    auto airspeed_of = [&](const TruthState& s, double ts) {
      return (s.v_b - s.q_nb.conjugate() * wind_lowfreq(ts, env.wind) - turb.velocity_body())
          .norm();
    };

    Digest digest;
    EstimatedState est;
    const GeodeticPosition start = x.pos;
    GeodeticPosition prev = x.pos;
    SegmentFte seg;
    auto open_segment = [&](double ts) {
      const GuidanceTarget& g = guidance.active();
      seg = SegmentFte{};
      seg.index = guidance.index();
      seg.t_start = ts;
      seg.description = describe(g);
      seg.vtas_target = g.throttle.value;
      seg.holds_hp = g.elevator.mode == ElevatorMode::PressureAltitude;
      seg.hp_target = seg.holds_hp ? g.elevator.value : 0.0;
    };
    open_segment(0.0);

    for (long long k = 0;; ++k) {
      t = static_cast<double>(k) * kTruthStep;
      const double truth_row[15] = {t,         x.pos.lon,  x.pos.lat,  x.pos.h,    x.v_b.x(),
                                    x.v_b.y(), x.v_b.z(),  x.q_nb.w(), x.q_nb.x(), x.q_nb.y(),
                                    x.q_nb.z(), x.w_ib_b.x(), x.w_ib_b.y(), x.w_ib_b.z(), x.mass};
      digest.add(std::begin(truth_row), std::end(truth_row));
      if (w_truth) w_truth->row(truth_row);
      ++res.truth_epochs;

      if (k % kSensingDivider == 0) {
        env.turbulence_b = turb.velocity_body();
        const FlightEvaluation ev = evaluate_flight(x, t, u, env);
        const SensorTruth st{t, x, ev, truth_earth.magnetic_ned(x.pos)};
        std::optional<long long> frame;
        if (k % kCameraDivider == 0) frame = k / kCameraDivider;
        const SensedRecord rec = sense_all(suite, st, k % kGnssDivider == 0, frame);
        if (rec.gnss) ++res.gnss_fixes;
        if (frame) {
          ++res.camera_frames;
          if (w_cam) w_cam->line(camera_line(camera_pose(t, x, specs.cam, suite.camera())));
        }
        const EstimatedState tv = truth_view(t, x, ev);
        if (nav->uses_truth()) nav->provide_truth(tv);
        est = nav->step(rec);
        const auto errs = navigation_errors(est, tv);
        for (std::size_t v = 0; v < kErrorVariableCount; ++v) series[v].push_back(errs[v]);
        const auto er = nav_row(est);
        digest.add(er.begin(), er.end());
        ++res.estimate_epochs;
        if (w_sensed) {
          const auto& g = rec.gnss;
          const double row[23] = {rec.t,
                                  rec.f_ib_b.x(), rec.f_ib_b.y(), rec.f_ib_b.z(),
                                  rec.w_ib_b.x(), rec.w_ib_b.y(), rec.w_ib_b.z(),
                                  rec.b_b.x(), rec.b_b.y(), rec.b_b.z(),
                                  rec.p, rec.T, rec.vtas, rec.alpha, rec.beta,
                                  g ? 1.0 : 0.0,
                                  g ? g->pos.lon : 0.0, g ? g->pos.lat : 0.0, g ? g->pos.h : 0.0,
                                  g ? g->v_n.x() : 0.0, g ? g->v_n.y() : 0.0, g ? g->v_n.z() : 0.0,
                                  frame ? static_cast<double>(*frame) : -1.0};
          w_sensed->row(row);
          w_est->row(er);
          w_tnav->row(nav_row(tv));
        }
        if (k > 0) res.ground_distance += horizontal_step(prev, x.pos);
        prev = x.pos;
        res.max_radial_distance = std::max(res.max_radial_distance, surface_distance(start, x.pos));
      }

      if (k % kControlDivider == 0) {
        const bool changed = guidance.step(est, t);
        if (k == 0) autopilot.initialize(guidance.active(), est);
        if (changed) {
          seg.t_end = t;
          res.segments.push_back(seg);
          open_segment(t);
        }
        u = autopilot.step(guidance.active(), est, kControlDivider * kTruthStep, changed);
        const auto& tel = autopilot.telemetry();
        const double row[13] = {t, static_cast<double>(guidance.index() + 1), u.throttle,
                                u.elevator, u.aileron, u.rudder, tel.vtas_sp, tel.hp_sp,
                                tel.gamma_cmd, tel.theta_cmd, tel.chi_sp, tel.xi_cmd,
                                tel.beta_sp};
        digest.add(std::begin(row), std::end(row));
        if (w_ctrl) w_ctrl->row(row);
        ++res.control_epochs;
      }

      if (k % kSensingDivider == 0 && t - seg.t_start >= kFteSettle) {
        ++seg.settled_samples;
        update_signed_max(seg.max_vtas_error, est.vtas - seg.vtas_target);
        if (seg.holds_hp) update_signed_max(seg.max_hp_error, est.Hp - seg.hp_target);
      }

      if (k == n_steps) break;
      env.turbulence_b = turb.velocity_body();
      x = rk4_step(cfg.integrator, x, t, kTruthStep, deriv);
      if (!is_finite(x)) throw DivergenceError("non-finite truth state");
      const double t_next = static_cast<double>(k + 1) * kTruthStep;
      turb.step(kTruthStep, airspeed_of(x, t_next), x.pos.h - zone.ground_altitude, turb_s);
    }
    seg.t_end = t;
    res.segments.push_back(seg);
    res.digest = digest.value();

    for (std::size_t v = 0; v < kErrorVariableCount; ++v) {
      res.variables[v].metrics = trajectory_metrics(series[v]);
      res.variables[v].final_value = series[v].back();
    }
    res.ok = true;

    if (opt.write_traces) {
      TraceWriter mw(run_dir / "metrics.txt", "metrics", prov,
                     {"variable", "mean", "std", "max", "final"},
                     {{"epochs", std::to_string(res.estimate_epochs)},
                      {"truth_epochs", std::to_string(res.truth_epochs)},
                      {"ground_distance", format_double(res.ground_distance)},
                      {"max_radial_distance", format_double(res.max_radial_distance)}});
      for (std::size_t v = 0; v < kErrorVariableCount; ++v) {
        const auto& r = res.variables[v];
        mw.line(std::string(kErrorVariables[v].name) + " " + format_double(r.metrics.mean) + " " +
                format_double(r.metrics.std) + " " + format_double(r.metrics.max) + " " +
                format_double(r.final_value));
      }
      TraceWriter sw(run_dir / "segments.txt", "segments", prov,
                     {"segment", "t_start", "t_end", "vtas_target", "max_vtas_error", "holds_hp",
                      "hp_target", "max_hp_error", "settled_samples"});
      for (const auto& s : res.segments)
        sw.row({static_cast<double>(s.index + 1), s.t_start, s.t_end, s.vtas_target,
                s.max_vtas_error, s.holds_hp ? 1.0 : 0.0, s.hp_target, s.max_hp_error,
                static_cast<double>(s.settled_samples)});
    }
  } catch (const Error& e) {
    res.ok = false;
    res.failure = error_class(e) + ": " + e.what();
    res.failure_time = t;
    if (opt.write_traces) {
      TraceWriter fw(run_dir / "failure.txt", "failure", prov, {"t", "reason"});
      fw.line(format_double(t) + " " + res.failure);
    }
  }
  if (opt.keep_series && res.ok) res.series = std::move(series);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return res;
}

// ---------------------------------------------------------------------------
// Monte Carlo

MonteCarloReport run_monte_carlo(const RunConfig& cfg, bool write_outputs) {
  const RunModels models = load_models(cfg);
  MonteCarloReport rep;
  rep.config = cfg;
  rep.config_hash = models.config_hash;

  std::vector<int> indices = cfg.run_indices;
  if (indices.empty())
    for (int j = 1; j <= cfg.n_ex; ++j) indices.push_back(j);
  const int n = static_cast<int>(indices.size());
  const int workers = std::clamp(cfg.parallelism, 1, n);
  struct Slot {
    std::optional<RunResult> result;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(n));
  std::mutex mu;
  std::condition_variable cv;
  int next = 0;
  bool abort = false;

  RunOptions opt;
  opt.write_traces = cfg.write_traces && write_outputs;
  opt.truth_trace = cfg.truth_trace;
  opt.keep_series = true;

  auto work = [&] {
    for (;;) {
      int slot;
      {
        std::lock_guard lk(mu);
        if (abort || next >= n) return;
        slot = next++;
      }
      Slot s;
      try {
        s.result = run_single(cfg, models, indices[static_cast<std::size_t>(slot)], opt);
      } catch (...) {
        s.error = std::current_exception();
      }
      std::lock_guard lk(mu);
      slots[static_cast<std::size_t>(slot)] = std::move(s);
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  for (int i = 0; i < workers; ++i) pool.emplace_back(work);

  std::array<TimeAggregator, kErrorVariableCount> time;
  std::array<std::vector<TrajectoryMetrics>, kErrorVariableCount> per_seed;
  std::array<std::vector<double>, kErrorVariableCount> finals;
  std::exception_ptr failure;
  for (int i = 0; i < n && !failure; ++i) {
    const int j = indices[static_cast<std::size_t>(i)];
    Slot s;
    {
      std::unique_lock lk(mu);
      cv.wait(lk, [&] {
        const auto& sl = slots[static_cast<std::size_t>(i)];
        return sl.result.has_value() || sl.error;
      });
      s = std::move(slots[static_cast<std::size_t>(i)]);
    }
    if (s.error) {
      failure = s.error;
      std::lock_guard lk(mu);
      abort = true;
      break;
    }
    RunResult r = std::move(*s.result);
    if (r.ok) {
      for (std::size_t v = 0; v < kErrorVariableCount; ++v) {
        time[v].add(r.series[v]);
        per_seed[v].push_back(r.variables[v].metrics);
        finals[v].push_back(r.variables[v].final_value);
        std::vector<double>().swap(r.series[v]);
      }
    } else {
      rep.failed.push_back(j);
    }
    rep.runs.push_back(std::move(r));
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  if (!per_seed[0].empty()) {
    for (std::size_t v = 0; v < kErrorVariableCount; ++v) {
      rep.time[v] = time[v].result();
      VariableReport vr;
      vr.name = kErrorVariables[v].name;
      vr.aggregated = aggregate(per_seed[v]);
      vr.final_state = aggregate_final_state(finals[v]);
      vr.classification = classify(vr.aggregated, vr.final_state, rep.time[v], cfg.thresholds);
      rep.variables.push_back(std::move(vr));
    }
  }
  if (write_outputs) write_report(rep, cfg.output_dir);
  return rep;
}

std::string format_report(const MonteCarloReport& rep) {
  std::ostringstream os;
  char buf[256];
  os << "master_seed " << rep.config.master.value << "  scenario " << rep.config.scenario
     << "  zone " << rep.config.zone << "  navigation " << rep.config.navigation
     << "  config_hash " << rep.config_hash << '\n';
  os << "runs " << rep.runs.size() << "  aggregated " << rep.runs.size() - rep.failed.size()
     << "  failed " << rep.failed.size() << "\n\n";
  if (rep.variables.empty()) {
    os << "no successful runs\n";
    return os.str();
  }
  std::snprintf(buf, sizeof buf, "%-10s %11s %11s %11s | %11s %11s %11s | %11s %11s %11s\n",
                "variable", "mu_mu", "sigma_mu", "max_mu", "mu_sigma", "sigma_sigma",
                "max_sigma", "mu_max", "sigma_max", "max_max");
  os << buf;
  for (const auto& v : rep.variables) {
    const auto& a = v.aggregated;
    std::snprintf(buf, sizeof buf,
                  "%-10s %11.4g %11.4g %11.4g | %11.4g %11.4g %11.4g | %11.4g %11.4g %11.4g\n",
                  v.name.c_str(), a.of_mean.mean, a.of_mean.std, a.of_mean.max, a.of_std.mean,
                  a.of_std.std, a.of_std.max, a.of_max.mean, a.of_max.std, a.of_max.max);
    os << buf;
  }
  os << '\n';
  std::snprintf(buf, sizeof buf, "%-10s %11s %11s %11s | %8s %9s %9s  %s\n", "variable",
                "mu_end", "sigma_end", "max_end", "growth", "r_std", "r_max", "verdict");
  os << buf;
  for (const auto& v : rep.variables) {
    const auto& f = v.final_state;
    const auto& c = v.classification;
    std::snprintf(buf, sizeof buf, "%-10s %11.4g %11.4g %11.4g | %8.3f %9.3g %9.3g  %s, %s\n",
                  v.name.c_str(), f.mean, f.std, f.max, c.drift_growth, c.ratio_to_std,
                  c.ratio_to_max, c.drift ? "drift" : "bounded", c.biased ? "biased" : "unbiased");
    os << buf;
  }
  os << "\nunits: metres, metres per second, radians. Thresholds: bias ratio "
     << format_double(rep.config.thresholds.bias_ratio) << ", envelope growth "
     << format_double(rep.config.thresholds.drift_growth) << '\n';
  return os.str();
}

void write_report(const MonteCarloReport& rep, const fs::path& dir) {
  fs::create_directories(dir);
  const Provenance prov{rep.config.master.value, 0, rep.config_hash};
  {
    std::ofstream os(dir / "seeds.txt");
    os << "# config_hash " << rep.config_hash << '\n';
    write_seed_table(os, rep.config.master, derive_seed_table(rep.config.master, rep.config.n_ex));
  }
  {
    std::vector<std::string> cols = {"run_index", "ok", "truth_epochs", "estimate_epochs",
                                     "ground_distance", "max_radial_distance"};
    for (const auto& v : kErrorVariables) cols.push_back(std::string("final_") + v.name);
    TraceWriter w(dir / "runs.txt", "runs", prov, cols);
    for (const auto& r : rep.runs) {
      std::vector<double> row = {static_cast<double>(r.run_index), r.ok ? 1.0 : 0.0,
                                 static_cast<double>(r.truth_epochs),
                                 static_cast<double>(r.estimate_epochs), r.ground_distance,
                                 r.max_radial_distance};
      for (const auto& v : r.variables) row.push_back(v.final_value);
      w.row(row);
    }
  }
  {
    TraceWriter w(dir / "failures.txt", "failures", prov, {"run_index", "t", "reason"});
    for (const auto& r : rep.runs)
      if (!r.ok) w.line(std::to_string(r.run_index) + " " + format_double(r.failure_time) + " " +
                        r.failure);
  }
  {
    TraceWriter w(dir / "fte.txt", "fte", prov,
                  {"run_index", "segment", "t_start", "t_end", "vtas_target", "max_vtas_error",
                   "holds_hp", "hp_target", "max_hp_error", "settled_samples"});
    for (const auto& r : rep.runs)
      for (const auto& s : r.segments)
        w.row({static_cast<double>(r.run_index), static_cast<double>(s.index + 1), s.t_start,
               s.t_end, s.vtas_target, s.max_vtas_error, s.holds_hp ? 1.0 : 0.0, s.hp_target,
               s.max_hp_error, static_cast<double>(s.settled_samples)});
  }
  if (!rep.variables.empty()) {
    std::string names;
    for (const auto& v : rep.variables) names += (names.empty() ? "" : " ") + v.name;
    TraceWriter w(dir / "metrics_aggregate.txt", "metrics_aggregate", prov,
                  {"variable_index", "mu_mu", "sigma_mu", "max_mu", "mu_sigma", "sigma_sigma",
                   "max_sigma", "mu_max", "sigma_max", "max_max", "mu_end", "sigma_end",
                   "max_end", "drift_growth", "ratio_to_std", "ratio_to_max", "drift", "biased"},
                  {{"variables", names},
                   {"runs_aggregated", std::to_string(rep.variables[0].aggregated.runs)}});
    for (std::size_t i = 0; i < rep.variables.size(); ++i) {
      const auto& a = rep.variables[i].aggregated;
      const auto& f = rep.variables[i].final_state;
      const auto& c = rep.variables[i].classification;
      w.row({static_cast<double>(i), a.of_mean.mean, a.of_mean.std, a.of_mean.max, a.of_std.mean,
             a.of_std.std, a.of_std.max, a.of_max.mean, a.of_max.std, a.of_max.max, f.mean, f.std,
             f.max, c.drift_growth, c.ratio_to_std, c.ratio_to_max, c.drift ? 1.0 : 0.0,
             c.biased ? 1.0 : 0.0});
    }
    std::vector<std::string> cols = {"t"};
    for (const auto& v : rep.variables) {
      cols.push_back("mean_" + v.name);
      cols.push_back("std_" + v.name);
    }
    TraceWriter tw(dir / "time_aggregate.txt", "time_aggregate", prov, cols,
                   {{"stride_epochs", std::to_string(rep.config.time_aggregate_stride)}});
    const std::size_t epochs = rep.time[0].mean.size();
    const auto stride = static_cast<std::size_t>(rep.config.time_aggregate_stride);
    std::vector<double> row(cols.size());
    for (std::size_t e = 0; e < epochs; e += stride) {
      row[0] = static_cast<double>(e) * kSensingDivider * kTruthStep;
      for (std::size_t v = 0; v < kErrorVariableCount; ++v) {
        row[1 + 2 * v] = rep.time[v].mean[e];
        row[2 + 2 * v] = rep.time[v].std[e];
      }
      tw.row(row);
    }
  }
  std::ofstream(dir / "metrics_report.txt") << format_report(rep);
}

StoredRunMetrics metrics_from_traces(const fs::path& run_dir) {
  const TraceTable est = read_trace(run_dir / "estimated.txt");
  const TraceTable tru = read_trace(run_dir / "truth_nav.txt");
  if (est.rows() != tru.rows() || est.rows() == 0)
    throw Error("estimated and truth_nav traces in " + run_dir.string() + " do not match");
  StoredRunMetrics out;
  out.provenance.master_seed = std::stoull(est.header.at("master_seed"));
  out.provenance.run_index = std::stoi(est.header.at("run_index"));
  out.provenance.config_hash = est.header.at("config_hash");
  out.epochs = est.rows();
  std::array<std::vector<double>, kErrorVariableCount> series;
  for (std::size_t i = 0; i < est.rows(); ++i) {
    const auto e = navigation_errors(nav_from_row(est, i), nav_from_row(tru, i));
    for (std::size_t v = 0; v < kErrorVariableCount; ++v) series[v].push_back(e[v]);
  }
  for (std::size_t v = 0; v < kErrorVariableCount; ++v) {
    out.variables[v].metrics = trajectory_metrics(series[v]);
    out.variables[v].final_value = series[v].back();
  }
  return out;
}

}  // namespace fwsim
