#include "uav/synth/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "uav/io/formats.hpp"
#include "uav/state/pipeline.hpp"

namespace uav::synth {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kMinDepthMm = 100.0;
constexpr double kCalibrationDepthMm = 3000.0;

TrajectoryKind kind_from_string(const std::string& name) {
  if (name == "hover") return TrajectoryKind::hover;
  if (name == "line") return TrajectoryKind::line;
  if (name == "circle") return TrajectoryKind::circle;
  if (name == "lissajous") return TrajectoryKind::lissajous;
  raise(ErrorCode::invalid_spec, "unknown trajectory kind '" + name + "'");
}

std::string kind_to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::hover: return "hover";
    case TrajectoryKind::line: return "line";
    case TrajectoryKind::circle: return "circle";
    case TrajectoryKind::lissajous: return "lissajous";
  }
  return "hover";
}

Vec3 vec3_from_json(const json& j, const char* key, Vec3 fallback) {
  if (!j.contains(key)) return fallback;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) {
    raise(ErrorCode::invalid_spec, std::string(key) + " must be a 3-element array");
  }
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

ordered_json vec3_to_json(const Vec3& v) { return {v.x, v.y, v.z}; }

state::Mount mount_from_json(const json& j, state::Mount fallback) {
  state::Mount m = fallback;
  m.dx = j.value("dx", m.dx);
  m.dy = j.value("dy", m.dy);
  m.dz = j.value("dz", m.dz);
  m.yaw_deg = j.value("yaw_deg", m.yaw_deg);
  return m;
}

ordered_json mount_to_json(const state::Mount& m) {
  return {{"dx", m.dx}, {"dy", m.dy}, {"dz", m.dz}, {"yaw_deg", m.yaw_deg}};
}

/// Camera-frame vector of a world point: undo mount translation then yaw.
Vec3 to_camera(const Vec3& p, const state::Mount& mount) {
  const double x = p.x - mount.dx;
  const double y = p.y - mount.dy;
  const double z = p.z - mount.dz;
  const double yaw = deg_to_rad(mount.yaw_deg);
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * x + s * y, -s * x + c * y, z};
}

struct Projection {
  bool visible = false;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double depth = 0.0;
};

Projection project(const Vec3& p, const state::Mount& mount, double focal_px, uint32_t width,
                   uint32_t height, double uav_length_mm, double uav_height_mm) {
  Projection out;
  const Vec3 v = to_camera(p, mount);
  if (v.y < kMinDepthMm) return out;
  out.depth = v.y;
  out.cx = focal_px * v.x / v.y;
  out.cy = focal_px * v.z / v.y;
  out.w = focal_px * uav_length_mm / v.y;
  out.h = focal_px * uav_height_mm / v.y;
  out.visible = std::abs(out.cx) <= width / 2.0 && std::abs(out.cy) <= height / 2.0;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Spec JSON
// ---------------------------------------------------------------------------

ScenarioSpec ScenarioSpec::from_json(const nlohmann::json& j) {
  ScenarioSpec s;
  if (j.contains("kind")) s.kind = kind_from_string(j.at("kind").get<std::string>());
  s.center_mm = vec3_from_json(j, "center_mm", s.center_mm);
  s.radius_mm = j.value("radius_mm", s.radius_mm);
  s.speed_mm_s = j.value("speed_mm_s", s.speed_mm_s);
  s.tilt_deg = j.value("tilt_deg", s.tilt_deg);
  s.phase_deg = j.value("phase_deg", s.phase_deg);
  s.line_end_mm = vec3_from_json(j, "line_end_mm", s.line_end_mm);
  s.amp_mm = vec3_from_json(j, "amp_mm", s.amp_mm);
  s.freq_hz = vec3_from_json(j, "freq_hz", s.freq_hz);
  s.phase_rad = vec3_from_json(j, "phase_rad", s.phase_rad);
  s.duration_s = j.value("duration_s", s.duration_s);
  s.seed = j.value("seed", s.seed);
  s.uav_length_mm = j.value("uav_length_mm", s.uav_length_mm);
  s.uav_height_mm = j.value("uav_height_mm", s.uav_height_mm);

  if (j.contains("rates_hz")) {
    const auto& r = j.at("rates_hz");
    s.rates.detections = r.value("detections", s.rates.detections);
    s.rates.thermal = r.value("thermal", s.rates.thermal);
    s.rates.lidar = r.value("lidar", s.rates.lidar);
    s.rates.groundtruth = r.value("groundtruth", s.rates.groundtruth);
  }
  if (j.contains("streams")) {
    const auto& t = j.at("streams");
    s.streams.detections = t.value("detections", s.streams.detections);
    s.streams.thermal = t.value("thermal", s.streams.thermal);
    s.streams.lidar = t.value("lidar", s.streams.lidar);
    s.streams.groundtruth = t.value("groundtruth", s.streams.groundtruth);
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    s.noise.detection_jitter_px = n.value("detection_jitter_px", s.noise.detection_jitter_px);
    s.noise.detection_miss_prob = n.value("detection_miss_prob", s.noise.detection_miss_prob);
    s.noise.thermal_background =
        static_cast<uint8_t>(n.value("thermal_background", (int)s.noise.thermal_background));
    s.noise.thermal_noise_std = n.value("thermal_noise_std", s.noise.thermal_noise_std);
    s.noise.lidar_range_noise_mm =
        n.value("lidar_range_noise_mm", s.noise.lidar_range_noise_mm);
  }
  if (j.contains("iso")) {
    s.iso_steps = {{0.0, j.at("iso").get<uint32_t>()}};
  }
  if (j.contains("iso_steps")) {
    s.iso_steps.clear();
    for (const auto& step : j.at("iso_steps")) {
      s.iso_steps.push_back({step.at("t").get<double>(), step.at("iso").get<uint32_t>()});
    }
  }
  if (j.contains("camera")) {
    const auto& c = j.at("camera");
    s.camera.width = c.value("width", s.camera.width);
    s.camera.height = c.value("height", s.camera.height);
    s.camera.focal_px = c.value("focal_px", s.camera.focal_px);
    if (c.contains("mount")) s.camera.mount = mount_from_json(c.at("mount"), s.camera.mount);
  }
  if (j.contains("thermal_camera")) {
    const auto& c = j.at("thermal_camera");
    s.thermal_camera.width = c.value("width", s.thermal_camera.width);
    s.thermal_camera.height = c.value("height", s.thermal_camera.height);
    s.thermal_camera.focal_px = c.value("focal_px", s.thermal_camera.focal_px);
    s.thermal_camera.hot_level =
        static_cast<uint8_t>(c.value("hot_level", (int)s.thermal_camera.hot_level));
    if (c.contains("mount")) {
      s.thermal_camera.mount = mount_from_json(c.at("mount"), s.thermal_camera.mount);
    }
  }
  if (j.contains("lidar_sensor")) {
    const auto& l = j.at("lidar_sensor");
    s.lidar_sensor.points_per_degree =
        l.value("points_per_degree", s.lidar_sensor.points_per_degree);
    s.lidar_sensor.fov_deg = l.value("fov_deg", s.lidar_sensor.fov_deg);
    s.lidar_sensor.angular_start_deg =
        l.value("angular_start_deg", s.lidar_sensor.angular_start_deg);
    s.lidar_sensor.plane_z_mm = l.value("plane_z_mm", s.lidar_sensor.plane_z_mm);
    s.lidar_sensor.plane_tol_mm = l.value("plane_tol_mm", s.lidar_sensor.plane_tol_mm);
    s.lidar_sensor.wall_y_mm = l.value("wall_y_mm", s.lidar_sensor.wall_y_mm);
    s.lidar_sensor.max_range_mm = l.value("max_range_mm", s.lidar_sensor.max_range_mm);
  }
  if (j.contains("angle_convention")) {
    s.angle_convention =
        lidar::angle_convention_from_string(j.at("angle_convention").get<std::string>());
  }
  if (j.contains("offsets_s")) {
    const auto& o = j.at("offsets_s");
    s.offsets.detections = o.value("detections", 0.0);
    s.offsets.thermal = o.value("thermal", 0.0);
    s.offsets.lidar = o.value("lidar", 0.0);
    s.offsets.groundtruth = o.value("groundtruth", 0.0);
  }
  s.validate();
  return s;
}

ScenarioSpec ScenarioSpec::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    raise(ErrorCode::missing_file, "scenario spec not found: " + path.string());
  }
  std::ifstream in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorCode::invalid_spec, path.string() + ": invalid JSON: " + e.what());
  }
  return from_json(j);
}

nlohmann::ordered_json ScenarioSpec::to_json() const {
  ordered_json j;
  j["kind"] = kind_to_string(kind);
  j["center_mm"] = vec3_to_json(center_mm);
  j["radius_mm"] = radius_mm;
  j["speed_mm_s"] = speed_mm_s;
  j["tilt_deg"] = tilt_deg;
  j["phase_deg"] = phase_deg;
  j["line_end_mm"] = vec3_to_json(line_end_mm);
  j["amp_mm"] = vec3_to_json(amp_mm);
  j["freq_hz"] = vec3_to_json(freq_hz);
  j["phase_rad"] = vec3_to_json(phase_rad);
  j["duration_s"] = duration_s;
  j["seed"] = seed;
  j["uav_length_mm"] = uav_length_mm;
  j["uav_height_mm"] = uav_height_mm;
  j["rates_hz"] = {{"detections", rates.detections},
                   {"thermal", rates.thermal},
                   {"lidar", rates.lidar},
                   {"groundtruth", rates.groundtruth}};
  j["streams"] = {{"detections", streams.detections},
                  {"thermal", streams.thermal},
                  {"lidar", streams.lidar},
                  {"groundtruth", streams.groundtruth}};
  j["noise"] = {{"detection_jitter_px", noise.detection_jitter_px},
                {"detection_miss_prob", noise.detection_miss_prob},
                {"thermal_background", noise.thermal_background},
                {"thermal_noise_std", noise.thermal_noise_std},
                {"lidar_range_noise_mm", noise.lidar_range_noise_mm}};
  ordered_json steps = ordered_json::array();
  for (const auto& step : iso_steps) {
    steps.push_back({{"t", step.t}, {"iso", step.iso}});
  }
  j["iso_steps"] = steps;
  j["camera"] = {{"width", camera.width},
                 {"height", camera.height},
                 {"focal_px", camera.focal_px},
                 {"mount", mount_to_json(camera.mount)}};
  j["thermal_camera"] = {{"width", thermal_camera.width},
                         {"height", thermal_camera.height},
                         {"focal_px", thermal_camera.focal_px},
                         {"hot_level", thermal_camera.hot_level},
                         {"mount", mount_to_json(thermal_camera.mount)}};
  j["lidar_sensor"] = {{"points_per_degree", lidar_sensor.points_per_degree},
                       {"fov_deg", lidar_sensor.fov_deg},
                       {"angular_start_deg", lidar_sensor.angular_start_deg},
                       {"plane_z_mm", lidar_sensor.plane_z_mm},
                       {"plane_tol_mm", lidar_sensor.plane_tol_mm},
                       {"wall_y_mm", lidar_sensor.wall_y_mm},
                       {"max_range_mm", lidar_sensor.max_range_mm}};
  j["angle_convention"] = lidar::to_string(angle_convention);
  j["offsets_s"] = {{"detections", offsets.detections},
                    {"thermal", offsets.thermal},
                    {"lidar", offsets.lidar},
                    {"groundtruth", offsets.groundtruth}};
  return j;
}

void ScenarioSpec::validate() const {
  if (!(duration_s > 0.0)) raise(ErrorCode::invalid_spec, "duration_s must be > 0");
  for (double r : {rates.detections, rates.thermal, rates.lidar, rates.groundtruth}) {
    if (!(r > 0.0)) raise(ErrorCode::invalid_spec, "sensor rates must be > 0");
  }
  if (!(uav_length_mm > 0.0) || !(uav_height_mm > 0.0)) {
    raise(ErrorCode::invalid_spec, "uav dimensions must be > 0");
  }
  if (kind == TrajectoryKind::circle) {
    if (!(radius_mm > 0.0)) raise(ErrorCode::invalid_spec, "radius_mm must be > 0");
    if (!(speed_mm_s > 0.0)) raise(ErrorCode::invalid_spec, "speed_mm_s must be > 0");
  }
  if (noise.detection_miss_prob < 0.0 || noise.detection_miss_prob > 1.0) {
    raise(ErrorCode::invalid_spec, "detection_miss_prob must be in [0, 1]");
  }
  if (noise.detection_jitter_px < 0.0 || noise.thermal_noise_std < 0.0 ||
      noise.lidar_range_noise_mm < 0.0) {
    raise(ErrorCode::invalid_spec, "noise levels must be >= 0");
  }
  if (!streams.detections && !streams.thermal && !streams.lidar && !streams.groundtruth) {
    raise(ErrorCode::invalid_spec, "at least one stream must be enabled");
  }
  if (iso_steps.empty()) {
    raise(ErrorCode::invalid_spec, "iso_steps must not be empty");
  }
  for (size_t i = 1; i < iso_steps.size(); ++i) {
    if (!(iso_steps[i].t > iso_steps[i - 1].t)) {
      raise(ErrorCode::invalid_spec, "iso_steps must be strictly increasing in t");
    }
  }
  if (camera.width == 0 || camera.height == 0 || !(camera.focal_px > 0.0)) {
    raise(ErrorCode::invalid_spec, "camera spec must be positive");
  }
  if (thermal_camera.width == 0 || thermal_camera.height == 0 ||
      !(thermal_camera.focal_px > 0.0)) {
    raise(ErrorCode::invalid_spec, "thermal camera spec must be positive");
  }
  if (lidar_sensor.points_per_degree < 1 || !(lidar_sensor.fov_deg > 0.0)) {
    raise(ErrorCode::invalid_spec, "lidar sensor spec must be positive");
  }
}

// ---------------------------------------------------------------------------
// Trajectory and renderers
// ---------------------------------------------------------------------------

Vec3 trajectory_point(const ScenarioSpec& spec, double t) {
  switch (spec.kind) {
    case TrajectoryKind::hover:
      return spec.center_mm;
    case TrajectoryKind::line: {
      const double u = std::clamp(t / spec.duration_s, 0.0, 1.0);
      return spec.center_mm + (spec.line_end_mm - spec.center_mm) * u;
    }
    case TrajectoryKind::circle: {
      const double omega = spec.speed_mm_s / spec.radius_mm;
      const double phi = deg_to_rad(spec.phase_deg) + omega * t;
      const double tilt = deg_to_rad(spec.tilt_deg);
      const double in_plane = spec.radius_mm * std::sin(phi);
      return spec.center_mm + Vec3{spec.radius_mm * std::cos(phi),
                                   in_plane * std::cos(tilt), in_plane * std::sin(tilt)};
    }
    case TrajectoryKind::lissajous: {
      auto axis = [&](double amp, double freq, double phase) {
        return amp * std::sin(2.0 * M_PI * freq * t + phase);
      };
      return spec.center_mm + Vec3{axis(spec.amp_mm.x, spec.freq_hz.x, spec.phase_rad.x),
                                   axis(spec.amp_mm.y, spec.freq_hz.y, spec.phase_rad.y),
                                   axis(spec.amp_mm.z, spec.freq_hz.z, spec.phase_rad.z)};
    }
  }
  return spec.center_mm;
}

uint32_t iso_at(const ScenarioSpec& spec, double t) {
  uint32_t iso = spec.iso_steps.front().iso;
  for (const auto& step : spec.iso_steps) {
    if (step.t <= t) iso = step.iso;
  }
  return iso;
}

std::optional<io::DetectionRecord> render_detection(const ScenarioSpec& spec, double t,
                                                    uint64_t frame_id, SplitMix64& rng) {
  const double miss_draw = rng.next_double();
  const Vec3 p = trajectory_point(spec, t);
  const auto proj = project(p, spec.camera.mount, spec.camera.focal_px, spec.camera.width,
                            spec.camera.height, spec.uav_length_mm, spec.uav_height_mm);
  if (!proj.visible) return std::nullopt;
  if (miss_draw < spec.noise.detection_miss_prob) return std::nullopt;

  io::DetectionRecord d;
  d.timestamp = t;
  d.frame_id = frame_id;
  d.cx = proj.cx;
  d.cy = proj.cy;
  d.w = proj.w;
  d.h = proj.h;
  d.score = 0.99;
  if (spec.noise.detection_jitter_px > 0.0) {
    const double s = spec.noise.detection_jitter_px;
    d.cx += s * rng.gaussian();
    d.cy += s * rng.gaussian();
    d.w = std::max(1.0, d.w + 0.5 * s * rng.gaussian());
    d.h = std::max(1.0, d.h + 0.5 * s * rng.gaussian());
    d.score = std::clamp(0.99 - 0.01 * std::abs(rng.gaussian()), 0.0, 1.0);
    d.cx = std::clamp(d.cx, -(spec.camera.width / 2.0), spec.camera.width / 2.0);
    d.cy = std::clamp(d.cy, -(spec.camera.height / 2.0), spec.camera.height / 2.0);
  }
  d.iso = iso_at(spec, t);
  d.frame_width = spec.camera.width;
  d.frame_height = spec.camera.height;
  return d;
}

io::ThermalFrame render_thermal_frame(const ScenarioSpec& spec, double t, SplitMix64& rng) {
  io::ThermalFrame frame;
  frame.timestamp = t;
  frame.width = spec.thermal_camera.width;
  frame.height = spec.thermal_camera.height;
  frame.pixels.assign(static_cast<size_t>(frame.width) * frame.height,
                      spec.noise.thermal_background);

  if (spec.noise.thermal_noise_std > 0.0) {
    const double s = spec.noise.thermal_noise_std;
    for (auto& px : frame.pixels) {
      const double v = px + s * rng.gaussian();
      px = static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }

  const Vec3 p = trajectory_point(spec, t);
  const auto proj =
      project(p, spec.thermal_camera.mount, spec.thermal_camera.focal_px,
              spec.thermal_camera.width, spec.thermal_camera.height, spec.uav_length_mm,
              spec.uav_length_mm);  // the emitted disc is round: diameter = apparent length
  if (!proj.visible) return frame;

  const double col_c = proj.cx + (frame.width - 1) / 2.0;
  const double row_c = (frame.height - 1) / 2.0 - proj.cy;
  const double radius = proj.w / 2.0;
  const double span = radius + 1.5;
  const int col_min = std::max(0, static_cast<int>(std::floor(col_c - span)));
  const int col_max = std::min<int>(frame.width - 1, static_cast<int>(std::ceil(col_c + span)));
  const int row_min = std::max(0, static_cast<int>(std::floor(row_c - span)));
  const int row_max = std::min<int>(frame.height - 1, static_cast<int>(std::ceil(row_c + span)));
  const double hot_delta =
      static_cast<double>(spec.thermal_camera.hot_level) - spec.noise.thermal_background;

  for (int row = row_min; row <= row_max; ++row) {
    uint8_t* line = frame.pixels.data() + static_cast<size_t>(row) * frame.width;
    for (int col = col_min; col <= col_max; ++col) {
      const double d = std::hypot(col - col_c, row - row_c);
      const double coverage = std::clamp(radius + 0.5 - d, 0.0, 1.0);
      if (coverage <= 0.0) continue;
      const double v = line[col] + hot_delta * coverage;
      line[col] = static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return frame;
}

io::LidarScan render_lidar_scan(const ScenarioSpec& spec, double t, SplitMix64& rng) {
  const auto& sensor = spec.lidar_sensor;
  io::LidarScan scan;
  scan.timestamp = t;
  scan.points_per_degree = sensor.points_per_degree;
  scan.angular_start_deg = sensor.angular_start_deg;
  const int n_beams =
      static_cast<int>(std::lround(sensor.fov_deg * sensor.points_per_degree));
  scan.ranges_mm.assign(n_beams, 0.0);

  auto noisy = [&](double range) {
    if (spec.noise.lidar_range_noise_mm > 0.0) {
      range += spec.noise.lidar_range_noise_mm * rng.gaussian();
    }
    return range;
  };

  if (sensor.wall_y_mm > 0.0) {
    for (int b = 0; b < n_beams; ++b) {
      const double theta =
          deg_to_rad(sensor.angular_start_deg + static_cast<double>(b) / sensor.points_per_degree);
      const double s = std::sin(theta);
      if (s <= 1e-9) continue;
      const double range = sensor.wall_y_mm / s;
      if (range <= sensor.max_range_mm) {
        scan.ranges_mm[b] = noisy(range);
      }
    }
  }

  const Vec3 p = trajectory_point(spec, t);
  if (std::abs(p.z - sensor.plane_z_mm) <= sensor.plane_tol_mm) {
    const double rho = std::hypot(p.x, p.y);
    if (rho > 0.0 && rho <= sensor.max_range_mm) {
      const double azimuth_deg = rad_to_deg(std::atan2(p.y, p.x));
      const double half_width = spec.uav_length_mm / (2.0 * rho);
      double subtended_deg = rad_to_deg(std::atan(half_width));
      if (spec.angle_convention == lidar::AngleConvention::half_angle) {
        subtended_deg *= 2.0;
      }
      const int n_points = std::max(
          1, static_cast<int>(std::lround(subtended_deg * sensor.points_per_degree)));
      const int center =
          static_cast<int>(std::lround((azimuth_deg - sensor.angular_start_deg) *
                                        sensor.points_per_degree));
      const int first = center - n_points / 2;
      for (int b = first; b < first + n_points; ++b) {
        if (b < 0 || b >= n_beams) continue;
        scan.ranges_mm[b] = noisy(rho);
      }
    }
  }
  return scan;
}

// ---------------------------------------------------------------------------
// Session generation
// ---------------------------------------------------------------------------

SessionPaths gen_session(const ScenarioSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir);

  SessionPaths paths;
  paths.manifest = out_dir / "manifest.json";
  paths.scenario = out_dir / "scenario.json";
  paths.calibration = out_dir / "calibration.json";
  paths.thermal_dir = out_dir / "frames";
  paths.lidar_csv = out_dir / "lidar.csv";
  paths.detections_jsonl = out_dir / "detections.jsonl";
  paths.groundtruth_csv = out_dir / "groundtruth.csv";

  auto ticks = [&](double rate) {
    return static_cast<uint64_t>(std::floor(spec.duration_s * rate + 1e-9)) + 1;
  };

  io::SessionManifest manifest;
  manifest.offsets = spec.offsets;
  manifest.duration = spec.duration_s;

  if (spec.streams.detections) {
    SplitMix64 rng = SplitMix64::substream(spec.seed, 1);
    std::vector<io::DetectionRecord> records;
    const uint64_t n = ticks(spec.rates.detections);
    for (uint64_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / spec.rates.detections;
      if (auto d = render_detection(spec, t, k, rng)) {
        d->timestamp = t - spec.offsets.detections;  // raw log time; load re-applies
        records.push_back(*d);
      }
    }
    io::write_detections_jsonl(paths.detections_jsonl, records);
    manifest.detections_jsonl = paths.detections_jsonl;
  }

  if (spec.streams.thermal) {
    SplitMix64 rng = SplitMix64::substream(spec.seed, 2);
    std::filesystem::create_directories(paths.thermal_dir);
    std::ofstream index(paths.thermal_dir / "index.jsonl");
    const uint64_t n = ticks(spec.rates.thermal);
    for (uint64_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / spec.rates.thermal;
      io::ThermalFrame frame = render_thermal_frame(spec, t, rng);
      io::write_pgm(paths.thermal_dir / io::thermal_frame_filename(k), frame);
      index << "{\"frame_id\":" << k
            << ",\"timestamp\":" << format_timestamp(t - spec.offsets.thermal) << "}\n";
    }
    manifest.thermal_dir = paths.thermal_dir;
  }

  if (spec.streams.lidar) {
    SplitMix64 rng = SplitMix64::substream(spec.seed, 3);
    std::vector<io::LidarScan> scans;
    const uint64_t n = ticks(spec.rates.lidar);
    for (uint64_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / spec.rates.lidar;
      io::LidarScan scan = render_lidar_scan(spec, t, rng);
      scan.timestamp = t - spec.offsets.lidar;
      scans.push_back(std::move(scan));
    }
    io::write_lidar_csv(paths.lidar_csv, scans);
    manifest.lidar_csv = paths.lidar_csv;
  }

  if (spec.streams.groundtruth) {
    std::vector<io::GroundTruthSample> samples;
    const uint64_t n = ticks(spec.rates.groundtruth);
    for (uint64_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / spec.rates.groundtruth;
      io::GroundTruthSample s;
      s.timestamp = t - spec.offsets.groundtruth;
      s.position_mm = trajectory_point(spec, t);
      if (spec.streams.detections) {
        s.visible = project(s.position_mm, spec.camera.mount, spec.camera.focal_px,
                            spec.camera.width, spec.camera.height, spec.uav_length_mm,
                            spec.uav_height_mm)
                        .visible;
      } else {
        s.visible = project(s.position_mm, spec.thermal_camera.mount,
                            spec.thermal_camera.focal_px, spec.thermal_camera.width,
                            spec.thermal_camera.height, spec.uav_length_mm, spec.uav_length_mm)
                        .visible;
      }
      samples.push_back(s);
    }
    io::write_groundtruth_csv(paths.groundtruth_csv, samples, true);
    manifest.groundtruth_csv = paths.groundtruth_csv;
  }

  // Exact calibration records at the reference depth; the projection model
  // is scale-free so any reference works.
  std::vector<state::CalibrationRecord> calibrations;
  if (spec.streams.detections) {
    state::CalibrationRecord r;
    r.mode = state::SensorMode::monocular;
    r.distance_mm = kCalibrationDepthMm;
    r.object_px = spec.camera.focal_px * spec.uav_length_mm / kCalibrationDepthMm;
    r.object_length_mm = spec.uav_length_mm;
    r.frame_px = spec.camera.width;
    r.mount = spec.camera.mount;
    calibrations.push_back(r);
  }
  if (spec.streams.thermal) {
    state::CalibrationRecord r;
    r.mode = state::SensorMode::thermal;
    r.distance_mm = kCalibrationDepthMm;
    r.object_px = spec.thermal_camera.focal_px * spec.uav_length_mm / kCalibrationDepthMm;
    r.object_length_mm = spec.uav_length_mm;
    r.frame_px = spec.thermal_camera.width;
    r.mount = spec.thermal_camera.mount;
    calibrations.push_back(r);
  }
  state::write_calibration(paths.calibration, calibrations);

  io::write_manifest(paths.manifest, manifest);

  std::ofstream scenario_out(paths.scenario);
  scenario_out << spec.to_json().dump(2) << '\n';

  return paths;
}

// ---------------------------------------------------------------------------
// Histogram cases
// ---------------------------------------------------------------------------

std::vector<HistogramCase> gen_histogram_cases(uint64_t seed, size_t n,
                                               bool include_degenerate) {
  if (n < 1) {
    raise(ErrorCode::invalid_argument, "need n >= 1 histogram cases");
  }
  SplitMix64 rng = SplitMix64::substream(seed, 99);
  std::vector<HistogramCase> cases;
  cases.reserve(n);

  auto add_gaussian_bump = [](std::array<double, 256>& counts, double center, double sigma,
                              double weight) {
    for (int g = 0; g < 256; ++g) {
      const double d = (g - center) / sigma;
      counts[g] += weight * std::exp(-0.5 * d * d);
    }
  };

  for (size_t i = 0; i < n; ++i) {
    HistogramCase c;
    std::array<double, 256> counts{};
    const int pick = static_cast<int>(i % 5);
    const bool degenerate_slot = include_degenerate && pick == 4;

    if (degenerate_slot) {
      c.kind = HistogramCase::Kind::degenerate;
      counts[static_cast<int>(rng.uniform(0.0, 256.0))] = 1.0;
    } else if (pick == 0 || pick == 2) {
      c.kind = HistogramCase::Kind::bimodal;
      const double c1 = rng.uniform(10.0, 100.0);
      const double gap = rng.uniform(40.0, std::min(150.0, 245.0 - c1));
      const double c2 = c1 + gap;
      add_gaussian_bump(counts, c1, rng.uniform(1.5, 10.0), rng.uniform(0.2, 0.8));
      add_gaussian_bump(counts, c2, rng.uniform(1.5, 10.0), rng.uniform(0.2, 0.8));
      c.mode_gap = static_cast<int>(std::lround(gap));
    } else if (pick == 1) {
      c.kind = HistogramCase::Kind::unimodal;
      add_gaussian_bump(counts, rng.uniform(20.0, 235.0), rng.uniform(2.0, 20.0), 1.0);
    } else {
      c.kind = HistogramCase::Kind::spread;
      for (int g = 0; g < 256; ++g) {
        counts[g] = rng.uniform(0.0, 100.0);
      }
    }

    double total = 0.0;
    for (double v : counts) total += v;
    c.histogram.n_pixels = 1 << 16;
    for (int g = 0; g < 256; ++g) {
      c.histogram.p[g] = counts[g] / total;
    }
    cases.push_back(c);
  }
  return cases;
}

}  // namespace uav::synth
