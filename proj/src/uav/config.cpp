#include "uav/config.hpp"

#include <fstream>

namespace uav {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  raise(ErrorCode::invalid_config, "config key '" + key + "': " + why);
}

double require_positive(const json& j, const std::string& key, double fallback) {
  double v = j.value(key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) bad_key(key, "must be a positive finite number");
  return v;
}

int require_nonneg_int(const json& j, const std::string& key, int fallback) {
  int v = j.value(key, fallback);
  if (v < 0) bad_key(key, "must be >= 0");
  return v;
}

state::Mount mount_from_json(const json& j) {
  state::Mount m;
  m.dx = j.value("dx", 0.0);
  m.dy = j.value("dy", 0.0);
  m.dz = j.value("dz", 0.0);
  m.yaw_deg = j.value("yaw_deg", 0.0);
  for (double v : {m.dx, m.dy, m.dz, m.yaw_deg}) {
    if (!std::isfinite(v)) raise(ErrorCode::invalid_config, "mount values must be finite");
  }
  return m;
}

ordered_json mount_to_json(const state::Mount& m) {
  return {{"dx", m.dx}, {"dy", m.dy}, {"dz", m.dz}, {"yaw_deg", m.yaw_deg}};
}

lidar::ExclusionZone zone_from_json(const json& j, size_t index) {
  lidar::ExclusionZone z;
  const std::string key = "lidar.zones[" + std::to_string(index) + "]";
  const std::string kind = j.value("kind", std::string());
  if (kind == "beam") {
    z.kind = lidar::ExclusionZone::Kind::beam_interval;
    z.beam_min = j.value("min", 0);
    z.beam_max = j.value("max", -1);
    if (z.beam_min < 0 || z.beam_max < z.beam_min) bad_key(key, "empty or negative beam interval");
  } else if (kind == "range") {
    z.kind = lidar::ExclusionZone::Kind::range_band;
    z.range_min_mm = j.value("min", 0.0);
    z.range_max_mm = j.value("max", -1.0);
    if (!(z.range_max_mm >= z.range_min_mm)) bad_key(key, "empty range band");
  } else {
    bad_key(key + ".kind", "must be 'beam' or 'range'");
  }
  z.label = j.value("label", std::string());
  return z;
}

ordered_json zone_to_json(const lidar::ExclusionZone& z) {
  ordered_json j;
  if (z.kind == lidar::ExclusionZone::Kind::beam_interval) {
    j["kind"] = "beam";
    j["min"] = z.beam_min;
    j["max"] = z.beam_max;
  } else {
    j["kind"] = "range";
    j["min"] = z.range_min_mm;
    j["max"] = z.range_max_mm;
  }
  j["label"] = z.label;
  return j;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  PipelineConfig c;
  if (j.contains("iso_threshold")) {
    int64_t v = j.at("iso_threshold").get<int64_t>();
    if (v < 0 || v > UINT32_MAX) bad_key("iso_threshold", "must fit an unsigned 32-bit value");
    c.iso_threshold = static_cast<uint32_t>(v);
  }

  if (j.contains("detection")) {
    const auto& d = j.at("detection");
    c.detection.min_score = d.value("min_score", c.detection.min_score);
    if (c.detection.min_score < 0.0 || c.detection.min_score > 1.0) {
      bad_key("detection.min_score", "must be in [0, 1]");
    }
  }

  if (j.contains("tracker")) {
    const auto& t = j.at("tracker");
    c.tracker.process_noise = require_positive(t, "process_noise", c.tracker.process_noise);
    c.tracker.measurement_noise =
        require_positive(t, "measurement_noise", c.tracker.measurement_noise);
    c.tracker.init_velocity_var =
        require_positive(t, "init_velocity_var", c.tracker.init_velocity_var);
    c.tracker.gate_px = require_positive(t, "gate_px", c.tracker.gate_px);
    c.tracker.max_misses = t.value("max_misses", c.tracker.max_misses);
    if (c.tracker.max_misses < 1) bad_key("tracker.max_misses", "must be >= 1");
    c.tracker.min_hits = t.value("min_hits", c.tracker.min_hits);
    if (c.tracker.min_hits < 1) bad_key("tracker.min_hits", "must be >= 1");
  }

  if (j.contains("thermal")) {
    const auto& t = j.at("thermal");
    c.thermal.open_radius = require_nonneg_int(t, "open_radius", c.thermal.open_radius);
    c.thermal.close_radius = require_nonneg_int(t, "close_radius", c.thermal.close_radius);
    c.thermal.iso = t.value("iso", c.thermal.iso);
    if (t.contains("bias_mm")) {
      const auto& b = t.at("bias_mm");
      if (!b.is_array() || b.size() != 3) bad_key("thermal.bias_mm", "must be [x, y, z]");
      c.thermal_bias_mm = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>()};
    }
  }

  if (j.contains("lidar")) {
    const auto& l = j.at("lidar");
    c.lidar.gap_mm = require_positive(l, "gap_mm", c.lidar.gap_mm);
    c.lidar.min_points = l.value("min_points", c.lidar.min_points);
    if (c.lidar.min_points < 1) bad_key("lidar.min_points", "must be >= 1");
    c.lidar.points_per_degree = l.value("points_per_degree", c.lidar.points_per_degree);
    if (c.lidar.points_per_degree < 1) bad_key("lidar.points_per_degree", "must be >= 1");
    if (l.contains("angle_convention")) {
      c.lidar.angle_convention =
          lidar::angle_convention_from_string(l.at("angle_convention").get<std::string>());
    }
    c.lidar.max_range_mm = require_positive(l, "max_range_mm", c.lidar.max_range_mm);
    c.lidar.expected_length_mm = l.value("expected_length_mm", c.lidar.expected_length_mm);
    if (c.lidar.expected_length_mm < 0.0) bad_key("lidar.expected_length_mm", "must be >= 0");
    c.lidar.recalibrate = l.value("recalibrate", c.lidar.recalibrate);
    c.lidar.length_tolerance = l.value("length_tolerance", c.lidar.length_tolerance);
    if (c.lidar.length_tolerance < 0.0) bad_key("lidar.length_tolerance", "must be >= 0");
    if (l.contains("zones")) {
      const auto& zones = l.at("zones");
      if (!zones.is_array()) bad_key("lidar.zones", "must be an array");
      for (size_t i = 0; i < zones.size(); ++i) {
        c.lidar.zones.push_back(zone_from_json(zones[i], i));
      }
    }
  }

  c.calibration_path = j.value("calibration", std::string());

  if (j.contains("mounts")) {
    const auto& m = j.at("mounts");
    if (m.contains("mono")) c.mounts.mono = mount_from_json(m.at("mono"));
    if (m.contains("thermal")) c.mounts.thermal = mount_from_json(m.at("thermal"));
  }

  if (j.contains("output")) {
    const auto& o = j.at("output");
    c.output.tracks_jsonl = o.value("tracks_jsonl", std::string());
    c.output.segments_jsonl = o.value("segments_jsonl", std::string());
  }

  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    raise(ErrorCode::missing_file, "config file not found: " + path.string());
  }
  std::ifstream in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorCode::invalid_config, path.string() + ": invalid JSON: " + e.what());
  }
  return from_json(j);
}

nlohmann::ordered_json PipelineConfig::to_json() const {
  ordered_json j;
  j["iso_threshold"] = iso_threshold;
  j["detection"] = {{"min_score", detection.min_score}};
  j["tracker"] = {{"process_noise", tracker.process_noise},
                  {"measurement_noise", tracker.measurement_noise},
                  {"init_velocity_var", tracker.init_velocity_var},
                  {"gate_px", tracker.gate_px},
                  {"max_misses", tracker.max_misses},
                  {"min_hits", tracker.min_hits}};
  j["thermal"] = {{"open_radius", thermal.open_radius},
                  {"close_radius", thermal.close_radius},
                  {"iso", thermal.iso},
                  {"bias_mm", {thermal_bias_mm.x, thermal_bias_mm.y, thermal_bias_mm.z}}};
  ordered_json zones = ordered_json::array();
  for (const auto& z : lidar.zones) {
    zones.push_back(zone_to_json(z));
  }
  j["lidar"] = {{"zones", zones},
                {"gap_mm", lidar.gap_mm},
                {"min_points", lidar.min_points},
                {"points_per_degree", lidar.points_per_degree},
                {"angle_convention", lidar::to_string(lidar.angle_convention)},
                {"max_range_mm", lidar.max_range_mm},
                {"expected_length_mm", lidar.expected_length_mm},
                {"recalibrate", lidar.recalibrate},
                {"length_tolerance", lidar.length_tolerance}};
  j["calibration"] = calibration_path;
  j["mounts"] = {{"mono", mount_to_json(mounts.mono)},
                 {"thermal", mount_to_json(mounts.thermal)}};
  j["output"] = {{"tracks_jsonl", output.tracks_jsonl},
                 {"segments_jsonl", output.segments_jsonl}};
  return j;
}

}  // namespace uav
