#include "uav/state/pipeline.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "uav/io/formats.hpp"
#include "uav/track/tracker.hpp"

namespace uav::state {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

CalibrationRecord calibration_from_json(const json& j, const std::filesystem::path& path) {
  CalibrationRecord r;
  try {
    r.mode = sensor_mode_from_string(j.at("mode").get<std::string>());
    r.distance_mm = j.at("D_c").get<double>();
    r.object_px = j.at("l_c").get<double>();
    r.object_length_mm = j.at("L_real").get<double>();
    r.frame_px = j.at("f").get<double>();
  } catch (const json::exception& e) {
    raise(ErrorCode::malformed_record, path.string() + ": bad calibration record: " + e.what());
  }
  if (j.contains("mount")) {
    const auto& m = j.at("mount");
    r.mount.dx = m.value("dx", 0.0);
    r.mount.dy = m.value("dy", 0.0);
    r.mount.dz = m.value("dz", 0.0);
    r.mount.yaw_deg = m.value("yaw_deg", 0.0);
  }
  if (!(r.distance_mm > 0.0) || !(r.object_px > 0.0) || !(r.object_length_mm > 0.0) ||
      !(r.frame_px > 0.0)) {
    raise(ErrorCode::malformed_record,
          path.string() + ": calibration fields must all be positive");
  }
  if (r.object_px > r.frame_px) {
    raise(ErrorCode::malformed_record,
          path.string() + ": calibrated object length exceeds the frame length");
  }
  return r;
}

ordered_json calibration_to_json(const CalibrationRecord& r) {
  ordered_json j;
  j["mode"] = to_string(r.mode);
  j["D_c"] = r.distance_mm;
  j["l_c"] = r.object_px;
  j["L_real"] = r.object_length_mm;
  j["f"] = r.frame_px;
  j["mount"] = {{"dx", r.mount.dx},
                {"dy", r.mount.dy},
                {"dz", r.mount.dz},
                {"yaw_deg", r.mount.yaw_deg}};
  return j;
}

}  // namespace

CalibrationSet load_calibration(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    raise(ErrorCode::missing_file, "calibration file not found: " + path.string());
  }
  std::ifstream in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorCode::malformed_record, path.string() + ": invalid JSON: " + e.what());
  }

  CalibrationSet set;
  auto add = [&](const json& record) {
    CalibrationRecord r = calibration_from_json(record, path);
    if (r.mode == SensorMode::monocular) {
      set.mono = r;
    } else {
      set.thermal = r;
    }
  };
  if (j.is_array()) {
    for (const auto& record : j) add(record);
  } else {
    add(j);
  }
  return set;
}

void write_calibration(const std::filesystem::path& path,
                       std::span<const CalibrationRecord> records) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : records) {
    arr.push_back(calibration_to_json(r));
  }
  std::ofstream out(path);
  if (!out) {
    raise(ErrorCode::io_error, "cannot open for writing: " + path.string());
  }
  out << arr.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Event-driven session walk shared by run_pipeline and find_calibration
// ---------------------------------------------------------------------------

namespace {

enum class EventKind : uint8_t { detection = 0, thermal = 1, lidar = 2 };

struct Event {
  double t;
  EventKind kind;
  size_t index;
};

std::vector<Event> build_events(const io::Session& session) {
  std::vector<Event> events;
  events.reserve(session.detections.size() + session.thermal.size() + session.lidar.size());
  for (size_t i = 0; i < session.detections.size(); ++i) {
    events.push_back({session.detections[i].timestamp, EventKind::detection, i});
  }
  for (size_t i = 0; i < session.thermal.size(); ++i) {
    events.push_back({session.thermal[i].timestamp, EventKind::thermal, i});
  }
  for (size_t i = 0; i < session.lidar.size(); ++i) {
    events.push_back({session.lidar[i].timestamp, EventKind::lidar, i});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.index < b.index;
  });
  return events;
}

double median_scan_period(const io::Session& session) {
  std::vector<double> gaps;
  for (size_t i = 1; i < session.lidar.size(); ++i) {
    gaps.push_back(session.lidar[i].timestamp - session.lidar[i - 1].timestamp);
  }
  if (gaps.empty()) return 0.025;
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  return gaps[gaps.size() / 2];
}

/// Modes the ISO gate will activate over this session.
struct Activation {
  bool mono = false;
  bool thermal = false;
};

Activation activating_modes(const io::Session& session, const PipelineConfig& config) {
  Activation a;
  if (session.detections.empty()) {
    a.thermal = true;  // thermal-only sessions force the thermal branch
    return a;
  }
  for (const auto& d : session.detections) {
    if (select_mode(d.iso, config.iso_threshold) == SensorMode::monocular) {
      a.mono = true;
    } else {
      a.thermal = true;
    }
  }
  return a;
}

class SessionWalker {
public:
  SessionWalker(const io::Session& session, const PipelineConfig& config, bool bypass_kalman)
      : session_(session),
        config_(config),
        bypass_(bypass_kalman),
        tracker_(config.tracker),
        recal_window_(median_scan_period(session)) {
    if (session.detections.empty() && session.thermal.empty()) {
      raise(ErrorCode::missing_stream, "session has neither detections nor thermal frames");
    }
    activation_ = activating_modes(session_, config_);
    if (activation_.thermal && session_.thermal.empty()) {
      raise(ErrorCode::missing_stream,
            "thermal branch activates (ISO gate) but the session has no thermal frames");
    }
    detector_ = thermal::ThermalDetector(config.thermal);
    if (!config.output.tracks_jsonl.empty()) {
      tracks_out_.open(config.output.tracks_jsonl);
    }
    if (!config.output.segments_jsonl.empty()) {
      segments_out_.open(config.output.segments_jsonl);
    }
  }

  const Activation& activation() const { return activation_; }

  /// Primary box after the last processed frame event, if any.
  struct Primary {
    bool live = false;
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
    double last_update = 0.0;
    SensorMode update_mode = SensorMode::monocular;
    uint64_t id = 0;
  };

  /// Walks events in time order. on_frame(t, mode) fires after the tracker
  /// advanced past a frame event; on_target(t, segment) fires for each
  /// selected lidar target segment. Either callback may return false to stop.
  template <class OnFrame, class OnTarget>
  void walk(OnFrame&& on_frame, OnTarget&& on_target) {
    const auto events = build_events(session_);
    for (const auto& event : events) {
      switch (event.kind) {
        case EventKind::detection: {
          const auto& d = session_.detections[event.index];
          if (select_mode(d.iso, config_.iso_threshold) != SensorMode::monocular) {
            continue;  // thermal branch owns this instant
          }
          ++stats_.frames_processed;
          ++stats_.mono_frames;
          const bool usable = d.score >= config_.detection.min_score;
          step_tracker(event.t, usable ? std::span(&d, 1) : std::span<const io::DetectionRecord>(),
                       SensorMode::monocular);
          if (!on_frame(event.t, SensorMode::monocular)) return;
          break;
        }
        case EventKind::thermal: {
          if (current_mode(event.t) != SensorMode::thermal) {
            continue;
          }
          const auto& entry = session_.thermal[event.index];
          ++stats_.frames_processed;
          ++stats_.thermal_frames;
          std::optional<io::DetectionRecord> detection;
          try {
            io::ThermalFrame frame = io::read_pgm(entry.path);
            frame.timestamp = entry.timestamp;
            detection = detector_.detect(frame);
          } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + " (thermal frame at t=" +
                                      format_timestamp(entry.timestamp) + ")");
          }
          if (detection) {
            detection->frame_id = entry.frame_id;
          }
          step_tracker(event.t,
                       detection ? std::span(&*detection, 1)
                                 : std::span<const io::DetectionRecord>(),
                       SensorMode::thermal);
          if (!on_frame(event.t, SensorMode::thermal)) return;
          break;
        }
        case EventKind::lidar: {
          // The CSV carries no beam geometry; the config's points_per_degree
          // is authoritative.
          io::LidarScan scan = session_.lidar[event.index];
          scan.points_per_degree = config_.lidar.points_per_degree;
          lidar::SegmentationParams params;
          params.gap_mm = config_.lidar.gap_mm;
          params.min_points = config_.lidar.min_points;
          params.max_range_mm = config_.lidar.max_range_mm;
          params.convention = config_.lidar.angle_convention;
          const auto segments = lidar::segment_scan(scan, config_.lidar.zones, params);
          segments_seen_ += segments.size();
          if (segments_out_.is_open()) {
            for (const auto& s : segments) {
              segments_out_ << "{\"timestamp\":" << format_timestamp(event.t)
                            << ",\"start_beam\":" << s.start_beam
                            << ",\"n_points\":" << s.n_points
                            << ",\"D\":" << format_double(s.mean_distance_mm)
                            << ",\"L\":" << format_double(s.cut_length_mm) << "}\n";
            }
          }
          const auto* target =
              lidar::select_target(segments, {config_.lidar.expected_length_mm});
          if (target != nullptr && plausible_target(*target)) {
            if (!on_target(event.t, *target)) return;
          }
          break;
        }
      }
    }
  }

  const Primary& primary() const { return primary_; }
  PipelineStats& stats() { return stats_; }
  double recalibration_window() const { return recal_window_; }
  uint64_t segments_seen() const { return segments_seen_; }

private:
  /// Walls and clutter survive segmentation; only segments near the expected
  /// object length may drive calibration.
  bool plausible_target(const lidar::LidarSegment& segment) const {
    const double expected = config_.lidar.expected_length_mm;
    const double tol = config_.lidar.length_tolerance;
    if (expected <= 0.0 || tol <= 0.0) return true;
    return std::abs(segment.cut_length_mm - expected) <= expected * tol;
  }

  SensorMode current_mode(double t) const {
    if (session_.detections.empty()) return SensorMode::thermal;
    const auto* d = io::nearest_before(std::span(session_.detections), t);
    if (d == nullptr) d = &session_.detections.front();
    return select_mode(d->iso, config_.iso_threshold);
  }

  void step_tracker(double t, std::span<const io::DetectionRecord> detections,
                    SensorMode mode) {
    if (bypass_) {
      if (!detections.empty()) {
        const auto& d = detections.front();
        primary_.live = true;
        primary_.cx = d.cx;
        primary_.cy = d.cy;
        primary_.w = d.w;
        primary_.h = d.h;
        primary_.last_update = t;
        primary_.update_mode = mode;
        primary_.id = d.frame_id;
      } else {
        primary_.live = false;
      }
      return;
    }

    const auto confirmed = tracker_.step(t, detections);
    if (tracks_out_.is_open()) {
      for (const auto& track : confirmed) {
        tracks_out_ << "{\"timestamp\":" << format_timestamp(t) << ",\"id\":" << track.id
                    << ",\"cx\":" << format_double(track.x(0))
                    << ",\"cy\":" << format_double(track.x(1))
                    << ",\"vx\":" << format_double(track.x(2))
                    << ",\"vy\":" << format_double(track.x(3))
                    << ",\"w\":" << format_double(track.box_w)
                    << ",\"h\":" << format_double(track.box_h) << "}\n";
      }
    }
    const track::TrackState* best = nullptr;
    for (const auto& track : confirmed) {
      if (best == nullptr || track.hits > best->hits ||
          (track.hits == best->hits && track.id < best->id)) {
        best = &track;
      }
    }
    if (best == nullptr) {
      primary_.live = false;
      return;
    }
    primary_.live = true;
    primary_.cx = best->x(0);
    primary_.cy = best->x(1);
    primary_.w = best->box_w;
    primary_.h = best->box_h;
    primary_.id = best->id;
    if (best->last_update == t) {
      primary_.update_mode = mode;
    }
    primary_.last_update = best->last_update;
  }

  const io::Session& session_;
  const PipelineConfig& config_;
  bool bypass_;
  track::Tracker tracker_;
  thermal::ThermalDetector detector_{};
  Activation activation_;
  Primary primary_;
  PipelineStats stats_;
  double recal_window_;
  uint64_t segments_seen_ = 0;
  std::ofstream tracks_out_;
  std::ofstream segments_out_;
};

}  // namespace

PipelineResult run_pipeline(const io::Session& session, const CalibrationSet& calibration,
                            const PipelineConfig& config, const PipelineOptions& options) {
  SessionWalker walker(session, config, options.bypass_kalman);

  CalibrationSet live = calibration;
  if (walker.activation().mono && !live.mono) {
    raise(ErrorCode::missing_calibration, "no calibration record for the monocular mode");
  }
  if (walker.activation().thermal && !live.thermal) {
    raise(ErrorCode::missing_calibration, "no calibration record for the thermal mode");
  }

  PipelineResult result;
  bool have_prev = false;
  Vec3 prev_pos;
  double prev_t = 0.0;

  walker.walk(
      [&](double t, SensorMode mode) {
        const auto& primary = walker.primary();
        if (!primary.live || !(primary.w > 0.0)) return true;
        if (have_prev && !(t > prev_t)) return true;

        const auto& calib = live.for_mode(mode);
        const Vec2 image_mm =
            pixel_to_real({primary.cx, primary.cy}, primary.w, calib->object_length_mm);
        const double depth = estimate_depth(primary.w, *calib);
        Vec3 pos = compose_world(image_mm, depth, calib->mount);
        if (mode == SensorMode::thermal) {
          pos = pos + config.thermal_bias_mm;
        }

        WorldState state;
        state.timestamp = t;
        state.position_mm = pos;
        state.velocity_mm_s = have_prev ? velocity(pos, prev_pos, t - prev_t) : Vec3{};
        state.mode = mode;
        result.states.push_back(state);
        have_prev = true;
        prev_pos = pos;
        prev_t = t;
        return true;
      },
      [&](double t, const lidar::LidarSegment& segment) {
        if (!config.lidar.recalibrate) return true;
        const auto& primary = walker.primary();
        if (!primary.live || !(primary.w > 0.0)) return true;
        if (std::abs(t - primary.last_update) > walker.recalibration_window()) return true;

        auto& calib =
            primary.update_mode == SensorMode::monocular ? live.mono : live.thermal;
        if (!calib) return true;
        calib->distance_mm = segment.mean_distance_mm;
        calib->object_length_mm = segment.cut_length_mm;
        calib->object_px = primary.w;
        ++walker.stats().recalibrations;
        return true;
      });

  result.stats = walker.stats();
  result.stats.emitted = result.states.size();
  return result;
}

std::optional<CalibrationRecord> find_calibration(const io::Session& session,
                                                  const PipelineConfig& config) {
  SessionWalker walker(session, config, false);

  std::optional<CalibrationRecord> found;
  double last_mono_frame_px = 0.0;
  double last_thermal_frame_px = 0.0;
  for (const auto& d : session.detections) {
    if (d.frame_width > 0) {
      last_mono_frame_px = d.frame_width;
      break;
    }
  }
  if (!session.thermal.empty()) {
    // Frame length comes from the first thermal frame header.
    const auto frame = io::read_pgm(session.thermal.front().path);
    last_thermal_frame_px = frame.width;
  }

  walker.walk([&](double, SensorMode) { return true; },
              [&](double t, const lidar::LidarSegment& segment) {
                const auto& primary = walker.primary();
                if (!primary.live || !(primary.w > 0.0)) return true;
                if (std::abs(t - primary.last_update) > walker.recalibration_window()) {
                  return true;
                }
                CalibrationRecord r;
                r.mode = primary.update_mode;
                r.distance_mm = segment.mean_distance_mm;
                r.object_px = primary.w;
                r.object_length_mm = segment.cut_length_mm;
                r.frame_px = r.mode == SensorMode::monocular ? last_mono_frame_px
                                                             : last_thermal_frame_px;
                r.mount = r.mode == SensorMode::monocular ? config.mounts.mono
                                                          : config.mounts.thermal;
                found = r;
                return false;  // first co-occurrence wins
              });
  return found;
}

// ---------------------------------------------------------------------------
// Trajectory CSV
// ---------------------------------------------------------------------------

void write_trajectory_csv(const std::filesystem::path& path,
                          std::span<const WorldState> states) {
  std::ofstream out(path);
  if (!out) {
    raise(ErrorCode::io_error, "cannot open for writing: " + path.string());
  }
  out << "timestamp,x,y,z,vx,vy,vz,mode\n";
  std::string row;
  for (const auto& s : states) {
    row.clear();
    row += format_timestamp(s.timestamp);
    for (double v : {s.position_mm.x, s.position_mm.y, s.position_mm.z, s.velocity_mm_s.x,
                     s.velocity_mm_s.y, s.velocity_mm_s.z}) {
      row += ',';
      row += format_double(v);
    }
    row += ',';
    row += to_string(s.mode);
    row += '\n';
    out << row;
  }
}

std::vector<WorldState> read_trajectory_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    raise(ErrorCode::missing_file, "trajectory file not found: " + path.string());
  }
  std::ifstream in(path);
  std::vector<WorldState> states;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("timestamp", 0) == 0) continue;  // header
    WorldState s;
    size_t pos = 0;
    auto next = [&]() -> double {
      const char* begin = line.data() + pos;
      const char* end = line.data() + line.size();
      double value = 0.0;
      auto res = std::from_chars(begin, end, value);
      if (res.ec != std::errc()) {
        raise(ErrorCode::malformed_record,
              path.filename().string() + " line " + std::to_string(line_no) + ": bad number");
      }
      pos = static_cast<size_t>(res.ptr - line.data());
      if (pos < line.size() && line[pos] == ',') ++pos;
      return value;
    };
    s.timestamp = next();
    s.position_mm = {next(), next(), next()};
    s.velocity_mm_s = {next(), next(), next()};
    s.mode = sensor_mode_from_string(line.substr(pos));
    states.push_back(s);
  }
  return states;
}

}  // namespace uav::state
