#include "uav/io/session.hpp"

#include <algorithm>

namespace uav::io {

namespace {

template <class Record>
void shift_and_crop(std::vector<Record>& stream, double offset, double duration,
                    const char* stream_name) {
  for (auto& r : stream) {
    r.timestamp += offset;
  }
  double prev = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < stream.size(); ++i) {
    if (!(stream[i].timestamp > prev)) {
      raise(ErrorCode::non_monotonic_timestamps,
            std::string(stream_name) + " stream: timestamps not strictly increasing at record " +
                std::to_string(i));
    }
    prev = stream[i].timestamp;
  }
  if (duration > 0.0) {
    std::erase_if(stream, [&](const Record& r) {
      return r.timestamp < 0.0 || r.timestamp > duration;
    });
  }
}

}  // namespace

Session load_session(const std::filesystem::path& manifest_path) {
  Session session;
  session.manifest = read_manifest(manifest_path);
  const auto& m = session.manifest;

  if (!m.thermal_dir.empty()) {
    session.thermal = read_thermal_index(m.thermal_dir);
  }
  if (!m.lidar_csv.empty()) {
    session.lidar = read_lidar_csv(m.lidar_csv);
  }
  if (!m.detections_jsonl.empty()) {
    session.detections = read_detections_jsonl(m.detections_jsonl);
  }
  if (!m.groundtruth_csv.empty()) {
    auto gt = read_groundtruth_csv(m.groundtruth_csv);
    session.groundtruth = std::move(gt.samples);
    session.groundtruth_has_visibility = gt.has_visibility;
  }

  shift_and_crop(session.thermal, m.offsets.thermal, m.duration, "thermal");
  shift_and_crop(session.lidar, m.offsets.lidar, m.duration, "lidar");
  shift_and_crop(session.detections, m.offsets.detections, m.duration, "detections");
  shift_and_crop(session.groundtruth, m.offsets.groundtruth, m.duration, "groundtruth");

  return session;
}

}  // namespace uav::io
