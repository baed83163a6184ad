#include "uav/track/tracker.hpp"

#include <algorithm>
#include <cmath>

namespace uav::track {

Assignment associate(std::span<const TrackState> tracks,
                     std::span<const io::DetectionRecord> detections, double gate_px) {
  struct Candidate {
    double distance;
    size_t track;
    size_t detection;
  };
  std::vector<Candidate> candidates;
  for (size_t ti = 0; ti < tracks.size(); ++ti) {
    for (size_t di = 0; di < detections.size(); ++di) {
      const double dx = tracks[ti].x(0) - detections[di].cx;
      const double dy = tracks[ti].x(1) - detections[di].cy;
      const double dist = std::hypot(dx, dy);
      if (dist <= gate_px) {
        candidates.push_back({dist, ti, di});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (tracks[a.track].id != tracks[b.track].id) return tracks[a.track].id < tracks[b.track].id;
    return a.detection < b.detection;
  });

  Assignment out;
  std::vector<bool> track_used(tracks.size(), false);
  std::vector<bool> detection_used(detections.size(), false);
  for (const auto& c : candidates) {
    if (track_used[c.track] || detection_used[c.detection]) continue;
    track_used[c.track] = true;
    detection_used[c.detection] = true;
    out.matches.emplace_back(c.track, c.detection);
  }
  for (size_t ti = 0; ti < tracks.size(); ++ti) {
    if (!track_used[ti]) out.unmatched_tracks.push_back(ti);
  }
  for (size_t di = 0; di < detections.size(); ++di) {
    if (!detection_used[di]) out.unmatched_detections.push_back(di);
  }
  return out;
}

std::vector<TrackState> Tracker::step(double t,
                                      std::span<const io::DetectionRecord> detections) {
  if (stepped_ && t < last_time_) {
    raise(ErrorCode::time_regression,
          "step at t=" + format_double(t) + " precedes last step t=" + format_double(last_time_));
  }
  const double dt = stepped_ ? t - last_time_ : 0.0;
  last_time_ = t;
  stepped_ = true;

  if (dt > 0.0) {
    for (auto& track : tracks_) {
      track = kalman_predict(track, dt, config_);
    }
  }

  const Assignment assignment = associate(tracks_, detections, config_.gate_px);

  for (const auto& [ti, di] : assignment.matches) {
    const auto& d = detections[di];
    tracks_[ti] = kalman_update(tracks_[ti], d.cx, d.cy, config_);
    tracks_[ti].last_update = t;
    tracks_[ti].box_w = d.w;
    tracks_[ti].box_h = d.h;
  }
  for (size_t ti : assignment.unmatched_tracks) {
    ++tracks_[ti].misses;
  }
  std::erase_if(tracks_, [&](const TrackState& tr) { return tr.misses > config_.max_misses; });

  for (size_t di : assignment.unmatched_detections) {
    const auto& d = detections[di];
    TrackState track;
    track.x << d.cx, d.cy, 0.0, 0.0;
    track.P = Eigen::Matrix4d::Zero();
    track.P(0, 0) = track.P(1, 1) = config_.measurement_noise;
    track.P(2, 2) = track.P(3, 3) = config_.init_velocity_var;
    track.last_update = t;
    track.hits = 1;
    track.misses = 0;
    track.id = next_id_++;
    track.box_w = d.w;
    track.box_h = d.h;
    tracks_.push_back(std::move(track));
  }

  std::vector<TrackState> confirmed;
  for (const auto& track : tracks_) {
    if (track.hits >= config_.min_hits) {
      confirmed.push_back(track);
    }
  }
  return confirmed;
}

}  // namespace uav::track
