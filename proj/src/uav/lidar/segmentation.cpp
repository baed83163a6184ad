#include "uav/lidar/segmentation.hpp"

#include <algorithm>
#include <cmath>

namespace uav::lidar {

AngleConvention angle_convention_from_string(const std::string& name) {
  if (name == "as-printed") return AngleConvention::as_printed;
  if (name == "half-angle") return AngleConvention::half_angle;
  raise(ErrorCode::invalid_config,
        "unknown angle convention '" + name + "' (want as-printed or half-angle)");
}

std::string to_string(AngleConvention convention) {
  return convention == AngleConvention::as_printed ? "as-printed" : "half-angle";
}

SegmentMetrics segment_metrics(std::span<const double> distances_mm, int points_per_degree,
                               AngleConvention convention) {
  if (distances_mm.empty()) {
    raise(ErrorCode::degenerate_segment, "segment has no active points");
  }
  if (points_per_degree < 1) {
    raise(ErrorCode::invalid_argument, "points_per_degree must be >= 1");
  }

  double sum = 0.0;
  for (double d : distances_mm) {
    sum += d;
  }
  const double n = static_cast<double>(distances_mm.size());
  const double mean = sum / n;

  double angle_deg = n / static_cast<double>(points_per_degree);
  if (convention == AngleConvention::half_angle) {
    angle_deg *= 0.5;
  }
  if (angle_deg >= 90.0) {
    raise(ErrorCode::degenerate_segment,
          "segment subtends " + format_double(angle_deg) + " deg; chord length undefined");
  }
  const double length = 2.0 * mean * std::tan(deg_to_rad(angle_deg));
  return {mean, length};
}

namespace {

bool beam_excluded(int beam, double range_mm, std::span<const ExclusionZone> zones) {
  for (const auto& zone : zones) {
    switch (zone.kind) {
      case ExclusionZone::Kind::beam_interval:
        if (beam >= zone.beam_min && beam <= zone.beam_max) return true;
        break;
      case ExclusionZone::Kind::range_band:
        if (range_mm >= zone.range_min_mm && range_mm <= zone.range_max_mm) return true;
        break;
    }
  }
  return false;
}

}  // namespace

std::vector<LidarSegment> segment_scan(const io::LidarScan& scan,
                                       std::span<const ExclusionZone> zones,
                                       const SegmentationParams& params) {
  if (params.min_points < 1) {
    raise(ErrorCode::invalid_argument, "min_points must be >= 1");
  }
  if (!(params.gap_mm > 0.0)) {
    raise(ErrorCode::invalid_argument, "gap_mm must be > 0");
  }

  std::vector<LidarSegment> segments;
  LidarSegment current;
  bool open = false;

  // Runs subtending >= 90 deg (after the convention's halving) have no chord
  // length; nothing that large is a candidate object, so drop them.
  const double halving = params.convention == AngleConvention::half_angle ? 0.5 : 1.0;
  const int max_points = static_cast<int>(
      std::ceil(90.0 / halving * static_cast<double>(scan.points_per_degree))) - 1;

  auto flush = [&]() {
    if (open && current.n_points >= params.min_points && current.n_points <= max_points) {
      auto metrics = segment_metrics(current.distances_mm, scan.points_per_degree,
                                     params.convention);
      current.mean_distance_mm = metrics.mean_distance_mm;
      current.cut_length_mm = metrics.cut_length_mm;
      segments.push_back(std::move(current));
    }
    current = LidarSegment{};
    open = false;
  };

  for (int beam = 0; beam < static_cast<int>(scan.ranges_mm.size()); ++beam) {
    const double range = scan.ranges_mm[beam];
    const bool valid = range > 0.0 && range <= params.max_range_mm &&
                       !beam_excluded(beam, range, zones);
    if (!valid) {
      flush();
      continue;
    }
    if (open && std::abs(range - current.distances_mm.back()) > params.gap_mm) {
      flush();
    }
    if (!open) {
      current.start_beam = beam;
      open = true;
    }
    current.distances_mm.push_back(range);
    current.n_points = static_cast<int>(current.distances_mm.size());
  }
  flush();
  return segments;
}

const LidarSegment* select_target(std::span<const LidarSegment> segments,
                                  const TargetPrior& prior) {
  const LidarSegment* best = nullptr;
  double best_key = 0.0;
  for (const auto& segment : segments) {
    const double key = prior.expected_length_mm > 0.0
                           ? std::abs(segment.cut_length_mm - prior.expected_length_mm)
                           : segment.mean_distance_mm;
    if (best == nullptr || key < best_key) {
      best = &segment;
      best_key = key;
    }
  }
  return best;
}

}  // namespace uav::lidar
