#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uav/io/types.hpp"

namespace uav::lidar {

/// How the chord length of a segment is derived from its subtended angle.
/// as_printed uses the full angle inside tan; half_angle uses the standard
/// chord construction tan(angle / 2).
enum class AngleConvention { as_printed, half_angle };

AngleConvention angle_convention_from_string(const std::string& name);
std::string to_string(AngleConvention convention);

/// Beams excluded from segmentation, either by beam index interval or by a
/// range band (walls, fixtures).
struct ExclusionZone {
  enum class Kind { beam_interval, range_band };
  Kind kind = Kind::range_band;
  int beam_min = 0;
  int beam_max = 0;  // inclusive
  double range_min_mm = 0.0;
  double range_max_mm = 0.0;  // inclusive
  std::string label;
};

/// A run of consecutive active beams on one object.
struct LidarSegment {
  int start_beam = 0;
  int n_points = 0;
  std::vector<double> distances_mm;
  double mean_distance_mm = 0.0;  // D: mean of member distances
  double cut_length_mm = 0.0;     // L: real length of the object cutting area
};

struct SegmentationParams {
  double gap_mm = 150.0;
  int min_points = 10;
  double max_range_mm = 30000.0;
  AngleConvention convention = AngleConvention::as_printed;
};

/// (D, L) for a run of active beams: D is the mean member distance; the run
/// subtends n_points / points_per_degree degrees and L is the chord computed
/// from that angle per the chosen convention.
struct SegmentMetrics {
  double mean_distance_mm = 0.0;
  double cut_length_mm = 0.0;
};
SegmentMetrics segment_metrics(std::span<const double> distances_mm, int points_per_degree,
                               AngleConvention convention = AngleConvention::as_printed);

/// Groups consecutive valid beams whose adjacent range difference is at most
/// gap_mm. Beams inside any zone, with range <= 0, or beyond max_range are
/// excluded before grouping; runs shorter than min_points are dropped.
/// Output is ordered by start_beam.
std::vector<LidarSegment> segment_scan(const io::LidarScan& scan,
                                       std::span<const ExclusionZone> zones,
                                       const SegmentationParams& params);

/// Picks the tracked object among surviving segments: closest cut length to
/// expected_length_mm when positive, otherwise the nearest segment.
/// Ties break toward the lower start_beam.
struct TargetPrior {
  double expected_length_mm = 0.0;
};
const LidarSegment* select_target(std::span<const LidarSegment> segments,
                                  const TargetPrior& prior = {});

}  // namespace uav::lidar
