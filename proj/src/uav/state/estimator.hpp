#pragma once

#include <cstdint>
#include <string>

#include "uav/common.hpp"

namespace uav::state {

/// Which sensor branch processes a frame; exactly one is active per frame.
enum class SensorMode { monocular, thermal };

std::string to_string(SensorMode mode);
SensorMode sensor_mode_from_string(const std::string& name);

/// Light gate: below the ISO threshold the monocular branch runs, at or
/// above it the thermal branch runs.
SensorMode select_mode(uint32_t iso, uint32_t threshold = 6400);

/// Rigid transform from the camera frame (x right, y optical axis,
/// z up) into the global frame: yaw about +z, then translation.
struct Mount {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
  double yaw_deg = 0.0;
};

/// The (distance, pixel length, real length) triple captured when the range
/// sensor and a camera observe the target simultaneously. Anchors the
/// pixel-ratio depth estimate; one record per sensor mode.
struct CalibrationRecord {
  SensorMode mode = SensorMode::monocular;
  double distance_mm = 0.0;       // D_c: real distance at calibration
  double object_px = 0.0;         // l_c: object pixel length at calibration
  double object_length_mm = 0.0;  // L: real object length
  double frame_px = 0.0;          // f: total pixel length of the frame
  Mount mount;
};

/// Scales a center-origin pixel coordinate to millimeters in the image
/// plane: each coordinate times object_length_mm / object_px.
Vec2 pixel_to_real(Vec2 pixel, double object_px, double object_length_mm);

/// Depth from apparent size: distance_mm * object_px(calibration) / current
/// pixel length. Same-size objects farther away look smaller by the ratio.
double estimate_depth(double current_object_px, const CalibrationRecord& calib);

/// Places an image-plane point at the estimated depth and maps it into the
/// global frame: camera vector (x_img, depth, y_img) rotated by the mount
/// yaw and translated by the mount offset.
Vec3 compose_world(Vec2 image_mm, double depth_mm, const Mount& mount);

/// Componentwise difference quotient (p - p_prev) / dt.
Vec3 velocity(const Vec3& p, const Vec3& p_prev, double dt);

/// Final per-frame output: global position (mm) and velocity (mm/s).
struct WorldState {
  double timestamp = 0.0;
  Vec3 position_mm;
  Vec3 velocity_mm_s;
  SensorMode mode = SensorMode::monocular;
};

}  // namespace uav::state
