#include "uav/state/estimator.hpp"

#include <cmath>

namespace uav::state {

std::string to_string(SensorMode mode) {
  return mode == SensorMode::monocular ? "mono" : "thermal";
}

SensorMode sensor_mode_from_string(const std::string& name) {
  if (name == "mono" || name == "monocular") return SensorMode::monocular;
  if (name == "thermal") return SensorMode::thermal;
  raise(ErrorCode::invalid_argument, "unknown sensor mode '" + name + "'");
}

SensorMode select_mode(uint32_t iso, uint32_t threshold) {
  return iso < threshold ? SensorMode::monocular : SensorMode::thermal;
}

Vec2 pixel_to_real(Vec2 pixel, double object_px, double object_length_mm) {
  if (!(object_px > 0.0)) {
    raise(ErrorCode::zero_pixel_length, "object pixel length must be > 0");
  }
  if (!(object_length_mm > 0.0)) {
    raise(ErrorCode::invalid_argument, "object real length must be > 0");
  }
  const double scale = object_length_mm / object_px;
  return {pixel.x * scale, pixel.y * scale};
}

double estimate_depth(double current_object_px, const CalibrationRecord& calib) {
  if (!(current_object_px > 0.0)) {
    raise(ErrorCode::zero_pixel_length, "current object pixel length must be > 0");
  }
  if (!(calib.distance_mm > 0.0) || !(calib.object_px > 0.0)) {
    raise(ErrorCode::missing_calibration, "calibration record is not positive");
  }
  return calib.distance_mm * calib.object_px / current_object_px;
}

Vec3 compose_world(Vec2 image_mm, double depth_mm, const Mount& mount) {
  if (!(depth_mm > 0.0)) {
    raise(ErrorCode::invalid_argument, "depth must be > 0");
  }
  // Camera frame: x lateral, y along the optical axis, z up.
  const double cx = image_mm.x;
  const double cy = depth_mm;
  const double cz = image_mm.y;
  const double yaw = deg_to_rad(mount.yaw_deg);
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * cx - s * cy + mount.dx, s * cx + c * cy + mount.dy, cz + mount.dz};
}

Vec3 velocity(const Vec3& p, const Vec3& p_prev, double dt) {
  if (!(dt > 0.0)) {
    raise(ErrorCode::non_positive_dt, "velocity needs dt > 0, got " + format_double(dt));
  }
  return (p - p_prev) / dt;
}

}  // namespace uav::state
