#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "uav/common.hpp"

namespace uav::track {

struct KalmanConfig {
  double process_noise = 50.0;       // acceleration intensity q, px^2/s^3
  double measurement_noise = 4.0;    // r, px^2
  double init_velocity_var = 2.5e5;  // px^2/s^2, spawned tracks know nothing about velocity
  double gate_px = 50.0;
  int max_misses = 15;
  int min_hits = 3;
};

/// Pixel-space track: state [cx, cy, vx, vy] with 4x4 covariance.
/// Box size (w, h) is carried through from the latest matched detection and
/// is not filtered. Covariance stays symmetric positive semidefinite through
/// every predict/update.
struct TrackState {
  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  Eigen::Matrix4d P = Eigen::Matrix4d::Identity();
  double last_update = 0.0;
  int misses = 0;
  int hits = 0;
  uint64_t id = 0;
  double box_w = 0.0;
  double box_h = 0.0;
};

/// Constant-velocity time update over dt seconds with piecewise-white-
/// acceleration process noise. Pure function; raises non_positive_dt.
TrackState kalman_predict(const TrackState& track, double dt, const KalmanConfig& cfg);

/// Measurement update with z = (cx, cy), R = r*I2, Joseph-form covariance.
/// Pure function; raises numerical_breakdown when the innovation covariance
/// is singular to working precision.
TrackState kalman_update(const TrackState& track, double zx, double zy,
                         const KalmanConfig& cfg);

}  // namespace uav::track
