#include "uav/track/kalman.hpp"

namespace uav::track {

namespace {

void symmetrize(Eigen::Matrix4d& P) { P = ((P + P.transpose()) * 0.5).eval(); }

}  // namespace

TrackState kalman_predict(const TrackState& track, double dt, const KalmanConfig& cfg) {
  if (!(dt > 0.0)) {
    raise(ErrorCode::non_positive_dt, "predict needs dt > 0, got " + format_double(dt));
  }

  Eigen::Matrix4d F = Eigen::Matrix4d::Identity();
  F(0, 2) = dt;
  F(1, 3) = dt;

  const double q = cfg.process_noise;
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  Eigen::Matrix4d Q = Eigen::Matrix4d::Zero();
  Q(0, 0) = Q(1, 1) = q * dt3 / 3.0;
  Q(0, 2) = Q(2, 0) = Q(1, 3) = Q(3, 1) = q * dt2 / 2.0;
  Q(2, 2) = Q(3, 3) = q * dt;

  TrackState out = track;
  out.x = F * track.x;
  out.P = F * track.P * F.transpose() + Q;
  symmetrize(out.P);
  return out;
}

TrackState kalman_update(const TrackState& track, double zx, double zy,
                         const KalmanConfig& cfg) {
  if (!track.x.allFinite() || !track.P.allFinite()) {
    raise(ErrorCode::numerical_breakdown, "track state is not finite");
  }

  Eigen::Matrix<double, 2, 4> H = Eigen::Matrix<double, 2, 4>::Zero();
  H(0, 0) = 1.0;
  H(1, 1) = 1.0;
  const Eigen::Matrix2d R = Eigen::Matrix2d::Identity() * cfg.measurement_noise;

  const Eigen::Matrix2d S = H * track.P * H.transpose() + R;
  const double det = S.determinant();
  if (!(std::abs(det) > 1e-300) || !S.allFinite()) {
    raise(ErrorCode::numerical_breakdown, "innovation covariance is singular");
  }
  const Eigen::Matrix<double, 4, 2> K = track.P * H.transpose() * S.inverse();

  const Eigen::Vector2d innovation(zx - track.x(0), zy - track.x(1));

  TrackState out = track;
  out.x = track.x + K * innovation;
  const Eigen::Matrix4d IKH = Eigen::Matrix4d::Identity() - K * H;
  out.P = IKH * track.P * IKH.transpose() + K * R * K.transpose();
  symmetrize(out.P);
  out.hits = track.hits + 1;
  out.misses = 0;
  return out;
}

}  // namespace uav::track
