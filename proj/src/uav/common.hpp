#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace uav {

enum class ErrorCode {
  io_error,
  missing_file,
  malformed_record,
  non_monotonic_timestamps,
  degenerate_segment,
  empty_frame,
  degenerate_histogram,
  non_positive_dt,
  numerical_breakdown,
  time_regression,
  zero_pixel_length,
  out_of_range,
  no_overlap,
  missing_calibration,
  missing_stream,
  no_cooccurrence,
  invalid_spec,
  invalid_config,
  invalid_argument,
};

/// Exception carrying a stable error code; the C API maps codes to uvt_status.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
};

inline double deg_to_rad(double deg) { return deg * (M_PI / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / M_PI); }

/// Shortest decimal representation that round-trips exactly.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Fixed microsecond precision, used for every serialized timestamp.
inline std::string format_timestamp(double t) {
  char buf[48];
  int n = std::snprintf(buf, sizeof(buf), "%.6f", t);
  return std::string(buf, static_cast<size_t>(n));
}

}  // namespace uav
