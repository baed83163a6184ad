#include "uav/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace uav::eval {

Vec3 interpolate_gt(std::span<const io::GroundTruthSample> samples, double t) {
  if (samples.empty()) {
    raise(ErrorCode::out_of_range, "no ground-truth samples");
  }
  if (t < samples.front().timestamp || t > samples.back().timestamp) {
    raise(ErrorCode::out_of_range,
          "t=" + format_double(t) + " outside ground-truth range [" +
              format_double(samples.front().timestamp) + ", " +
              format_double(samples.back().timestamp) + "]");
  }
  // First sample with timestamp >= t.
  size_t lo = 0;
  size_t hi = samples.size();
  while (lo < hi) {
    const size_t mid = lo + (hi - lo) / 2;
    if (samples[mid].timestamp < t) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (samples[lo].timestamp == t) return samples[lo].position_mm;
  const auto& a = samples[lo - 1];
  const auto& b = samples[lo];
  const double u = (t - a.timestamp) / (b.timestamp - a.timestamp);
  return a.position_mm + (b.position_mm - a.position_mm) * u;
}

namespace {

double median_spacing(std::span<const state::WorldState> estimates) {
  if (estimates.size() < 2) return 0.1;
  std::vector<double> gaps;
  gaps.reserve(estimates.size() - 1);
  for (size_t i = 1; i < estimates.size(); ++i) {
    gaps.push_back(estimates[i].timestamp - estimates[i - 1].timestamp);
  }
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  return gaps[gaps.size() / 2];
}

}  // namespace

EvalReport evaluate(std::span<const state::WorldState> estimates,
                    std::span<const io::GroundTruthSample> gt, bool has_presence_flags) {
  if (gt.empty() || estimates.empty()) {
    raise(ErrorCode::no_overlap, "nothing to compare: empty estimates or ground truth");
  }
  const double gt_start = gt.front().timestamp;
  const double gt_end = gt.back().timestamp;

  EvalReport report;
  Vec3 abs_sum;
  double window_start = 0.0;
  double window_end = 0.0;
  for (const auto& est : estimates) {
    if (est.timestamp < gt_start || est.timestamp > gt_end) continue;
    const Vec3 truth = interpolate_gt(gt, est.timestamp);
    const Vec3 err = est.position_mm - truth;
    abs_sum.x += std::abs(err.x);
    abs_sum.y += std::abs(err.y);
    abs_sum.z += std::abs(err.z);
    if (report.n_compared == 0) window_start = est.timestamp;
    window_end = est.timestamp;
    ++report.n_compared;
  }
  if (report.n_compared == 0) {
    raise(ErrorCode::no_overlap, "estimate and ground-truth time ranges are disjoint");
  }
  const double n = static_cast<double>(report.n_compared);
  report.mae_mm = {abs_sum.x / n, abs_sum.y / n, abs_sum.z / n};

  // Trajectory bounding-box extent over the evaluated window, including the
  // interpolated window endpoints.
  Vec3 lo = interpolate_gt(gt, window_start);
  Vec3 hi = lo;
  auto widen = [&](const Vec3& p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  };
  widen(interpolate_gt(gt, window_end));
  for (const auto& s : gt) {
    if (s.timestamp >= window_start && s.timestamp <= window_end) {
      widen(s.position_mm);
    }
  }
  report.extent_mm = {hi.x - lo.x, hi.y - lo.y, hi.z - lo.z};

  for (size_t axis = 0; axis < 3; ++axis) {
    const double extent = report.extent_mm[axis];
    if (extent > 0.0) {
      report.percentage[axis] = report.mae_mm[axis] / extent;
    }
  }

  if (has_presence_flags) {
    // Half the typical estimate spacing, padded for timestamp rounding.
    const double window = 0.5 * median_spacing(estimates) + 1e-9;
    size_t visible = 0;
    size_t covered = 0;
    size_t cursor = 0;
    for (const auto& s : gt) {
      if (!s.visible) continue;
      ++visible;
      while (cursor + 1 < estimates.size() &&
             std::abs(estimates[cursor + 1].timestamp - s.timestamp) <=
                 std::abs(estimates[cursor].timestamp - s.timestamp)) {
        ++cursor;
      }
      if (std::abs(estimates[cursor].timestamp - s.timestamp) <= window) {
        ++covered;
      }
    }
    report.correct_rate = visible == 0 ? 1.0 : static_cast<double>(covered) / visible;
  } else {
    report.correct_rate = 1.0;
  }

  return report;
}

double throughput(uint64_t frames, double wall_time_s) {
  if (!(wall_time_s > 0.0)) {
    raise(ErrorCode::invalid_argument, "wall time must be > 0");
  }
  return static_cast<double>(frames) / wall_time_s;
}

nlohmann::ordered_json report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["mae"] = {{"x", r.mae_mm.x}, {"y", r.mae_mm.y}, {"z", r.mae_mm.z}};
  auto pct = [&](size_t axis) -> nlohmann::ordered_json {
    if (!r.percentage[axis]) return nullptr;
    return *r.percentage[axis];
  };
  j["percentage"] = {{"x", pct(0)}, {"y", pct(1)}, {"z", pct(2)}};
  j["extent"] = {{"x", r.extent_mm.x}, {"y", r.extent_mm.y}, {"z", r.extent_mm.z}};
  j["correct_rate"] = r.correct_rate;
  j["n_compared"] = r.n_compared;
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.mae_mm = {j.at("mae").at("x").get<double>(), j.at("mae").at("y").get<double>(),
              j.at("mae").at("z").get<double>()};
  r.extent_mm = {j.at("extent").at("x").get<double>(), j.at("extent").at("y").get<double>(),
                 j.at("extent").at("z").get<double>()};
  const char* axes[3] = {"x", "y", "z"};
  for (size_t i = 0; i < 3; ++i) {
    const auto& p = j.at("percentage").at(axes[i]);
    if (!p.is_null()) r.percentage[i] = p.get<double>();
  }
  r.correct_rate = j.at("correct_rate").get<double>();
  r.n_compared = j.at("n_compared").get<size_t>();
  return r;
}

std::string report_table(const EvalReport& r) {
  char buf[256];
  std::string out;
  out += "                Mean Absolute Error (mm)      Percentage Error\n";
  out += "                X         Y         Z         X        Y        Z\n";
  auto pct = [&](size_t axis) -> std::string {
    if (!r.percentage[axis]) return "   n/a  ";
    char p[32];
    std::snprintf(p, sizeof(p), "%7.1f%%", *r.percentage[axis] * 100.0);
    return p;
  };
  std::snprintf(buf, sizeof(buf), "Estimate   %9.1f %9.1f %9.1f  %s %s %s\n", r.mae_mm.x,
                r.mae_mm.y, r.mae_mm.z, pct(0).c_str(), pct(1).c_str(), pct(2).c_str());
  out += buf;
  std::snprintf(buf, sizeof(buf), "Correct rate %5.1f%%   (n_compared = %zu)\n",
                r.correct_rate * 100.0, r.n_compared);
  out += buf;
  return out;
}

}  // namespace uav::eval
