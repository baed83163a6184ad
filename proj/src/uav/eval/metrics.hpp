#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "uav/io/types.hpp"
#include "uav/state/estimator.hpp"

namespace uav::eval {

struct Axis3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double operator[](size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

/// Quantitative comparison of a trajectory against interpolated ground truth.
/// percentage[i] is empty where the ground-truth extent on that axis is zero.
struct EvalReport {
  Axis3 mae_mm;
  Axis3 extent_mm;
  std::array<std::optional<double>, 3> percentage;  // fraction, mae / extent
  double correct_rate = 1.0;
  size_t n_compared = 0;
};

/// Piecewise-linear interpolation of the ground-truth polyline at time t.
/// t must lie within [first, last] sample time.
Vec3 interpolate_gt(std::span<const io::GroundTruthSample> samples, double t);

/// Compares estimates against interpolated ground truth at the estimate
/// timestamps. MAE and extent are computed over the evaluated window.
/// When the samples carry visibility flags, correct_rate is the fraction of
/// visible ground-truth samples having an estimate within half the median
/// estimate spacing; without flags it is 1.0.
EvalReport evaluate(std::span<const state::WorldState> estimates,
                    std::span<const io::GroundTruthSample> gt, bool has_presence_flags);

/// frames / wall_time.
double throughput(uint64_t frames, double wall_time_s);

nlohmann::ordered_json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

/// Aligned plain-text table (MAE / percentage per axis plus correct rate).
std::string report_table(const EvalReport& report);

/// Per-axis estimate-vs-ground-truth curves as standalone SVG files
/// (plot_x.svg, plot_y.svg, plot_z.svg) in the given directory.
void write_svg_plots(const std::filesystem::path& dir,
                     std::span<const state::WorldState> estimates,
                     std::span<const io::GroundTruthSample> gt);

}  // namespace uav::eval
