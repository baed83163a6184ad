#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "testutil.hpp"
#include "uav/eval/metrics.hpp"
#include "uav/synth/splitmix.hpp"

using namespace uav;
using namespace uav::eval;
using uav::io::GroundTruthSample;
using uav::state::SensorMode;
using uav::state::WorldState;

namespace {

std::vector<GroundTruthSample> line_gt() {
  return {{0.0, {0.0, 0.0, 0.0}, true}, {2.0, {2.0, 0.0, 0.0}, true}};
}

WorldState est(double t, Vec3 p) {
  WorldState s;
  s.timestamp = t;
  s.position_mm = p;
  s.mode = SensorMode::monocular;
  return s;
}

}  // namespace

TEST_CASE("linear interpolation of ground truth") {
  auto gt = line_gt();
  const Vec3 mid = interpolate_gt(gt, 1.0);
  CHECK(mid.x == doctest::Approx(1.0));
  CHECK(mid.y == 0.0);

  const Vec3 exact = interpolate_gt(gt, 2.0);
  CHECK(exact.x == 2.0);

  CHECK_THROWS_AS(interpolate_gt(gt, -0.1), Error);
  CHECK_THROWS_AS(interpolate_gt(gt, 2.1), Error);
}

TEST_CASE("interpolation matches a per-segment two-point oracle") {
  synth::SplitMix64 rng(3);
  std::vector<GroundTruthSample> gt;
  double t = 0.0;
  for (int i = 0; i < 50; ++i) {
    gt.push_back({t, {rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3), rng.uniform(0, 3e3)},
                  true});
    t += rng.uniform(0.01, 0.2);
  }
  for (int probe = 0; probe < 100; ++probe) {
    const double tp = rng.uniform(gt.front().timestamp, gt.back().timestamp);
    // independent oracle: scan for the bracketing segment
    size_t k = 0;
    while (k + 2 < gt.size() && gt[k + 1].timestamp < tp) ++k;
    const auto& a = gt[k];
    const auto& b = gt[k + 1];
    const double u = (tp - a.timestamp) / (b.timestamp - a.timestamp);
    const Vec3 want = {a.position_mm.x * (1 - u) + b.position_mm.x * u,
                       a.position_mm.y * (1 - u) + b.position_mm.y * u,
                       a.position_mm.z * (1 - u) + b.position_mm.z * u};
    const Vec3 got = interpolate_gt(gt, tp);
    CHECK(std::abs(got.x - want.x) <= 1e-9 * std::max(1.0, std::abs(want.x)));
    CHECK(std::abs(got.y - want.y) <= 1e-9 * std::max(1.0, std::abs(want.y)));
    CHECK(std::abs(got.z - want.z) <= 1e-9 * std::max(1.0, std::abs(want.z)));
  }
}

TEST_CASE("evaluate: estimates equal to ground truth give zero error") {
  std::vector<GroundTruthSample> gt;
  for (int i = 0; i <= 20; ++i) {
    gt.push_back({0.1 * i, {10.0 * i, 5.0 * i, 2.0 * i}, true});
  }
  std::vector<WorldState> estimates;
  for (const auto& s : gt) estimates.push_back(est(s.timestamp, s.position_mm));

  auto report = evaluate(estimates, gt, false);
  CHECK(report.mae_mm.x == 0.0);
  CHECK(report.mae_mm.y == 0.0);
  CHECK(report.mae_mm.z == 0.0);
  REQUIRE(report.percentage[0].has_value());
  CHECK(*report.percentage[0] == 0.0);
  CHECK(report.correct_rate == 1.0);
  CHECK(report.n_compared == gt.size());
}

TEST_CASE("evaluate reproduces the published ratio from MAE and extent") {
  // MAE 112.1 mm against an extent of 2198.0 mm is a 5.1% error.
  const double mae = 112.1;
  const double extent = 2198.0;
  std::vector<GroundTruthSample> gt = {{0.0, {0.0, 0.0, 0.0}, true},
                                       {1.0, {extent, extent, extent}, true}};
  std::vector<WorldState> estimates = {
      est(0.0, {mae, mae, mae}), est(1.0, {extent + mae, extent + mae, extent + mae})};
  auto report = evaluate(estimates, gt, false);
  CHECK(report.mae_mm.x == doctest::Approx(mae).epsilon(1e-12));
  CHECK(report.extent_mm.x == doctest::Approx(extent).epsilon(1e-12));
  REQUIRE(report.percentage[0].has_value());
  CHECK(*report.percentage[0] * 100.0 == doctest::Approx(5.1).epsilon(2e-3));
}

TEST_CASE("correct rate counts covered visible samples") {
  // 100 visible ground-truth frames at 1 Hz; estimates on 92 of them.
  std::vector<GroundTruthSample> gt;
  for (int i = 0; i < 100; ++i) {
    gt.push_back({static_cast<double>(i), {0.0, 0.0, 0.0}, true});
  }
  std::vector<WorldState> estimates;
  for (int i = 0; i < 100; ++i) {
    if (i % 12 == 7) continue;  // drop 8 of 100
    estimates.push_back(est(static_cast<double>(i), {0.0, 0.0, 0.0}));
  }
  REQUIRE(estimates.size() == 92);
  auto report = evaluate(estimates, gt, true);
  CHECK(report.correct_rate == doctest::Approx(0.92));
}

TEST_CASE("invisible samples leave the denominator") {
  std::vector<GroundTruthSample> gt;
  for (int i = 0; i < 10; ++i) {
    gt.push_back({static_cast<double>(i), {0.0, 0.0, 0.0}, i < 5});
  }
  std::vector<WorldState> estimates;
  for (int i = 0; i < 5; ++i) {
    estimates.push_back(est(static_cast<double>(i), {0.0, 0.0, 0.0}));
  }
  auto report = evaluate(estimates, gt, true);
  CHECK(report.correct_rate == doctest::Approx(1.0));
}

TEST_CASE("disjoint ranges raise no_overlap") {
  auto gt = line_gt();
  std::vector<WorldState> estimates = {est(5.0, {0, 0, 0}), est(6.0, {0, 0, 0})};
  try {
    evaluate(estimates, gt, false);
    FAIL("expected no_overlap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_overlap);
  }
}

TEST_CASE("zero extent reports undefined percentage") {
  std::vector<GroundTruthSample> gt = {{0.0, {5.0, 1.0, 2.0}, true},
                                       {1.0, {5.0, 2.0, 3.0}, true}};
  std::vector<WorldState> estimates = {est(0.0, {6.0, 1.0, 2.0}), est(1.0, {6.0, 2.0, 3.0})};
  auto report = evaluate(estimates, gt, false);
  CHECK(!report.percentage[0].has_value());  // x never moves
  CHECK(report.percentage[1].has_value());
  CHECK(report.mae_mm.x == doctest::Approx(1.0));

  auto j = report_to_json(report);
  CHECK(j["percentage"]["x"].is_null());
  auto parsed = report_from_json(j);
  CHECK(!parsed.percentage[0].has_value());
  CHECK(parsed.mae_mm.x == doctest::Approx(1.0));
}

TEST_CASE("evaluate is invariant to a uniform time shift") {
  synth::SplitMix64 rng(17);
  std::vector<GroundTruthSample> gt;
  std::vector<WorldState> estimates;
  for (int i = 0; i <= 50; ++i) {
    const double t = 0.1 * i;
    const Vec3 p = {std::sin(t) * 500.0, t * 100.0, std::cos(t) * 200.0};
    gt.push_back({t, p, true});
    if (i % 2 == 0) {
      estimates.push_back(
          est(t, p + Vec3{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20)}));
    }
  }
  auto base = evaluate(estimates, gt, true);

  const double shift = 1234.5;
  auto gt2 = gt;
  auto est2 = estimates;
  for (auto& s : gt2) s.timestamp += shift;
  for (auto& s : est2) s.timestamp += shift;
  auto shifted = evaluate(est2, gt2, true);

  CHECK(shifted.mae_mm.x == doctest::Approx(base.mae_mm.x).epsilon(1e-9));
  CHECK(shifted.mae_mm.y == doctest::Approx(base.mae_mm.y).epsilon(1e-9));
  CHECK(shifted.extent_mm.z == doctest::Approx(base.extent_mm.z).epsilon(1e-9));
  CHECK(shifted.correct_rate == doctest::Approx(base.correct_rate));
}

TEST_CASE("constant offset on one axis moves MAE by exactly that offset") {
  std::vector<GroundTruthSample> gt;
  for (int i = 0; i <= 20; ++i) {
    gt.push_back({0.1 * i, {10.0 * i, 0.0, 0.0}, true});
  }
  std::vector<WorldState> estimates;
  for (const auto& s : gt) estimates.push_back(est(s.timestamp, s.position_mm));

  auto base = evaluate(estimates, gt, false);
  CHECK(base.mae_mm.x == 0.0);

  const double offset = 17.25;
  for (auto& s : estimates) s.position_mm.x += offset;
  auto shifted = evaluate(estimates, gt, false);
  CHECK(shifted.mae_mm.x == doctest::Approx(offset).epsilon(1e-12));

  // With preexisting error the increase is bounded by |offset|.
  synth::SplitMix64 rng(7);
  for (auto& s : estimates) s.position_mm.x += rng.uniform(-30.0, 30.0);
  auto noisy = evaluate(estimates, gt, false);
  for (auto& s : estimates) s.position_mm.x += offset;
  auto noisy_shifted = evaluate(estimates, gt, false);
  CHECK(noisy_shifted.mae_mm.x <= noisy.mae_mm.x + offset + 1e-9);
  CHECK(noisy_shifted.mae_mm.x >= noisy.mae_mm.x - offset - 1e-9);
}

TEST_CASE("percentage times extent reconstructs MAE") {
  synth::SplitMix64 rng(29);
  std::vector<GroundTruthSample> gt;
  std::vector<WorldState> estimates;
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.05 * i;
    const Vec3 p = {std::sin(0.7 * t) * 900.0, 2000.0 + std::cos(t) * 400.0, 150.0 * t};
    gt.push_back({t, p, true});
    estimates.push_back(
        est(t, p + Vec3{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)}));
  }
  auto report = evaluate(estimates, gt, false);
  for (size_t axis = 0; axis < 3; ++axis) {
    REQUIRE(report.percentage[axis].has_value());
    const double reconstructed = *report.percentage[axis] * report.extent_mm[axis];
    CHECK(std::abs(reconstructed - report.mae_mm[axis]) <=
          1e-9 * std::max(1.0, report.mae_mm[axis]));
  }
}

TEST_CASE("throughput arithmetic") {
  CHECK(throughput(1020, 60.0) == doctest::Approx(17.0).epsilon(1e-12));
  CHECK(throughput(8160, 60.0) == doctest::Approx(136.0).epsilon(1e-12));
  CHECK(throughput(0, 5.0) == 0.0);
  CHECK_THROWS_AS(throughput(10, 0.0), Error);
}

TEST_CASE("report table renders and svg plots are written") {
  testutil::TempDir tmp("plots");
  std::vector<GroundTruthSample> gt;
  std::vector<WorldState> estimates;
  for (int i = 0; i <= 30; ++i) {
    const double t = 0.1 * i;
    const Vec3 p = {std::sin(t) * 100.0, 3000.0, 1500.0 + 10.0 * t};
    gt.push_back({t, p, true});
    estimates.push_back(est(t, p + Vec3{5.0, -8.0, 3.0}));
  }
  auto report = evaluate(estimates, gt, true);
  const std::string table = report_table(report);
  CHECK(table.find("Percentage Error") != std::string::npos);

  write_svg_plots(tmp.path(), estimates, gt);
  for (const char* name : {"plot_x.svg", "plot_y.svg", "plot_z.svg"}) {
    CHECK(std::filesystem::exists(tmp.path() / name));
    CHECK(std::filesystem::file_size(tmp.path() / name) > 200);
  }
}
