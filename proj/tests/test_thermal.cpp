#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "testutil.hpp"
#include "uav/synth/scenario.hpp"
#include "uav/thermal/detect.hpp"

using namespace uav;
using namespace uav::thermal;

namespace {

io::ThermalFrame frame_of(uint32_t w, uint32_t h, uint8_t value) {
  io::ThermalFrame f;
  f.width = w;
  f.height = h;
  f.pixels.assign(static_cast<size_t>(w) * h, value);
  return f;
}

void paint_rect(io::ThermalFrame& f, int x0, int y0, int w, int h, uint8_t value) {
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) {
      f.pixels[static_cast<size_t>(y) * f.width + x] = value;
    }
  }
}

}  // namespace

TEST_CASE("histogram basics") {
  SUBCASE("constant frame has a single bin") {
    auto h = histogram(frame_of(8, 8, 7));
    CHECK(h.p[7] == doctest::Approx(1.0));
    for (int g = 0; g < 256; ++g) {
      if (g != 7) CHECK(h.p[g] == 0.0);
    }
  }
  SUBCASE("half and half splits evenly") {
    io::ThermalFrame f = frame_of(16, 16, 0);
    paint_rect(f, 0, 0, 16, 8, 255);
    auto h = histogram(f);
    CHECK(h.p[0] == doctest::Approx(0.5));
    CHECK(h.p[255] == doctest::Approx(0.5));
  }
  SUBCASE("random frame sums to one") {
    synth::SplitMix64 rng(3);
    io::ThermalFrame f = frame_of(64, 64, 0);
    std::array<uint64_t, 256> counts{};
    for (auto& px : f.pixels) {
      px = static_cast<uint8_t>(rng.next() & 0xFF);
      ++counts[px];
    }
    auto h = histogram(f);
    double sum = 0.0;
    for (int g = 0; g < 256; ++g) {
      sum += h.p[g];
      CHECK(h.p[g] == doctest::Approx(counts[g] / 4096.0).epsilon(1e-12));
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
  SUBCASE("empty frame raises") {
    io::ThermalFrame f;
    CHECK_THROWS_AS(histogram(f), Error);
  }
}

TEST_CASE("max correlation threshold separates a bimodal histogram") {
  GrayHistogram h;
  h.n_pixels = 1000;
  h.p[10] = 0.9;
  h.p[200] = 0.1;
  const int t = max_correlation_threshold(h);
  CHECK(t >= 10);
  CHECK(t <= 199);
  CHECK(t == testutil::brute_force_max_correlation(h.p));
}

TEST_CASE("degenerate histogram raises") {
  GrayHistogram h;
  h.n_pixels = 100;
  h.p[42] = 1.0;
  try {
    max_correlation_threshold(h);
    FAIL("expected degenerate_histogram");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_histogram);
  }
}

TEST_CASE("threshold equals exhaustive search on 100 generated histograms") {
  auto cases = synth::gen_histogram_cases(77, 100, false);
  REQUIRE(cases.size() == 100);
  for (const auto& c : cases) {
    const int got = max_correlation_threshold(c.histogram);
    const int want = testutil::brute_force_max_correlation(c.histogram.p);
    CHECK(got == want);
  }
}

TEST_CASE("threshold shifts with a constant gray offset") {
  auto cases = synth::gen_histogram_cases(17, 20, false);
  for (const auto& c : cases) {
    // Find how much headroom the histogram has before clipping.
    int hi = 255;
    while (hi > 0 && c.histogram.p[hi] == 0.0) --hi;
    const int shift = std::min(20, 255 - hi);
    if (shift == 0) continue;
    GrayHistogram shifted;
    shifted.n_pixels = c.histogram.n_pixels;
    for (int g = 0; g + shift < 256; ++g) {
      shifted.p[g + shift] = c.histogram.p[g];
    }
    CHECK(max_correlation_threshold(shifted) ==
          max_correlation_threshold(c.histogram) + shift);
  }
}

TEST_CASE("binarize marks the hot class") {
  SUBCASE("threshold 254 with no saturated pixels gives an empty mask") {
    io::ThermalFrame f = frame_of(8, 8, 200);
    auto mask = binarize(f, 254);
    for (uint8_t b : mask.bits) CHECK(b == 0);
  }
  SUBCASE("checkerboard") {
    io::ThermalFrame f = frame_of(2, 2, 0);
    f.pixels = {0, 255, 255, 0};
    auto mask = binarize(f, 127);
    CHECK(mask.bits == std::vector<uint8_t>{0, 1, 1, 0});
  }
  SUBCASE("hot square exactly recovered") {
    io::ThermalFrame f = frame_of(32, 32, 30);
    paint_rect(f, 10, 12, 5, 5, 220);
    const int t = max_correlation_threshold(histogram(f));
    auto mask = binarize(f, t);
    for (uint32_t y = 0; y < 32; ++y) {
      for (uint32_t x = 0; x < 32; ++x) {
        const bool inside = x >= 10 && x < 15 && y >= 12 && y < 17;
        CHECK(mask.at(x, y) == inside);
      }
    }
  }
}

TEST_CASE("postprocess morphology") {
  SUBCASE("zero radii are the identity") {
    synth::SplitMix64 rng(9);
    BinaryMask m;
    m.width = 20;
    m.height = 20;
    m.bits.resize(400);
    for (auto& b : m.bits) b = rng.next_double() < 0.5 ? 1 : 0;
    auto out = postprocess(m, 0, 0);
    CHECK(out.bits == m.bits);
  }
  SUBCASE("opening removes an isolated pixel") {
    BinaryMask m;
    m.width = 9;
    m.height = 9;
    m.bits.assign(81, 0);
    m.bits[4 * 9 + 4] = 1;
    auto out = postprocess(m, 1, 0);
    for (uint8_t b : out.bits) CHECK(b == 0);
  }
  SUBCASE("closing fills an interior hole") {
    BinaryMask m;
    m.width = 20;
    m.height = 20;
    m.bits.assign(400, 0);
    for (int y = 5; y < 15; ++y) {
      for (int x = 5; x < 15; ++x) m.bits[y * 20 + x] = 1;
    }
    m.bits[9 * 20 + 9] = 0;
    auto out = postprocess(m, 0, 1);
    for (int y = 5; y < 15; ++y) {
      for (int x = 5; x < 15; ++x) CHECK(out.bits[y * 20 + x] == 1);
    }
  }
  SUBCASE("matches the reference operator on random masks") {
    synth::SplitMix64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      BinaryMask m;
      m.width = 24;
      m.height = 16;
      m.bits.resize(24 * 16);
      for (auto& b : m.bits) b = rng.next_double() < 0.45 ? 1 : 0;
      const int r = 1 + static_cast<int>(rng.uniform(0.0, 2.0));

      auto eroded = testutil::morph_oracle(m.bits, 24, 16, r, true);
      auto opened = testutil::morph_oracle(eroded, 24, 16, r, false);
      auto open_out = postprocess(m, r, 0);
      CHECK(open_out.bits == opened);

      auto dilated = testutil::morph_oracle(m.bits, 24, 16, r, false);
      auto closed = testutil::morph_oracle(dilated, 24, 16, r, true);
      auto close_out = postprocess(m, 0, r);
      CHECK(close_out.bits == closed);
    }
  }
  SUBCASE("opening is idempotent") {
    synth::SplitMix64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
      BinaryMask m;
      m.width = 30;
      m.height = 22;
      m.bits.resize(30 * 22);
      for (auto& b : m.bits) b = rng.next_double() < 0.5 ? 1 : 0;
      auto once = postprocess(m, 1, 0);
      auto twice = postprocess(once, 1, 0);
      CHECK(twice.bits == once.bits);
    }
  }
}

TEST_CASE("extract_blobs ordering and partition property") {
  SUBCASE("empty mask") {
    BinaryMask m;
    m.width = 8;
    m.height = 8;
    m.bits.assign(64, 0);
    CHECK(extract_blobs(m).empty());
  }
  SUBCASE("single square") {
    BinaryMask m;
    m.width = 16;
    m.height = 16;
    m.bits.assign(256, 0);
    for (int y = 3; y < 8; ++y) {
      for (int x = 4; x < 9; ++x) m.bits[y * 16 + x] = 1;
    }
    auto blobs = extract_blobs(m);
    REQUIRE(blobs.size() == 1);
    CHECK(blobs[0].w == 5);
    CHECK(blobs[0].h == 5);
    CHECK(blobs[0].area == 25);
    // center-origin: columns 4..8 center 6 -> 6 - 7.5 = -1.5
    CHECK(blobs[0].cx == doctest::Approx(-1.5));
    // rows 3..7 center 5 -> 7.5 - 5 = 2.5
    CHECK(blobs[0].cy == doctest::Approx(2.5));
  }
  SUBCASE("two squares ordered by area") {
    BinaryMask m;
    m.width = 20;
    m.height = 20;
    m.bits.assign(400, 0);
    for (int y = 2; y < 7; ++y) {
      for (int x = 2; x < 7; ++x) m.bits[y * 20 + x] = 1;
    }
    for (int y = 12; y < 15; ++y) {
      for (int x = 12; x < 15; ++x) m.bits[y * 20 + x] = 1;
    }
    auto blobs = extract_blobs(m);
    REQUIRE(blobs.size() == 2);
    CHECK(blobs[0].area == 25);
    CHECK(blobs[1].area == 9);
  }
  SUBCASE("diagonal pixels are 8-connected") {
    BinaryMask m;
    m.width = 4;
    m.height = 4;
    m.bits.assign(16, 0);
    m.bits[0] = 1;
    m.bits[1 * 4 + 1] = 1;
    m.bits[2 * 4 + 2] = 1;
    auto blobs = extract_blobs(m);
    REQUIRE(blobs.size() == 1);
    CHECK(blobs[0].area == 3);
  }
  SUBCASE("areas partition the set bits and boxes match flood fill") {
    synth::SplitMix64 rng(53);
    for (int trial = 0; trial < 30; ++trial) {
      BinaryMask m;
      m.width = 32;
      m.height = 24;
      m.bits.resize(32 * 24);
      uint64_t set = 0;
      for (auto& b : m.bits) {
        b = rng.next_double() < 0.35 ? 1 : 0;
        set += b;
      }
      auto blobs = extract_blobs(m);
      uint64_t total = 0;
      for (const auto& b : blobs) total += b.area;
      CHECK(total == set);

      auto oracle = testutil::flood_fill_blobs(m.bits, 32, 24);
      CHECK(oracle.size() == blobs.size());
      std::multiset<uint64_t> got, want;
      for (const auto& b : blobs) got.insert(b.area);
      for (const auto& b : oracle) want.insert(b.area);
      CHECK(got == want);
    }
  }
}

TEST_CASE("detect_thermal end to end") {
  SUBCASE("hot blob center within one pixel") {
    synth::ScenarioSpec spec;
    spec.kind = synth::TrajectoryKind::hover;
    spec.center_mm = {400.0, 3000.0, 1700.0};
    spec.noise.thermal_noise_std = 0.0;
    synth::SplitMix64 rng(1);
    auto frame = synth::render_thermal_frame(spec, 0.0, rng);

    const double depth = 3000.0;
    const double expect_cx = spec.thermal_camera.focal_px * 400.0 / depth;
    const double expect_cy =
        spec.thermal_camera.focal_px * (1700.0 - spec.thermal_camera.mount.dz) / depth;

    auto det = detect_thermal(frame);
    REQUIRE(det.has_value());
    CHECK(std::abs(det->cx - expect_cx) <= 1.0);
    CHECK(std::abs(det->cy - expect_cy) <= 1.0);
    // apparent size within one pixel of the projected diameter
    const double expect_w = spec.thermal_camera.focal_px * spec.uav_length_mm / depth;
    CHECK(std::abs(det->w - expect_w) <= 1.5);
    CHECK(det->score == 1.0);
  }
  SUBCASE("all-background frame yields nothing") {
    CHECK(!detect_thermal(frame_of(64, 64, 30)).has_value());
  }
  SUBCASE("larger of two blobs wins") {
    io::ThermalFrame f = frame_of(64, 64, 30);
    paint_rect(f, 10, 10, 9, 9, 220);
    paint_rect(f, 40, 40, 5, 5, 220);
    auto det = detect_thermal(f);
    REQUIRE(det.has_value());
    // big blob at columns 10..18, center 14 -> center-origin 14 - 31.5
    CHECK(det->cx == doctest::Approx(14.0 - 31.5));
    CHECK(det->w == doctest::Approx(9.0));
  }
  SUBCASE("noisy background stays empty after opening") {
    synth::SplitMix64 rng(99);
    io::ThermalFrame f = frame_of(64, 64, 30);
    for (auto& px : f.pixels) {
      const double v = 30.0 + 2.0 * rng.gaussian();
      px = static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    auto det = detect_thermal(f);
    CHECK(!det.has_value());
  }
}
