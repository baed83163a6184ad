#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "testutil.hpp"
#include "uav/io/formats.hpp"
#include "uav/io/session.hpp"
#include "uav/synth/splitmix.hpp"

using namespace uav;
using namespace uav::io;

namespace {

ThermalFrame make_frame(double t, uint32_t w, uint32_t h, uint64_t seed) {
  synth::SplitMix64 rng(seed);
  ThermalFrame f;
  f.timestamp = t;
  f.width = w;
  f.height = h;
  f.pixels.resize(static_cast<size_t>(w) * h);
  for (auto& px : f.pixels) px = static_cast<uint8_t>(rng.next() & 0xFF);
  return f;
}

void write_minimal_session(const std::filesystem::path& dir, double lidar_offset = 0.0) {
  std::vector<DetectionRecord> dets;
  for (int k = 0; k < 5; ++k) {
    DetectionRecord d;
    d.timestamp = 0.1 * k;
    d.frame_id = k;
    d.cx = 10.0 + k;
    d.cy = -5.0;
    d.w = 40.0;
    d.h = 25.0;
    d.score = 0.95;
    d.iso = 100;
    d.frame_width = 1920;
    d.frame_height = 1080;
    dets.push_back(d);
  }
  write_detections_jsonl(dir / "detections.jsonl", dets);

  std::vector<LidarScan> scans;
  for (int k = 0; k < 3; ++k) {
    LidarScan s;
    s.timestamp = 0.2 * k;
    s.ranges_mm.assign(720, 0.0);
    s.ranges_mm[100] = 2000.0;
    scans.push_back(s);
  }
  write_lidar_csv(dir / "lidar.csv", scans);

  std::vector<GroundTruthSample> gt;
  for (int k = 0; k < 8; ++k) {
    gt.push_back({0.05 * k, {1000.0 + k, 2000.0, 1500.0}, true});
  }
  write_groundtruth_csv(dir / "groundtruth.csv", gt, true);

  SessionManifest m;
  m.detections_jsonl = dir / "detections.jsonl";
  m.lidar_csv = dir / "lidar.csv";
  m.groundtruth_csv = dir / "groundtruth.csv";
  m.offsets.lidar = lidar_offset;
  write_manifest(dir / "manifest.json", m);
}

}  // namespace

TEST_CASE("pgm round trip is bit exact") {
  testutil::TempDir tmp("pgm");
  for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    ThermalFrame f = make_frame(1.25, 64, 48, seed);
    write_pgm(tmp.path() / "frame.pgm", f);
    ThermalFrame g = read_pgm(tmp.path() / "frame.pgm");
    REQUIRE(g.width == f.width);
    REQUIRE(g.height == f.height);
    CHECK(g.pixels == f.pixels);
  }
}

TEST_CASE("pgm reader accepts comments and rejects junk") {
  testutil::TempDir tmp("pgmhdr");
  {
    std::ofstream out(tmp.path() / "ok.pgm", std::ios::binary);
    out << "P5\n# a comment\n2 2\n255\n";
    out.write("\x01\x02\x03\x04", 4);
  }
  ThermalFrame f = read_pgm(tmp.path() / "ok.pgm");
  CHECK(f.width == 2);
  CHECK(f.pixels[3] == 4);

  {
    std::ofstream out(tmp.path() / "bad.pgm", std::ios::binary);
    out << "P2\n2 2\n255\n";
  }
  CHECK_THROWS_AS(read_pgm(tmp.path() / "bad.pgm"), Error);
  CHECK_THROWS_AS(read_pgm(tmp.path() / "absent.pgm"), Error);
}

TEST_CASE("lidar csv round trip preserves integer ranges and timestamps") {
  testutil::TempDir tmp("lidarcsv");
  synth::SplitMix64 rng(7);
  std::vector<LidarScan> scans;
  for (int k = 0; k < 10; ++k) {
    LidarScan s;
    s.timestamp = k * 0.025;
    s.ranges_mm.resize(720);
    for (auto& r : s.ranges_mm) {
      r = rng.next_double() < 0.3 ? 0.0 : std::floor(rng.uniform(1.0, 30000.0));
    }
    scans.push_back(s);
  }
  write_lidar_csv(tmp.path() / "scans.csv", scans);
  auto loaded = read_lidar_csv(tmp.path() / "scans.csv");
  REQUIRE(loaded.size() == scans.size());
  for (size_t i = 0; i < scans.size(); ++i) {
    CHECK(std::abs(loaded[i].timestamp - scans[i].timestamp) <= 1e-6);
    CHECK(loaded[i].ranges_mm == scans[i].ranges_mm);
  }
}

TEST_CASE("detections jsonl round trip") {
  testutil::TempDir tmp("dets");
  write_minimal_session(tmp.path());
  auto a = read_detections_jsonl(tmp.path() / "detections.jsonl");
  write_detections_jsonl(tmp.path() / "copy.jsonl", a);
  auto b = read_detections_jsonl(tmp.path() / "copy.jsonl");
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].timestamp == b[i].timestamp);
    CHECK(a[i].cx == b[i].cx);
    CHECK(a[i].score == b[i].score);
    CHECK(a[i].iso == b[i].iso);
  }
}

TEST_CASE("groundtruth csv keeps visibility flags") {
  testutil::TempDir tmp("gt");
  std::vector<GroundTruthSample> gt = {{0.0, {1.5, -2.25, 3.0}, true},
                                       {0.5, {4.0, 5.0, 6.0}, false}};
  write_groundtruth_csv(tmp.path() / "gt.csv", gt, true);
  auto loaded = read_groundtruth_csv(tmp.path() / "gt.csv");
  REQUIRE(loaded.has_visibility);
  REQUIRE(loaded.samples.size() == 2);
  CHECK(loaded.samples[0].position_mm.y == -2.25);
  CHECK(loaded.samples[1].visible == false);

  write_groundtruth_csv(tmp.path() / "gt4.csv", gt, false);
  auto plain = read_groundtruth_csv(tmp.path() / "gt4.csv");
  CHECK(!plain.has_visibility);
  CHECK(plain.samples[1].visible == true);
}

TEST_CASE("malformed detection row reports its line") {
  testutil::TempDir tmp("badrow");
  {
    std::ofstream out(tmp.path() / "d.jsonl");
    out << R"({"timestamp":0.0,"frame_id":0,"cx":0,"cy":0,"w":10,"h":10,"score":0.5,"iso":100,"frame_width":640,"frame_height":512})"
        << "\n";
    out << R"({"timestamp":0.1,"frame_id":1,"cx":0,"cy":0,"w":10,"h":10,"score":1.3,"iso":100,"frame_width":640,"frame_height":512})"
        << "\n";
  }
  try {
    read_detections_jsonl(tmp.path() / "d.jsonl");
    FAIL("expected malformed_record");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_record);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("load_session applies offsets and rejects disorder") {
  testutil::TempDir tmp("session");
  write_minimal_session(tmp.path());

  SUBCASE("zero offsets keep timestamps") {
    Session s = load_session(tmp.path() / "manifest.json");
    REQUIRE(s.detections.size() == 5);
    CHECK(s.detections[3].timestamp == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(s.lidar.size() == 3);
    CHECK(s.groundtruth.size() == 8);
  }

  SUBCASE("lidar offset shifts every scan by exactly the offset") {
    write_minimal_session(tmp.path(), 0.5);
    Session s = load_session(tmp.path() / "manifest.json");
    for (size_t i = 0; i < s.lidar.size(); ++i) {
      CHECK(s.lidar[i].timestamp == doctest::Approx(0.2 * i + 0.5).epsilon(1e-12));
    }
  }

  SUBCASE("non-monotone stream is an error, not silently sorted") {
    std::ofstream out(tmp.path() / "gt_bad.csv");
    out << "0.000000,1,2,3\n0.000000,4,5,6\n";
    out.close();
    SessionManifest m;
    m.groundtruth_csv = tmp.path() / "gt_bad.csv";
    write_manifest(tmp.path() / "m2.json", m);
    CHECK_THROWS_AS(load_session(tmp.path() / "m2.json"), Error);
  }

  SUBCASE("missing file") {
    SessionManifest m;
    m.detections_jsonl = tmp.path() / "absent.jsonl";
    write_manifest(tmp.path() / "m3.json", m);
    try {
      load_session(tmp.path() / "m3.json");
      FAIL("expected missing_file");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::missing_file);
    }
  }

  SUBCASE("duration crops shifted streams") {
    SessionManifest m = read_manifest(tmp.path() / "manifest.json");
    m.duration = 0.25;
    write_manifest(tmp.path() / "m4.json", m);
    Session s = load_session(tmp.path() / "m4.json");
    CHECK(s.detections.size() == 3);  // 0.0, 0.1, 0.2
    CHECK(s.groundtruth.size() == 6); // 0.00 .. 0.25
  }
}

TEST_CASE("nearest_before definition and monotonicity") {
  struct Rec {
    double timestamp;
  };
  std::vector<Rec> stream = {{0.0}, {0.1}, {0.2}};

  const Rec* r = nearest_before(std::span<const Rec>(stream), 0.15);
  REQUIRE(r != nullptr);
  CHECK(r->timestamp == 0.1);

  CHECK(nearest_before(std::span<const Rec>(stream), -1.0) == nullptr);

  r = nearest_before(std::span<const Rec>(stream), 0.2);
  REQUIRE(r != nullptr);
  CHECK(r->timestamp == 0.2);  // tie is inclusive

  // Monotone: t1 <= t2 implies result(t1) <= result(t2).
  synth::SplitMix64 rng(11);
  std::vector<Rec> big;
  double t = 0.0;
  for (int i = 0; i < 200; ++i) {
    t += rng.uniform(0.001, 0.1);
    big.push_back({t});
  }
  double prev_probe = -1.0;
  const Rec* prev = nullptr;
  for (int i = 0; i < 500; ++i) {
    const double probe = prev_probe + rng.uniform(0.0, 0.05);
    const Rec* cur = nearest_before(std::span<const Rec>(big), probe);
    if (prev != nullptr) {
      REQUIRE(cur != nullptr);
      CHECK(cur->timestamp >= prev->timestamp);
    }
    prev = cur;
    prev_probe = probe;
  }
}

TEST_CASE("manifest requires at least one stream") {
  testutil::TempDir tmp("manifest");
  std::ofstream out(tmp.path() / "empty.json");
  out << "{\"offsets\":{}}";
  out.close();
  CHECK_THROWS_AS(read_manifest(tmp.path() / "empty.json"), Error);
}
