#include "uav/io/formats.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace uav::io {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode) {
  if (!std::filesystem::exists(path)) {
    raise(ErrorCode::missing_file, "file not found: " + path.string());
  }
  std::ifstream in(path, mode);
  if (!in) {
    raise(ErrorCode::io_error, "cannot open for reading: " + path.string());
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) {
    raise(ErrorCode::io_error, "cannot open for writing: " + path.string());
  }
  return out;
}

[[noreturn]] void malformed(const std::filesystem::path& path, size_t line, const std::string& what) {
  raise(ErrorCode::malformed_record,
        path.filename().string() + " line " + std::to_string(line) + ": " + what);
}

double parse_double_field(const std::string& text, size_t& pos,
                          const std::filesystem::path& path, size_t line) {
  const char* begin = text.data() + pos;
  const char* end = text.data() + text.size();
  double value = 0.0;
  auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc()) {
    malformed(path, line, "expected a number at column " + std::to_string(pos + 1));
  }
  pos = static_cast<size_t>(res.ptr - text.data());
  if (pos < text.size()) {
    if (text[pos] != ',') {
      malformed(path, line, "expected ',' at column " + std::to_string(pos + 1));
    }
    ++pos;
  }
  return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// PGM
// ---------------------------------------------------------------------------

ThermalFrame read_pgm(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, std::ios::binary);

  auto next_token = [&](const char* what) -> std::string {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
      if (c == '#') {  // comment to end of line
        while ((c = in.get()) != EOF && c != '\n') {
        }
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) {
      raise(ErrorCode::malformed_record, path.string() + ": truncated PGM header (" + what + ")");
    }
    return tok;
  };

  if (next_token("magic") != "P5") {
    raise(ErrorCode::malformed_record, path.string() + ": not a binary PGM (P5) file");
  }
  long width = std::stol(next_token("width"));
  long height = std::stol(next_token("height"));
  long maxval = std::stol(next_token("maxval"));
  if (width <= 0 || height <= 0) {
    raise(ErrorCode::malformed_record, path.string() + ": non-positive PGM dimensions");
  }
  if (maxval != 255) {
    raise(ErrorCode::malformed_record, path.string() + ": unsupported PGM maxval (want 255)");
  }

  ThermalFrame frame;
  frame.width = static_cast<uint32_t>(width);
  frame.height = static_cast<uint32_t>(height);
  frame.pixels.resize(static_cast<size_t>(width) * static_cast<size_t>(height));
  in.read(reinterpret_cast<char*>(frame.pixels.data()),
          static_cast<std::streamsize>(frame.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(frame.pixels.size())) {
    raise(ErrorCode::malformed_record, path.string() + ": truncated PGM pixel data");
  }
  return frame;
}

void write_pgm(const std::filesystem::path& path, const ThermalFrame& frame) {
  if (frame.width == 0 || frame.height == 0 ||
      frame.pixels.size() != static_cast<size_t>(frame.width) * frame.height) {
    raise(ErrorCode::invalid_argument, "thermal frame dimensions do not match pixel buffer");
  }
  std::ofstream out = open_output(path, std::ios::binary);
  out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
}

std::string thermal_frame_filename(uint64_t frame_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06" PRIu64 ".pgm", frame_id);
  return buf;
}

std::vector<ThermalFrameEntry> read_thermal_index(const std::filesystem::path& dir) {
  const auto index_path = dir / "index.jsonl";
  std::ifstream in = open_input(index_path, std::ios::in);

  std::vector<ThermalFrameEntry> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      malformed(index_path, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.contains("frame_id") || !j.contains("timestamp")) {
      malformed(index_path, line_no, "missing frame_id or timestamp");
    }
    ThermalFrameEntry entry;
    entry.frame_id = j.at("frame_id").get<uint64_t>();
    entry.timestamp = j.at("timestamp").get<double>();
    entry.path = dir / thermal_frame_filename(entry.frame_id);
    if (!std::filesystem::exists(entry.path)) {
      raise(ErrorCode::missing_file, "indexed frame not found: " + entry.path.string());
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

void write_thermal_sequence(const std::filesystem::path& dir,
                            std::span<const ThermalFrame> frames,
                            uint64_t first_frame_id) {
  std::filesystem::create_directories(dir);
  std::ofstream index = open_output(dir / "index.jsonl", std::ios::out);
  uint64_t id = first_frame_id;
  for (const auto& frame : frames) {
    write_pgm(dir / thermal_frame_filename(id), frame);
    index << "{\"frame_id\":" << id << ",\"timestamp\":" << format_timestamp(frame.timestamp)
          << "}\n";
    ++id;
  }
}

// ---------------------------------------------------------------------------
// LIDAR CSV
// ---------------------------------------------------------------------------

std::vector<LidarScan> read_lidar_csv(const std::filesystem::path& path,
                                      int points_per_degree, double angular_start_deg) {
  std::ifstream in = open_input(path, std::ios::in);
  std::vector<LidarScan> scans;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    LidarScan scan;
    scan.points_per_degree = points_per_degree;
    scan.angular_start_deg = angular_start_deg;
    size_t pos = 0;
    scan.timestamp = parse_double_field(line, pos, path, line_no);
    while (pos < line.size()) {
      scan.ranges_mm.push_back(parse_double_field(line, pos, path, line_no));
    }
    if (scan.ranges_mm.empty()) {
      malformed(path, line_no, "scan has no range values");
    }
    scans.push_back(std::move(scan));
  }
  return scans;
}

void write_lidar_csv(const std::filesystem::path& path, std::span<const LidarScan> scans) {
  std::ofstream out = open_output(path, std::ios::out);
  std::string row;
  for (const auto& scan : scans) {
    row.clear();
    row += format_timestamp(scan.timestamp);
    for (double r : scan.ranges_mm) {
      row += ',';
      row += std::to_string(static_cast<long long>(std::llround(r)));
    }
    row += '\n';
    out << row;
  }
}

// ---------------------------------------------------------------------------
// Detections JSONL
// ---------------------------------------------------------------------------

namespace {

void validate_detection(const DetectionRecord& d, const std::filesystem::path& path,
                        size_t line_no) {
  if (!(d.score >= 0.0 && d.score <= 1.0)) {
    malformed(path, line_no, "score " + format_double(d.score) + " outside [0, 1]");
  }
  if (!(d.w > 0.0) || !(d.h > 0.0)) {
    malformed(path, line_no, "non-positive box size");
  }
  if (d.frame_width == 0 || d.frame_height == 0) {
    malformed(path, line_no, "zero frame dimensions");
  }
  if (std::abs(d.cx) > d.frame_width / 2.0 || std::abs(d.cy) > d.frame_height / 2.0) {
    malformed(path, line_no, "box center outside the frame");
  }
  if (!std::isfinite(d.cx) || !std::isfinite(d.cy) || !std::isfinite(d.w) ||
      !std::isfinite(d.h) || !std::isfinite(d.timestamp)) {
    malformed(path, line_no, "non-finite field");
  }
}

}  // namespace

std::vector<DetectionRecord> read_detections_jsonl(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, std::ios::in);
  std::vector<DetectionRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      malformed(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    DetectionRecord d;
    try {
      d.timestamp = j.at("timestamp").get<double>();
      d.frame_id = j.at("frame_id").get<uint64_t>();
      d.cx = j.at("cx").get<double>();
      d.cy = j.at("cy").get<double>();
      d.w = j.at("w").get<double>();
      d.h = j.at("h").get<double>();
      d.score = j.at("score").get<double>();
      d.iso = j.at("iso").get<uint32_t>();
      d.frame_width = j.at("frame_width").get<uint32_t>();
      d.frame_height = j.at("frame_height").get<uint32_t>();
    } catch (const json::exception& e) {
      malformed(path, line_no, std::string("bad or missing field: ") + e.what());
    }
    validate_detection(d, path, line_no);
    records.push_back(d);
  }
  return records;
}

void write_detections_jsonl(const std::filesystem::path& path,
                            std::span<const DetectionRecord> records) {
  std::ofstream out = open_output(path, std::ios::out);
  for (const auto& d : records) {
    ordered_json j;
    j["timestamp"] = d.timestamp;
    j["frame_id"] = d.frame_id;
    j["cx"] = d.cx;
    j["cy"] = d.cy;
    j["w"] = d.w;
    j["h"] = d.h;
    j["score"] = d.score;
    j["iso"] = d.iso;
    j["frame_width"] = d.frame_width;
    j["frame_height"] = d.frame_height;
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Ground truth CSV
// ---------------------------------------------------------------------------

GroundTruthFile read_groundtruth_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, std::ios::in);
  GroundTruthFile file;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    GroundTruthSample s;
    size_t pos = 0;
    s.timestamp = parse_double_field(line, pos, path, line_no);
    s.position_mm.x = parse_double_field(line, pos, path, line_no);
    s.position_mm.y = parse_double_field(line, pos, path, line_no);
    s.position_mm.z = parse_double_field(line, pos, path, line_no);
    if (pos < line.size()) {
      double flag = parse_double_field(line, pos, path, line_no);
      if (flag != 0.0 && flag != 1.0) {
        malformed(path, line_no, "visible flag must be 0 or 1");
      }
      s.visible = flag != 0.0;
      file.has_visibility = true;
    }
    file.samples.push_back(s);
  }
  return file;
}

void write_groundtruth_csv(const std::filesystem::path& path,
                           std::span<const GroundTruthSample> samples,
                           bool with_visibility) {
  std::ofstream out = open_output(path, std::ios::out);
  std::string row;
  for (const auto& s : samples) {
    row.clear();
    row += format_timestamp(s.timestamp);
    row += ',';
    row += format_double(s.position_mm.x);
    row += ',';
    row += format_double(s.position_mm.y);
    row += ',';
    row += format_double(s.position_mm.z);
    if (with_visibility) {
      row += s.visible ? ",1" : ",0";
    }
    row += '\n';
    out << row;
  }
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

SessionManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, std::ios::in);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorCode::malformed_record, path.string() + ": invalid JSON: " + e.what());
  }

  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  auto resolve = [&](const char* key) -> std::filesystem::path {
    if (!j.contains(key) || j.at(key).is_null()) return {};
    auto p = std::filesystem::path(j.at(key).get<std::string>());
    return p.is_absolute() ? p : base / p;
  };

  SessionManifest m;
  m.thermal_dir = resolve("thermal_dir");
  m.lidar_csv = resolve("lidar_csv");
  m.detections_jsonl = resolve("detections_jsonl");
  m.groundtruth_csv = resolve("groundtruth_csv");
  if (m.thermal_dir.empty() && m.lidar_csv.empty() && m.detections_jsonl.empty() &&
      m.groundtruth_csv.empty()) {
    raise(ErrorCode::invalid_config, path.string() + ": manifest references no streams");
  }
  if (j.contains("offsets")) {
    const auto& o = j.at("offsets");
    m.offsets.thermal = o.value("thermal", 0.0);
    m.offsets.lidar = o.value("lidar", 0.0);
    m.offsets.detections = o.value("detections", 0.0);
    m.offsets.groundtruth = o.value("groundtruth", 0.0);
    for (double v : {m.offsets.thermal, m.offsets.lidar, m.offsets.detections,
                     m.offsets.groundtruth}) {
      if (!std::isfinite(v)) {
        raise(ErrorCode::invalid_config, path.string() + ": non-finite stream offset");
      }
    }
  }
  m.duration = j.value("duration", 0.0);
  return m;
}

void write_manifest(const std::filesystem::path& path, const SessionManifest& manifest) {
  ordered_json j;
  auto rel = [&](const std::filesystem::path& p) -> ordered_json {
    if (p.empty()) return nullptr;
    return p.lexically_relative(path.parent_path()).generic_string();
  };
  j["thermal_dir"] = rel(manifest.thermal_dir);
  j["lidar_csv"] = rel(manifest.lidar_csv);
  j["detections_jsonl"] = rel(manifest.detections_jsonl);
  j["groundtruth_csv"] = rel(manifest.groundtruth_csv);
  j["offsets"] = {{"thermal", manifest.offsets.thermal},
                  {"lidar", manifest.offsets.lidar},
                  {"detections", manifest.offsets.detections},
                  {"groundtruth", manifest.offsets.groundtruth}};
  j["duration"] = manifest.duration;
  std::ofstream out = open_output(path, std::ios::out);
  out << j.dump(2) << '\n';
}

}  // namespace uav::io
