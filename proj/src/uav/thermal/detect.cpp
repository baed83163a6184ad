#include "uav/thermal/detect.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace uav::thermal {

GrayHistogram histogram(const io::ThermalFrame& frame) {
  const size_t n = static_cast<size_t>(frame.width) * frame.height;
  if (n == 0 || frame.pixels.size() != n) {
    raise(ErrorCode::empty_frame, "histogram of an empty or inconsistent frame");
  }
  std::array<uint64_t, 256> counts{};
  for (uint8_t v : frame.pixels) {
    ++counts[v];
  }
  GrayHistogram h;
  h.n_pixels = n;
  const double inv = 1.0 / static_cast<double>(n);
  for (int g = 0; g < 256; ++g) {
    h.p[g] = static_cast<double>(counts[g]) * inv;
  }
  return h;
}

int max_correlation_threshold(const GrayHistogram& h) {
  double total = 0.0;
  int populated = 0;
  for (double p : h.p) {
    if (p < 0.0) {
      raise(ErrorCode::invalid_argument, "histogram has a negative probability");
    }
    if (p > 0.0) ++populated;
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    raise(ErrorCode::invalid_argument, "histogram probabilities do not sum to 1");
  }
  if (populated < 2) {
    raise(ErrorCode::degenerate_histogram,
          "single-level histogram: object/background split undefined");
  }

  // Suffix mass computed directly (not as 1 - P) so empty tails are exact zeros.
  std::array<double, 256> suffix_p{};
  std::array<double, 256> suffix_p2{};
  double sp = 0.0;
  double sp2 = 0.0;
  for (int g = 255; g >= 0; --g) {
    suffix_p[g] = sp;
    suffix_p2[g] = sp2;
    sp += h.p[g];
    sp2 += h.p[g] * h.p[g];
  }

  int best_t = -1;
  double best_tc = 0.0;
  double prefix_p = 0.0;
  double prefix_p2 = 0.0;
  for (int t = 0; t <= 254; ++t) {
    prefix_p += h.p[t];
    prefix_p2 += h.p[t] * h.p[t];
    const double q = suffix_p[t];
    const double q2 = suffix_p2[t];
    if (prefix_p2 <= 0.0 || q2 <= 0.0) continue;  // one class empty
    const double tc = -std::log(prefix_p2) + 2.0 * std::log(prefix_p) -
                      std::log(q2) + 2.0 * std::log(q);
    if (best_t < 0 || tc > best_tc) {
      best_t = t;
      best_tc = tc;
    }
  }
  if (best_t < 0) {
    raise(ErrorCode::degenerate_histogram, "no threshold splits the histogram");
  }
  return best_t;
}

BinaryMask binarize(const io::ThermalFrame& frame, int threshold) {
  BinaryMask mask;
  mask.width = frame.width;
  mask.height = frame.height;
  mask.bits.resize(frame.pixels.size());
  for (size_t i = 0; i < frame.pixels.size(); ++i) {
    mask.bits[i] = frame.pixels[i] > threshold ? 1 : 0;
  }
  return mask;
}

namespace {

// Separable sliding-window passes; pixels outside the frame count as 0.
// erode: window of side 2r+1 must be all ones; dilate: any one suffices.

void horizontal_pass(const BinaryMask& in, BinaryMask& out, int r, bool erode) {
  const int w = static_cast<int>(in.width);
  const int h = static_cast<int>(in.height);
  const int full = 2 * r + 1;
  out.width = in.width;
  out.height = in.height;
  out.bits.resize(in.bits.size());
  for (int y = 0; y < h; ++y) {
    const uint8_t* row = in.bits.data() + static_cast<size_t>(y) * w;
    uint8_t* dst = out.bits.data() + static_cast<size_t>(y) * w;
    int sum = 0;
    for (int x = 0; x < std::min(r, w); ++x) sum += row[x];
    for (int x = 0; x < w; ++x) {
      if (x + r < w) sum += row[x + r];
      dst[x] = erode ? (sum == full ? 1 : 0) : (sum > 0 ? 1 : 0);
      if (x - r >= 0) sum -= row[x - r];
    }
  }
}

void vertical_pass(const BinaryMask& in, BinaryMask& out, int r, bool erode) {
  const int w = static_cast<int>(in.width);
  const int h = static_cast<int>(in.height);
  const int full = 2 * r + 1;
  out.width = in.width;
  out.height = in.height;
  out.bits.resize(in.bits.size());
  std::vector<int> colsum(w, 0);
  for (int y = 0; y < std::min(r, h); ++y) {
    const uint8_t* row = in.bits.data() + static_cast<size_t>(y) * w;
    for (int x = 0; x < w; ++x) colsum[x] += row[x];
  }
  for (int y = 0; y < h; ++y) {
    if (y + r < h) {
      const uint8_t* row = in.bits.data() + static_cast<size_t>(y + r) * w;
      for (int x = 0; x < w; ++x) colsum[x] += row[x];
    }
    uint8_t* dst = out.bits.data() + static_cast<size_t>(y) * w;
    if (erode) {
      for (int x = 0; x < w; ++x) dst[x] = colsum[x] == full ? 1 : 0;
    } else {
      for (int x = 0; x < w; ++x) dst[x] = colsum[x] > 0 ? 1 : 0;
    }
    if (y - r >= 0) {
      const uint8_t* row = in.bits.data() + static_cast<size_t>(y - r) * w;
      for (int x = 0; x < w; ++x) colsum[x] -= row[x];
    }
  }
}

void erode(const BinaryMask& in, BinaryMask& tmp, BinaryMask& out, int r) {
  horizontal_pass(in, tmp, r, true);
  vertical_pass(tmp, out, r, true);
}

void dilate(const BinaryMask& in, BinaryMask& tmp, BinaryMask& out, int r) {
  horizontal_pass(in, tmp, r, false);
  vertical_pass(tmp, out, r, false);
}

// open then close, in place; tmp buffers reused across frames.
void morph_inplace(BinaryMask& mask, int open_radius, int close_radius, BinaryMask& tmp_a,
                   BinaryMask& tmp_b) {
  if (open_radius < 0 || close_radius < 0) {
    raise(ErrorCode::invalid_argument, "morphology radius must be >= 0");
  }
  if (open_radius > 0) {
    erode(mask, tmp_a, tmp_b, open_radius);
    dilate(tmp_b, tmp_a, mask, open_radius);
  }
  if (close_radius > 0) {
    dilate(mask, tmp_a, tmp_b, close_radius);
    erode(tmp_b, tmp_a, mask, close_radius);
  }
}

struct UnionFind {
  std::vector<int32_t> parent;

  int32_t make() {
    parent.push_back(static_cast<int32_t>(parent.size()));
    return parent.back();
  }
  int32_t find(int32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int32_t a, int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::vector<BlobBox> extract_blobs_impl(const BinaryMask& mask, std::vector<int32_t>& labels) {
  const int w = static_cast<int>(mask.width);
  const int h = static_cast<int>(mask.height);
  labels.assign(static_cast<size_t>(w) * h, -1);
  UnionFind uf;

  for (int y = 0; y < h; ++y) {
    const uint8_t* row = mask.bits.data() + static_cast<size_t>(y) * w;
    int32_t* lrow = labels.data() + static_cast<size_t>(y) * w;
    const int32_t* prow = y > 0 ? labels.data() + static_cast<size_t>(y - 1) * w : nullptr;
    for (int x = 0; x < w; ++x) {
      if (!row[x]) continue;
      int32_t label = -1;
      auto adopt = [&](int32_t neighbor) {
        if (neighbor < 0) return;
        if (label < 0) {
          label = neighbor;
        } else {
          uf.unite(label, neighbor);
        }
      };
      if (x > 0) adopt(lrow[x - 1]);
      if (prow) {
        if (x > 0) adopt(prow[x - 1]);
        adopt(prow[x]);
        if (x + 1 < w) adopt(prow[x + 1]);
      }
      if (label < 0) label = uf.make();
      lrow[x] = label;
    }
  }

  struct Acc {
    int minx, miny, maxx, maxy;
    uint64_t area;
  };
  std::vector<int32_t> root_index(uf.parent.size(), -1);
  std::vector<Acc> accs;
  for (int y = 0; y < h; ++y) {
    const int32_t* lrow = labels.data() + static_cast<size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      if (lrow[x] < 0) continue;
      const int32_t root = uf.find(lrow[x]);
      int32_t idx = root_index[root];
      if (idx < 0) {
        idx = static_cast<int32_t>(accs.size());
        root_index[root] = idx;
        accs.push_back({x, y, x, y, 0});
      }
      Acc& a = accs[idx];
      a.minx = std::min(a.minx, x);
      a.miny = std::min(a.miny, y);
      a.maxx = std::max(a.maxx, x);
      a.maxy = std::max(a.maxy, y);
      ++a.area;
    }
  }

  std::sort(accs.begin(), accs.end(), [](const Acc& a, const Acc& b) {
    if (a.area != b.area) return a.area > b.area;
    if (a.miny != b.miny) return a.miny < b.miny;
    return a.minx < b.minx;
  });

  std::vector<BlobBox> blobs;
  blobs.reserve(accs.size());
  const double cx0 = (w - 1) / 2.0;
  const double cy0 = (h - 1) / 2.0;
  for (const Acc& a : accs) {
    BlobBox b;
    b.w = static_cast<uint32_t>(a.maxx - a.minx + 1);
    b.h = static_cast<uint32_t>(a.maxy - a.miny + 1);
    b.cx = (a.minx + a.maxx) / 2.0 - cx0;
    b.cy = cy0 - (a.miny + a.maxy) / 2.0;
    b.area = a.area;
    blobs.push_back(b);
  }
  return blobs;
}

}  // namespace

BinaryMask postprocess(const BinaryMask& mask, int open_radius, int close_radius) {
  BinaryMask out = mask;
  BinaryMask tmp_a;
  BinaryMask tmp_b;
  morph_inplace(out, open_radius, close_radius, tmp_a, tmp_b);
  return out;
}

std::vector<BlobBox> extract_blobs(const BinaryMask& mask) {
  std::vector<int32_t> labels;
  return extract_blobs_impl(mask, labels);
}

std::optional<io::DetectionRecord> ThermalDetector::detect(const io::ThermalFrame& frame) {
  GrayHistogram h = histogram(frame);

  int threshold = 0;
  try {
    threshold = max_correlation_threshold(h);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::degenerate_histogram) return std::nullopt;
    throw;
  }

  mask_.width = frame.width;
  mask_.height = frame.height;
  mask_.bits.resize(frame.pixels.size());
  for (size_t i = 0; i < frame.pixels.size(); ++i) {
    mask_.bits[i] = frame.pixels[i] > threshold ? 1 : 0;
  }

  morph_inplace(mask_, config_.open_radius, config_.close_radius, scratch_, scratch2_);

  auto blobs = extract_blobs_impl(mask_, labels_);
  if (blobs.empty()) return std::nullopt;
  const BlobBox& best = blobs.front();

  io::DetectionRecord record;
  record.timestamp = frame.timestamp;
  record.frame_id = 0;  // callers that know the frame id overwrite it
  record.cx = best.cx;
  record.cy = best.cy;
  record.w = static_cast<double>(best.w);
  record.h = static_cast<double>(best.h);
  record.score = 1.0;
  record.iso = config_.iso;
  record.frame_width = frame.width;
  record.frame_height = frame.height;
  return record;
}

std::optional<io::DetectionRecord> detect_thermal(const io::ThermalFrame& frame,
                                                  const ThermalDetectConfig& config) {
  ThermalDetector detector(config);
  return detector.detect(frame);
}

}  // namespace uav::thermal
