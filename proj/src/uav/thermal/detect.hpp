#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "uav/io/types.hpp"

namespace uav::thermal {

/// Gray-level probability distribution of one frame.
struct GrayHistogram {
  std::array<double, 256> p{};
  uint64_t n_pixels = 0;
};

/// Row-major boolean mask; true = object (hot class).
struct BinaryMask {
  uint32_t width = 0;
  uint32_t height = 0;
  std::vector<uint8_t> bits;

  bool at(uint32_t x, uint32_t y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
};

/// Tight axis-aligned box of one connected component, in the shared
/// center-origin pixel convention (x right, y up).
struct BlobBox {
  double cx = 0.0;
  double cy = 0.0;
  uint32_t w = 0;
  uint32_t h = 0;
  uint64_t area = 0;
};

GrayHistogram histogram(const io::ThermalFrame& frame);

/// Threshold maximizing the entropic correlation between the object and
/// background classes (Yen's criterion):
///
///   TC(t) = -ln(sum_{g<=t} p_g^2 / P^2) - ln(sum_{g>t} p_g^2 / (1-P)^2),
///   P = sum_{g<=t} p_g,
///
/// evaluated for t in [0, 254] where 0 < P < 1; ties break toward the
/// smallest t. A histogram with fewer than two populated bins has no
/// object/background split and raises degenerate_histogram.
int max_correlation_threshold(const GrayHistogram& h);

/// Mask bit = (pixel > t); the hot class is the object.
BinaryMask binarize(const io::ThermalFrame& frame, int threshold);

/// Morphological opening then closing with square structuring elements of
/// side 2*radius + 1. Radius 0 is the identity for that stage. Pixels
/// outside the frame are treated as background.
BinaryMask postprocess(const BinaryMask& mask, int open_radius, int close_radius);

/// 8-connected components as tight boxes, ordered by area descending, then
/// by top-left raster position.
std::vector<BlobBox> extract_blobs(const BinaryMask& mask);

struct ThermalDetectConfig {
  int open_radius = 1;
  int close_radius = 1;
  uint32_t iso = 12800;  // copied into emitted records; the sensor has no score
};

/// Full thermal stage: histogram -> threshold -> binarize -> postprocess ->
/// blobs; the largest blob becomes a DetectionRecord with score 1.0.
/// Returns nothing when the frame has no separable object.
/// Holds reusable buffers; one instance per thread.
class ThermalDetector {
public:
  explicit ThermalDetector(ThermalDetectConfig config = {}) : config_(config) {}

  std::optional<io::DetectionRecord> detect(const io::ThermalFrame& frame);

  const ThermalDetectConfig& config() const { return config_; }

private:
  ThermalDetectConfig config_;
  BinaryMask mask_;
  BinaryMask scratch_;
  BinaryMask scratch2_;
  std::vector<int32_t> labels_;
};

/// One-shot convenience wrapper around ThermalDetector.
std::optional<io::DetectionRecord> detect_thermal(const io::ThermalFrame& frame,
                                                  const ThermalDetectConfig& config = {});

}  // namespace uav::thermal
