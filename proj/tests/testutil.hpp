#pragma once

// Shared helpers and independent oracles for the test suites. Oracles are
// deliberately written as plain brute force so they share no code with the
// implementation they check.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace testutil {

/// Unique scratch directory under the system temp dir; removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<uint64_t> counter{0};
    dir_ = std::filesystem::temp_directory_path() /
           ("uavpipe_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  const std::filesystem::path& path() const { return dir_; }

private:
  std::filesystem::path dir_;
};

/// Exhaustive argmax of the entropic correlation objective over t in
/// [0, 254]; naive per-candidate sums, ties to the smallest t. Returns -1
/// when no candidate splits the histogram.
inline int brute_force_max_correlation(const std::array<double, 256>& p) {
  int best_t = -1;
  double best = 0.0;
  for (int t = 0; t <= 254; ++t) {
    double low_mass = 0.0, low_sq = 0.0, high_mass = 0.0, high_sq = 0.0;
    for (int g = 0; g <= t; ++g) {
      low_mass += p[g];
      low_sq += p[g] * p[g];
    }
    for (int g = t + 1; g < 256; ++g) {
      high_mass += p[g];
      high_sq += p[g] * p[g];
    }
    if (low_sq <= 0.0 || high_sq <= 0.0) continue;
    const double tc = -std::log(low_sq / (low_mass * low_mass)) -
                      std::log(high_sq / (high_mass * high_mass));
    if (best_t < 0 || tc > best) {
      best_t = t;
      best = tc;
    }
  }
  return best_t;
}

/// High-precision (long double) evaluation of the mean distance and chord
/// length of a run of beams.
struct ChordOracle {
  long double mean;
  long double length;
};
inline ChordOracle chord_oracle(const std::vector<double>& distances, int points_per_degree,
                                bool half_angle) {
  long double sum = 0.0L;
  for (double d : distances) sum += static_cast<long double>(d);
  const long double n = static_cast<long double>(distances.size());
  const long double mean = sum / n;
  long double angle_deg = n / static_cast<long double>(points_per_degree);
  if (half_angle) angle_deg /= 2.0L;
  const long double angle_rad = angle_deg * 3.14159265358979323846264338327950288L / 180.0L;
  return {mean, 2.0L * mean * std::tan(angle_rad)};
}

/// Jacobi eigenvalue iteration for a symmetric n x n matrix (row-major).
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
  auto at = [&](int r, int c) -> double& { return a[r * n + c]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int r = 0; r < n; ++r) {
      for (int c = r + 1; c < n; ++c) off += at(r, c) * at(r, c);
    }
    if (off < 1e-30) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(at(p, q)) < 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = at(i, i);
  return eig;
}

/// Reference binary erosion/dilation with a square element, zero padding.
inline std::vector<uint8_t> morph_oracle(const std::vector<uint8_t>& bits, int w, int h, int r,
                                         bool erode) {
  std::vector<uint8_t> out(bits.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool all = true;
      bool any = false;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const int yy = y + dy;
          const int xx = x + dx;
          const bool v =
              yy >= 0 && yy < h && xx >= 0 && xx < w && bits[yy * w + xx] != 0;
          all = all && v;
          any = any || v;
        }
      }
      out[y * w + x] = erode ? (all ? 1 : 0) : (any ? 1 : 0);
    }
  }
  return out;
}

/// 8-connected components by flood fill; returns per-component
/// (minx, miny, maxx, maxy, area) in discovery (raster) order.
struct BlobOracle {
  int minx, miny, maxx, maxy;
  uint64_t area;
};
inline std::vector<BlobOracle> flood_fill_blobs(const std::vector<uint8_t>& bits, int w, int h) {
  std::vector<uint8_t> seen(bits.size(), 0);
  std::vector<BlobOracle> out;
  std::vector<std::pair<int, int>> stack;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      if (!bits[y0 * w + x0] || seen[y0 * w + x0]) continue;
      BlobOracle blob{x0, y0, x0, y0, 0};
      stack.push_back({x0, y0});
      seen[y0 * w + x0] = 1;
      while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        ++blob.area;
        blob.minx = std::min(blob.minx, x);
        blob.miny = std::min(blob.miny, y);
        blob.maxx = std::max(blob.maxx, x);
        blob.maxy = std::max(blob.maxy, y);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = x + dx;
            const int yy = y + dy;
            if (xx < 0 || xx >= w || yy < 0 || yy >= h) continue;
            if (!bits[yy * w + xx] || seen[yy * w + xx]) continue;
            seen[yy * w + xx] = 1;
            stack.push_back({xx, yy});
          }
        }
      }
      out.push_back(blob);
    }
  }
  return out;
}

}  // namespace testutil
