#pragma once

#include <span>

#include "uav/io/formats.hpp"
#include "uav/io/types.hpp"

namespace uav::io {

/// Loads every stream referenced by the manifest, shifts each stream's
/// timestamps by its offset onto the shared session clock, and (when the
/// manifest carries a positive duration) crops to [0, duration].
/// Non-monotone input is an error, never silently sorted.
Session load_session(const std::filesystem::path& manifest_path);

/// Record with the greatest timestamp <= t, or nullptr if t precedes the
/// stream. The stream must be sorted by timestamp; ties are inclusive.
template <class Record>
const Record* nearest_before(std::span<const Record> stream, double t) {
  size_t lo = 0;
  size_t hi = stream.size();
  while (lo < hi) {
    size_t mid = lo + (hi - lo) / 2;
    if (stream[mid].timestamp <= t) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo == 0 ? nullptr : &stream[lo - 1];
}

}  // namespace uav::io
