#pragma once

#include <cstddef>
#include <vector>

namespace graphnav::sim {

/// One range-sensor sweep: ray_count x (hit distance, appearance code),
/// interleaved ray-major.
struct Snapshot {
  std::vector<float> rays;
  bool operator==(const Snapshot&) const = default;
};

/// Egocentric observation handed to the learned models: two consecutive
/// snapshots (previous frame first) plus the trajectory's lighting value.
/// Carries no absolute position or heading.
struct Observation {
  int ray_count = 0;
  std::vector<float> frames;  // 2 * ray_count * 2 floats, previous frame first
  float lighting = 0.0f;

  std::size_t dim() const { return frames.size() + 1; }
  bool operator==(const Observation&) const = default;
};

}  // namespace graphnav::sim

namespace graphnav {
// The learned models and the graph are written against the observation type
// directly; lift it out of the simulator namespace for them.
using sim::Observation;
using sim::Snapshot;
}  // namespace graphnav
