#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "graphnav/geometry.hpp"
#include "graphnav/observation.hpp"
#include "graphnav/simulator.hpp"

namespace graphnav {

/// One timestep: the observation taken at time t, the command issued at t,
/// and the measured odometry for the motion that command caused (t -> t+1).
struct TrajectoryRecord {
  Observation obs;
  sim::ControlCommand cmd;
  sim::OdometryDelta odom;

  bool operator==(const TrajectoryRecord&) const = default;
};

/// Time-ordered records of one episode. Ground-truth poses are an optional
/// evaluation-only sidecar; the agent never reads them.
struct Trajectory {
  int id = 0;
  double lighting = 0.0;
  std::vector<TrajectoryRecord> records;
  std::vector<Pose2> gt_poses;  // empty when no sidecar is available

  std::size_t size() const { return records.size(); }

  /// Pose of record j's capture point in record i's frame, from composed
  /// odometry. Requires i <= j < size().
  Pose2 odom_relative(std::size_t i, std::size_t j) const;

  /// Writes `path` and, when ground-truth poses are present, `path` with a
  /// ".poses" extension appended.
  void save(const std::filesystem::path& path) const;
  static Trajectory load(const std::filesystem::path& path);
};

/// A corpus of trajectories with stable ids; the unit the pair sampler and
/// graph builder operate on.
struct TrajectorySet {
  std::vector<Trajectory> trajectories;

  std::size_t size() const { return trajectories.size(); }
  std::size_t total_records() const;
  const TrajectoryRecord& record(int traj, int idx) const {
    return trajectories[static_cast<std::size_t>(traj)]
        .records[static_cast<std::size_t>(idx)];
  }

  /// Loads every "traj_*.bin" under dir, sorted by filename; ids are
  /// reassigned to the sorted order.
  static TrajectorySet load_dir(const std::filesystem::path& dir);
  void save_dir(const std::filesystem::path& dir) const;
};

}  // namespace graphnav
