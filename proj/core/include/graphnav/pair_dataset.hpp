#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "graphnav/trajectory.hpp"

namespace graphnav {

constexpr int kDefaultDMax = 50;

/// One training pair. Observations are referenced by (trajectory, record)
/// index into the TrajectorySet the sample was drawn from, which keeps
/// serialization lossless and cheap.
struct PairSample {
  int traj_i = 0;
  int idx_i = 0;
  int traj_j = 0;
  int idx_j = 0;
  int d = 0;            // label in {0, ..., d_max}
  bool is_negative = false;
  bool has_pose = false;
  Pose2 delta{};        // pose of j's capture point in i's frame; valid iff has_pose
};

struct Dataset {
  int d_max = kDefaultDMax;
  std::vector<PairSample> positives;
  std::vector<PairSample> negatives;

  std::size_t size() const { return positives.size() + negatives.size(); }
  void save(const std::filesystem::path& path) const;
  static Dataset load(const std::filesystem::path& path);
};

/// Same-trajectory pairs i <= j <= i + window with d = min(j - i, d_max) and
/// the odometry-composed relative pose. Trajectories shorter than 2 records
/// are skipped.
std::vector<PairSample> make_positives(const TrajectorySet& set,
                                       int pairs_per_traj, int window,
                                       int d_max, std::uint64_t seed);

/// Cross-trajectory pairs labeled d = d_max with no pose. Throws when the
/// set holds fewer than two trajectories.
std::vector<PairSample> make_negatives(const TrajectorySet& set, int count,
                                       int d_max, std::uint64_t seed);

struct DatasetParams {
  int pairs_per_traj = 840;
  int window = 2 * kDefaultDMax;
  int d_max = kDefaultDMax;
  double negative_ratio = 1.0;  // negatives per positive
};

Dataset make_dataset(const TrajectorySet& set, const DatasetParams& params,
                     std::uint64_t seed);

}  // namespace graphnav
