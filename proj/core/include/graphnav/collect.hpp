#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphnav/trajectory.hpp"

namespace graphnav {

enum class CollectPolicy { RandomWalk, WaypointTour };

CollectPolicy collect_policy_from_string(const std::string& name);
std::string to_string(CollectPolicy policy);

struct CollectParams {
  CollectPolicy policy = CollectPolicy::RandomWalk;
  int steps = 400;
  bool odom_noise = true;  // off for frame-correctness checks

  // random walk shaping
  double turn_resample_prob = 0.08;  // chance per step of a new heading whim
  double omega_smooth = 0.75;        // low-pass factor toward the whim
  int escape_steps = 12;             // committed turn length after bumping

  // waypoint tour shaping
  double waypoint_tolerance = 0.6;   // m, arrival radius
  int waypoint_patience = 200;       // steps before giving up on a waypoint
  double leg_min_m = 8.0;            // preferred minimum geodesic leg length
};

/// Runs one episode under the given policy and returns its trajectory with
/// ground-truth poses attached. Deterministic per (map, params, seed).
Trajectory collect(const sim::WorldMap& map, const sim::SimParams& sim_params,
                   const CollectParams& params, std::uint64_t seed, int id);

/// `episodes` trajectories with ids 0..episodes-1 and per-episode seeds
/// derived from base_seed. `mix_policies` alternates random-walk and
/// waypoint-tour episodes regardless of params.policy.
TrajectorySet collect_corpus(const sim::WorldMap& map,
                             const sim::SimParams& sim_params,
                             const CollectParams& params, int episodes,
                             std::uint64_t base_seed, bool mix_policies = false);

/// Fraction of traversable cells of the largest component visited by at
/// least one trajectory (by ground-truth poses).
double coverage(const sim::WorldMap& map, const TrajectorySet& set);

}  // namespace graphnav
