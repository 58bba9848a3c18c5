#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "graphnav/geometry.hpp"
#include "graphnav/observation.hpp"
#include "graphnav/world_map.hpp"

namespace graphnav::sim {

/// True robot pose. Only the simulator and ground-truth evaluation read it;
/// the agent sees observations and odometry.
using RobotState = Pose2;

/// Velocity command. v is clamped to [0, v_max], omega to [-omega_max,
/// omega_max]; out-of-range commands are never rejected.
struct ControlCommand {
  double v = 0.0;
  double omega = 0.0;

  bool operator==(const ControlCommand&) const = default;
};

/// Measured motion over one step, in the robot's start-of-interval frame.
struct OdometryDelta {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;

  bool operator==(const OdometryDelta&) const = default;
};

struct SimParams {
  double dt = 0.2;               // seconds per control step
  double v_max = 1.5;            // m/s
  double omega_max = 1.5;        // rad/s
  double robot_radius = 0.2;     // m, collision disc
  int ray_count = 16;
  double fan_angle = 170.0 * M_PI / 180.0;
  double max_range = 12.0;       // m
  double odom_noise_frac = 0.01; // sigma as fraction of per-step motion
};

/// Unicycle step with collision clamping: heading integrates freely, the
/// translation chord is truncated where the robot disc first touches a
/// non-traversable cell.
RobotState step_state(const RobotState& state, const ControlCommand& cmd,
                      double dt, const WorldMap& map, const SimParams& params);

/// True if the robot disc at (x, y) overlaps a non-traversable cell or leaves
/// the map.
bool in_collision(double x, double y, const WorldMap& map, double radius);

/// Forward fan sweep. Rays stop at the first cell whose appearance sticks up
/// (vegetation or wall); ground-like cells, holes included, are invisible.
Snapshot cast_rays(const RobotState& state, const WorldMap& map,
                   const SimParams& params);

/// History-free observation: the frame stack holds the current snapshot
/// twice. Deterministic for fixed inputs.
Observation observe(const RobotState& state, const WorldMap& map,
                    double lighting, const SimParams& params);

constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Shortest traversable path length in meters between two positions,
/// computed on the terrain grid (8-connected, no corner cutting). Returns
/// kUnreachable when disconnected; throws if an endpoint cell is not
/// traversable.
double ground_truth_distance(double ax, double ay, double bx, double by,
                             const WorldMap& map);

/// Grid distances (meters) from a source cell to every cell; kUnreachable
/// where disconnected or blocked. Index = y * width + x.
std::vector<double> distance_field(int cx, int cy, const WorldMap& map);

/// Uniform pose over the largest traversable component, collision-free.
RobotState sample_spawn(const WorldMap& map, const SimParams& params,
                        std::mt19937_64& rng);

/// One robot in one world. Instances are independent; a single instance is
/// not shared across threads.
class Simulator {
 public:
  Simulator(WorldMap map, SimParams params, std::uint64_t seed);

  void reset(const RobotState& state, double lighting);
  const RobotState& state() const { return state_; }
  const WorldMap& map() const { return map_; }
  const SimParams& params() const { return params_; }
  double lighting() const { return lighting_; }

  /// Stacked observation at the current time step. Idempotent.
  Observation observe() const;

  /// Advances one control step and returns the measured (noisy) odometry.
  OdometryDelta step(const ControlCommand& cmd);

 private:
  WorldMap map_;
  SimParams params_;
  RobotState state_;
  double lighting_ = 0.0;
  Snapshot prev_snap_;
  std::mt19937_64 rng_;
};

}  // namespace graphnav::sim
