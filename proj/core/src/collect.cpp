#include "graphnav/collect.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "graphnav/seeding.hpp"

namespace graphnav {

using sim::ControlCommand;
using sim::Simulator;
using sim::SimParams;
using sim::WorldMap;

CollectPolicy collect_policy_from_string(const std::string& name) {
  if (name == "random-walk") return CollectPolicy::RandomWalk;
  if (name == "waypoint-tour") return CollectPolicy::WaypointTour;
  throw std::invalid_argument("unknown collect policy: " + name);
}

std::string to_string(CollectPolicy policy) {
  return policy == CollectPolicy::RandomWalk ? "random-walk" : "waypoint-tour";
}

namespace {

/// Momentum-correlated wandering with a committed escape turn after bumping
/// into something.
class RandomWalkPolicy {
 public:
  RandomWalkPolicy(const CollectParams& params, const SimParams& sim_params,
                   std::mt19937_64& rng)
      : p_(params), sp_(sim_params) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    v_level_ = 0.4 + 0.6 * u(rng);
    omega_target_ = (2.0 * u(rng) - 1.0) * 0.9 * sp_.omega_max;
    omega_ = omega_target_;
  }

  ControlCommand next(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (escape_left_ > 0) {
      --escape_left_;
      return ControlCommand{0.25 * sp_.v_max, escape_sign_ * sp_.omega_max};
    }
    if (u(rng) < p_.turn_resample_prob) {
      omega_target_ = (2.0 * u(rng) - 1.0) * 0.9 * sp_.omega_max;
      v_level_ = 0.4 + 0.6 * u(rng);
    }
    omega_ += (1.0 - p_.omega_smooth) * (omega_target_ - omega_);
    last_commanded_ = v_level_ * sp_.v_max;
    return ControlCommand{last_commanded_, omega_};
  }

  /// Called with the measured translation of the step just taken.
  void feedback(double actual_translation, std::mt19937_64& rng) {
    if (escape_left_ > 0) return;
    const double commanded = last_commanded_ * sp_.dt;
    if (commanded > 0.05 && actual_translation < 0.3 * commanded) {
      escape_left_ = p_.escape_steps;
      std::uniform_real_distribution<double> u(0.0, 1.0);
      escape_sign_ = u(rng) < 0.5 ? -1.0 : 1.0;
    }
  }

 private:
  const CollectParams& p_;
  const SimParams& sp_;
  double v_level_ = 0.7;
  double omega_target_ = 0.0;
  double omega_ = 0.0;
  double last_commanded_ = 0.0;
  int escape_left_ = 0;
  double escape_sign_ = 1.0;
};

/// Geodesic pursuit of random far waypoints, standing in for human
/// teleoperation: follows the shortest-path descent of a distance field
/// toward each waypoint, so elapsed steps track traversal distance.
class WaypointTourPolicy {
 public:
  WaypointTourPolicy(const CollectParams& params, const SimParams& sim_params,
                     const WorldMap& map, std::mt19937_64& rng)
      : p_(params), sp_(sim_params), map_(map),
        component_(map.largest_component()) {
    if (component_.empty())
      throw std::runtime_error("waypoint tour: map has no traversable cells");
  }

  ControlCommand next(const sim::RobotState& state, std::mt19937_64& rng) {
    const int cx = static_cast<int>(state.x);
    const int cy = static_cast<int>(state.y);
    ++age_;
    const bool lost = field_.empty() || !std::isfinite(at(cx, cy));
    if (lost || at(cx, cy) < p_.waypoint_tolerance ||
        age_ > p_.waypoint_patience || bumps_ >= 10) {
      pick(state, rng);
      if (field_.empty() || !std::isfinite(at(cx, cy)))
        return ControlCommand{0.0, 0.0};  // nowhere reachable from here
    }
    // Carrot two descent hops ahead keeps the pursuit from orbiting cell
    // centers.
    auto [nx, ny] = descend(cx, cy);
    std::tie(nx, ny) = descend(nx, ny);
    const double dx = nx + 0.5 - state.x;
    const double dy = ny + 0.5 - state.y;
    const double dist = std::hypot(dx, dy);
    const double phi = wrap_angle(std::atan2(dy, dx) - state.theta);
    const double omega = std::clamp(2.5 * phi, -sp_.omega_max, sp_.omega_max);
    const double v = std::clamp(1.2 * dist, 0.0, sp_.v_max) *
                     std::max(0.0, std::cos(phi));
    last_commanded_ = v;
    return ControlCommand{v, omega};
  }

  void feedback(double actual_translation) {
    const double commanded = last_commanded_ * sp_.dt;
    if (commanded > 0.05 && actual_translation < 0.3 * commanded)
      ++bumps_;
    else
      bumps_ = 0;
  }

 private:
  double at(int x, int y) const {
    if (x < 0 || y < 0 || x >= map_.width() || y >= map_.height())
      return sim::kUnreachable;
    return field_[static_cast<std::size_t>(y) * map_.width() + x];
  }

  /// Neighbor cell with the lowest field value (staying put if none better).
  std::pair<int, int> descend(int x, int y) const {
    double best = at(x, y);
    int bx = x, by = y;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx != 0 && dy != 0 &&
            (!map_.traversable_at(x + dx, y) || !map_.traversable_at(x, y + dy)))
          continue;  // no corner cutting
        const double v = at(x + dx, y + dy);
        if (v < best) {
          best = v;
          bx = x + dx;
          by = y + dy;
        }
      }
    }
    return {bx, by};
  }

  /// Chooses a far waypoint: the first of 16 candidates at least leg_min_m
  /// away by path, else the farthest reachable one seen.
  void pick(const sim::RobotState& state, std::mt19937_64& rng) {
    const std::vector<double> from_robot = sim::distance_field(
        static_cast<int>(state.x), static_cast<int>(state.y), map_);
    std::uniform_int_distribution<std::size_t> cell(0, component_.size() - 1);
    int bx = -1, by = -1;
    double best = -1.0;
    for (int attempt = 0; attempt < 16; ++attempt) {
      const auto [wx, wy] = component_[cell(rng)];
      const double d =
          from_robot[static_cast<std::size_t>(wy) * map_.width() + wx];
      if (!std::isfinite(d)) continue;
      if (d >= p_.leg_min_m) {
        bx = wx;
        by = wy;
        break;
      }
      if (d > best) {
        best = d;
        bx = wx;
        by = wy;
      }
    }
    if (bx < 0) {
      field_.clear();
      return;
    }
    field_ = sim::distance_field(bx, by, map_);
    age_ = 0;
    bumps_ = 0;
  }

  const CollectParams& p_;
  const SimParams& sp_;
  const WorldMap& map_;
  std::vector<std::pair<int, int>> component_;
  std::vector<double> field_;
  double last_commanded_ = 0.0;
  int age_ = 0;
  int bumps_ = 0;
};

}  // namespace

Trajectory collect(const WorldMap& map, const SimParams& sim_params,
                   const CollectParams& params, std::uint64_t seed, int id) {
  if (params.steps < 2) throw std::invalid_argument("collect: steps must be >= 2");
  SimParams sp = sim_params;
  if (!params.odom_noise) sp.odom_noise_frac = 0.0;

  std::mt19937_64 policy_rng(mix_seed(seed, 0xC011EC7));
  std::mt19937_64 lighting_rng(mix_seed(map.lighting_seed(), seed));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double lighting = u01(lighting_rng);

  Simulator simulator(map, sp, mix_seed(seed, 0x0D03));
  simulator.reset(sim::sample_spawn(map, sp, policy_rng), lighting);

  Trajectory traj;
  traj.id = id;
  traj.lighting = lighting;
  traj.records.reserve(static_cast<std::size_t>(params.steps));
  traj.gt_poses.reserve(static_cast<std::size_t>(params.steps));

  if (params.policy == CollectPolicy::RandomWalk) {
    RandomWalkPolicy policy(params, sp, policy_rng);
    for (int t = 0; t < params.steps; ++t) {
      Observation obs = simulator.observe();
      const ControlCommand cmd = policy.next(policy_rng);
      traj.gt_poses.push_back(simulator.state());
      const auto delta = simulator.step(cmd);
      policy.feedback(std::hypot(delta.dx, delta.dy), policy_rng);
      traj.records.push_back({std::move(obs), cmd, delta});
    }
  } else {
    WaypointTourPolicy policy(params, sp, map, policy_rng);
    for (int t = 0; t < params.steps; ++t) {
      Observation obs = simulator.observe();
      const ControlCommand cmd = policy.next(simulator.state(), policy_rng);
      traj.gt_poses.push_back(simulator.state());
      const auto delta = simulator.step(cmd);
      policy.feedback(std::hypot(delta.dx, delta.dy));
      traj.records.push_back({std::move(obs), cmd, delta});
    }
  }
  return traj;
}

TrajectorySet collect_corpus(const WorldMap& map, const SimParams& sim_params,
                             const CollectParams& params, int episodes,
                             std::uint64_t base_seed, bool mix_policies) {
  TrajectorySet set;
  set.trajectories.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    CollectParams ep = params;
    if (mix_policies)
      ep.policy = e % 2 == 0 ? CollectPolicy::RandomWalk
                             : CollectPolicy::WaypointTour;
    set.trajectories.push_back(
        collect(map, sim_params, ep, mix_seed(base_seed, static_cast<std::uint64_t>(e)), e));
  }
  return set;
}

double coverage(const WorldMap& map, const TrajectorySet& set) {
  const auto component = map.largest_component();
  if (component.empty()) return 0.0;
  std::unordered_set<long long> comp_cells, visited;
  for (const auto& [x, y] : component)
    comp_cells.insert(static_cast<long long>(y) * map.width() + x);
  for (const auto& traj : set.trajectories) {
    for (const auto& p : traj.gt_poses) {
      const long long key =
          static_cast<long long>(std::floor(p.y)) * map.width() +
          static_cast<long long>(std::floor(p.x));
      if (comp_cells.count(key)) visited.insert(key);
    }
  }
  return static_cast<double>(visited.size()) / comp_cells.size();
}

}  // namespace graphnav
