#include "graphnav/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace graphnav::sim {

namespace {

/// Squared distance from point (px, py) to the axis-aligned unit cell with
/// lower corner (cx, cy).
double cell_dist_sq(double px, double py, int cx, int cy) {
  const double nx = std::clamp(px, static_cast<double>(cx), cx + 1.0);
  const double ny = std::clamp(py, static_cast<double>(cy), cy + 1.0);
  const double dx = px - nx;
  const double dy = py - ny;
  return dx * dx + dy * dy;
}

}  // namespace

bool in_collision(double x, double y, const WorldMap& map, double radius) {
  const int x0 = static_cast<int>(std::floor(x - radius));
  const int x1 = static_cast<int>(std::floor(x + radius));
  const int y0 = static_cast<int>(std::floor(y - radius));
  const int y1 = static_cast<int>(std::floor(y + radius));
  const double r_sq = radius * radius;
  for (int cy = y0; cy <= y1; ++cy) {
    for (int cx = x0; cx <= x1; ++cx) {
      if (traversable(map.at_clamped(cx, cy))) continue;
      if (cell_dist_sq(x, y, cx, cy) < r_sq) return true;
    }
  }
  return false;
}

RobotState step_state(const RobotState& state, const ControlCommand& cmd,
                      double dt, const WorldMap& map, const SimParams& params) {
  const double v = std::clamp(cmd.v, 0.0, params.v_max);
  const double omega = std::clamp(cmd.omega, -params.omega_max, params.omega_max);
  const double theta_next = wrap_angle(state.theta + omega * dt);
  const double len = v * dt;
  if (len <= 0.0) return RobotState{state.x, state.y, theta_next};

  const double dx = std::cos(state.theta);
  const double dy = std::sin(state.theta);
  auto free_at = [&](double t) {
    return !in_collision(state.x + t * dx, state.y + t * dy, map,
                         params.robot_radius);
  };

  // Coarse march to bracket the first contact, then bisect. The march step is
  // small relative to the robot radius so that no blocked cell can be jumped
  // over entirely.
  const double march = params.robot_radius * 0.25;
  double lo = 0.0;
  double hi = -1.0;
  for (double t = march; t < len + march; t += march) {
    const double tc = std::min(t, len);
    if (free_at(tc)) {
      lo = tc;
      if (tc >= len) break;
    } else {
      hi = tc;
      break;
    }
  }
  if (hi >= 0.0) {
    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (free_at(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  return RobotState{state.x + lo * dx, state.y + lo * dy, theta_next};
}

Snapshot cast_rays(const RobotState& state, const WorldMap& map,
                   const SimParams& params) {
  Snapshot snap;
  snap.rays.resize(static_cast<size_t>(2 * params.ray_count));
  for (int i = 0; i < params.ray_count; ++i) {
    const double frac =
        params.ray_count > 1
            ? static_cast<double>(i) / (params.ray_count - 1)
            : 0.5;
    const double ang =
        state.theta - 0.5 * params.fan_angle + params.fan_angle * frac;
    const double dx = std::cos(ang);
    const double dy = std::sin(ang);

    int cx = static_cast<int>(std::floor(state.x));
    int cy = static_cast<int>(std::floor(state.y));
    const int step_x = dx >= 0.0 ? 1 : -1;
    const int step_y = dy >= 0.0 ? 1 : -1;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const double t_delta_x = dx != 0.0 ? 1.0 / std::abs(dx) : kInf;
    const double t_delta_y = dy != 0.0 ? 1.0 / std::abs(dy) : kInf;
    double t_max_x =
        dx != 0.0 ? (dx > 0.0 ? (cx + 1.0 - state.x) : (state.x - cx)) / std::abs(dx)
                  : kInf;
    double t_max_y =
        dy != 0.0 ? (dy > 0.0 ? (cy + 1.0 - state.y) : (state.y - cy)) / std::abs(dy)
                  : kInf;

    double dist = params.max_range;
    int code = kAppearanceBackground;
    // Grid traversal; the robot's own cell never blocks its view.
    while (true) {
      double t_entry;
      if (t_max_x < t_max_y) {
        cx += step_x;
        t_entry = t_max_x;
        t_max_x += t_delta_x;
      } else {
        cy += step_y;
        t_entry = t_max_y;
        t_max_y += t_delta_y;
      }
      if (t_entry >= params.max_range) break;
      if (!map.in_bounds(cx, cy)) break;
      if (blocks_rays(map.at(cx, cy))) {
        dist = t_entry;
        code = map.appearance_code(cx, cy);
        break;
      }
    }
    snap.rays[static_cast<size_t>(2 * i)] = static_cast<float>(dist);
    snap.rays[static_cast<size_t>(2 * i + 1)] = static_cast<float>(code);
  }
  return snap;
}

Observation observe(const RobotState& state, const WorldMap& map,
                    double lighting, const SimParams& params) {
  const Snapshot snap = cast_rays(state, map, params);
  Observation obs;
  obs.ray_count = params.ray_count;
  obs.frames = snap.rays;
  obs.frames.insert(obs.frames.end(), snap.rays.begin(), snap.rays.end());
  obs.lighting = static_cast<float>(lighting);
  return obs;
}

std::vector<double> distance_field(int cx, int cy, const WorldMap& map) {
  const int w = map.width();
  const int h = map.height();
  std::vector<double> dist(static_cast<size_t>(w) * h, kUnreachable);
  if (!map.traversable_at(cx, cy)) return dist;

  using Item = std::pair<double, int>;  // (distance, y * w + x)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[static_cast<size_t>(cy) * w + cx] = 0.0;
  queue.emplace(0.0, cy * w + cx);
  constexpr double kSqrt2 = 1.4142135623730951;
  while (!queue.empty()) {
    const auto [d, idx] = queue.top();
    queue.pop();
    if (d > dist[static_cast<size_t>(idx)]) continue;
    const int x = idx % w;
    const int y = idx / w;
    for (int dyy = -1; dyy <= 1; ++dyy) {
      for (int dxx = -1; dxx <= 1; ++dxx) {
        if (dxx == 0 && dyy == 0) continue;
        const int nx = x + dxx;
        const int ny = y + dyy;
        if (!map.traversable_at(nx, ny)) continue;
        // Diagonal moves must not cut corners past a blocked cell.
        if (dxx != 0 && dyy != 0 &&
            (!map.traversable_at(x + dxx, y) || !map.traversable_at(x, y + dyy)))
          continue;
        const double step = (dxx != 0 && dyy != 0) ? kSqrt2 : 1.0;
        const double nd = d + step;
        const size_t nidx = static_cast<size_t>(ny) * w + nx;
        if (nd < dist[nidx]) {
          dist[nidx] = nd;
          queue.emplace(nd, ny * w + nx);
        }
      }
    }
  }
  return dist;
}

double ground_truth_distance(double ax, double ay, double bx, double by,
                             const WorldMap& map) {
  const int acx = static_cast<int>(std::floor(ax));
  const int acy = static_cast<int>(std::floor(ay));
  const int bcx = static_cast<int>(std::floor(bx));
  const int bcy = static_cast<int>(std::floor(by));
  if (!map.traversable_at(acx, acy) || !map.traversable_at(bcx, bcy))
    throw std::invalid_argument("ground_truth_distance: endpoint not traversable");
  if (acx == bcx && acy == bcy) return std::hypot(bx - ax, by - ay);
  // Cell-to-cell shortest path with early exit at the goal cell.
  const int w = map.width();
  const int goal_idx = bcy * w + bcx;
  std::vector<double> dist(static_cast<size_t>(w) * map.height(), kUnreachable);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[static_cast<size_t>(acy) * w + acx] = 0.0;
  queue.emplace(0.0, acy * w + acx);
  constexpr double kSqrt2 = 1.4142135623730951;
  while (!queue.empty()) {
    const auto [d, idx] = queue.top();
    queue.pop();
    if (idx == goal_idx) return d;
    if (d > dist[static_cast<size_t>(idx)]) continue;
    const int x = idx % w;
    const int y = idx / w;
    for (int dyy = -1; dyy <= 1; ++dyy) {
      for (int dxx = -1; dxx <= 1; ++dxx) {
        if (dxx == 0 && dyy == 0) continue;
        const int nx = x + dxx;
        const int ny = y + dyy;
        if (!map.traversable_at(nx, ny)) continue;
        if (dxx != 0 && dyy != 0 &&
            (!map.traversable_at(x + dxx, y) || !map.traversable_at(x, y + dyy)))
          continue;
        const double step = (dxx != 0 && dyy != 0) ? kSqrt2 : 1.0;
        const double nd = d + step;
        const size_t nidx = static_cast<size_t>(ny) * w + nx;
        if (nd < dist[nidx]) {
          dist[nidx] = nd;
          queue.emplace(nd, ny * w + nx);
        }
      }
    }
  }
  return kUnreachable;
}

RobotState sample_spawn(const WorldMap& map, const SimParams& params,
                        std::mt19937_64& rng) {
  const auto component = map.largest_component();
  if (component.empty())
    throw std::runtime_error("sample_spawn: map has no traversable cells");
  std::uniform_int_distribution<size_t> pick(0, component.size() - 1);
  const double r = params.robot_radius;
  std::uniform_real_distribution<double> off(r, 1.0 - r);
  std::uniform_real_distribution<double> heading(-M_PI, M_PI);
  // Any disc fully inside a traversable cell is collision free.
  const auto [cx, cy] = component[pick(rng)];
  return RobotState{cx + off(rng), cy + off(rng), heading(rng)};
}

Simulator::Simulator(WorldMap map, SimParams params, std::uint64_t seed)
    : map_(std::move(map)), params_(params), rng_(seed) {
  state_ = RobotState{};
  prev_snap_ = Snapshot{};
}

void Simulator::reset(const RobotState& state, double lighting) {
  state_ = state;
  lighting_ = lighting;
  prev_snap_ = cast_rays(state_, map_, params_);
}

Observation Simulator::observe() const {
  const Snapshot now = cast_rays(state_, map_, params_);
  Observation obs;
  obs.ray_count = params_.ray_count;
  obs.frames = prev_snap_.rays;
  obs.frames.insert(obs.frames.end(), now.rays.begin(), now.rays.end());
  obs.lighting = static_cast<float>(lighting_);
  return obs;
}

OdometryDelta Simulator::step(const ControlCommand& cmd) {
  prev_snap_ = cast_rays(state_, map_, params_);
  const RobotState before = state_;
  state_ = step_state(state_, cmd, params_.dt, map_, params_);
  const Pose2 true_delta = relative_pose(before, state_);

  // Noise scales with the executed motion; a stationary robot reports zeros.
  std::normal_distribution<double> unit(0.0, 1.0);
  const double n1 = unit(rng_);
  const double n2 = unit(rng_);
  const double n3 = unit(rng_);
  const double trans = std::hypot(true_delta.x, true_delta.y);
  const double sigma_xy = params_.odom_noise_frac * trans;
  const double sigma_th = params_.odom_noise_frac * std::abs(true_delta.theta);
  return OdometryDelta{true_delta.x + sigma_xy * n1,
                       true_delta.y + sigma_xy * n2,
                       wrap_angle(true_delta.theta + sigma_th * n3)};
}

}  // namespace graphnav::sim
