#include "doctest.h"

#include <cmath>
#include <queue>
#include <random>
#include <vector>

#include "graphnav/geometry.hpp"
#include "graphnav/simulator.hpp"
#include "test_support.hpp"

using namespace graphnav;
using namespace graphnav::sim;

namespace {

SimParams noiseless() {
  SimParams p;
  p.odom_noise_frac = 0.0;
  return p;
}

/// Independent ray oracle: march in tiny steps until a blocking cell.
double march_ray(const RobotState& s, double bearing, const WorldMap& map,
                 double max_range) {
  const double ang = s.theta + bearing;
  const double step = 1e-3;
  for (double r = step; r <= max_range; r += step) {
    const int cx = static_cast<int>(std::floor(s.x + r * std::cos(ang)));
    const int cy = static_cast<int>(std::floor(s.y + r * std::sin(ang)));
    if (!map.in_bounds(cx, cy) || blocks_rays(map.at(cx, cy))) return r;
  }
  return max_range;
}

/// Independent grid-BFS oracle for shortest traversable path, 8-connected
/// with no corner cutting, unit/diagonal step costs.
double bfs_distance(int ax, int ay, int bx, int by, const WorldMap& map) {
  const int w = map.width(), h = map.height();
  std::vector<double> dist(static_cast<std::size_t>(w) * h, -1.0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(ay) * w + ax] = 0.0;
  pq.emplace(0.0, ay * w + ax);
  while (!pq.empty()) {
    const auto [d, id] = pq.top();
    pq.pop();
    const int x = id % w, y = id / w;
    if (d > dist[static_cast<std::size_t>(id)]) continue;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int nx = x + dx, ny = y + dy;
        if (!map.traversable_at(nx, ny)) continue;
        if (dx != 0 && dy != 0 &&
            (!map.traversable_at(x + dx, y) || !map.traversable_at(x, y + dy)))
          continue;
        const double nd = d + ((dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0);
        auto& slot = dist[static_cast<std::size_t>(ny) * w + nx];
        if (slot < 0.0 || nd < slot) {
          slot = nd;
          pq.emplace(nd, ny * w + nx);
        }
      }
    }
  }
  const double d = dist[static_cast<std::size_t>(by) * w + bx];
  return d < 0.0 ? kUnreachable : d;
}

}  // namespace

TEST_CASE("step integrates straight-line motion on open ground") {
  const WorldMap map = testsup::open_map(20, 20);
  const SimParams p = noiseless();
  const RobotState s{5.0, 5.0, 0.0};
  const RobotState out = step_state(s, {1.0, 0.0}, 1.0, map, p);
  CHECK(out.x == doctest::Approx(6.0));
  CHECK(out.y == doctest::Approx(5.0));
  CHECK(out.theta == doctest::Approx(0.0));
}

TEST_CASE("step handles pure rotation") {
  const WorldMap map = testsup::open_map(20, 20);
  const RobotState out =
      step_state({5.0, 5.0, 0.0}, {0.0, M_PI / 2.0}, 1.0, map, noiseless());
  CHECK(out.x == doctest::Approx(5.0));
  CHECK(out.y == doctest::Approx(5.0));
  CHECK(out.theta == doctest::Approx(M_PI / 2.0));
}

TEST_CASE("step clamps commands to the actuator bounds") {
  const WorldMap map = testsup::open_map(20, 20);
  const SimParams p = noiseless();
  // v above v_max moves at v_max; negative v moves not at all.
  RobotState out = step_state({5, 5, 0}, {99.0, 0.0}, 1.0, map, p);
  CHECK(out.x == doctest::Approx(5.0 + p.v_max));
  out = step_state({5, 5, 0}, {-3.0, 0.0}, 1.0, map, p);
  CHECK(out.x == doctest::Approx(5.0));
  out = step_state({5, 5, 0}, {0.0, 99.0}, 1.0, map, p);
  CHECK(out.theta == doctest::Approx(p.omega_max));
}

TEST_CASE("step stops at a wall boundary minus robot radius") {
  // Wall cell column starts at x = 10; robot 0.4 m before it drives in.
  WorldMap map = testsup::open_map(20, 20);
  for (int y = 1; y < 19; ++y) map.set(10, y, Terrain::Wall);
  const SimParams p = noiseless();
  const RobotState out =
      step_state({9.6, 5.5, 0.0}, {1.0, 0.0}, 1.0, map, p);
  // Analytic contact: disc center cannot pass x = 10 - radius; the collision
  // bisection resolves the contact point to ~1e-12.
  CHECK(out.x == doctest::Approx(10.0 - p.robot_radius).epsilon(1e-9));
  CHECK(out.y == doctest::Approx(5.5));
  CHECK(in_collision(out.x, out.y, map, p.robot_radius) == false);
}

TEST_CASE("step never leaves the robot inside an obstacle") {
  const WorldMap map = testsup::detour_map();
  const SimParams p = noiseless();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> v(0.0, 2.0), w(-2.0, 2.0);
  RobotState s = sample_spawn(map, p, rng);
  for (int t = 0; t < 2000; ++t) {
    s = step_state(s, {v(rng), w(rng)}, p.dt, map, p);
    REQUIRE_FALSE(in_collision(s.x, s.y, map, p.robot_radius));
    const int cx = static_cast<int>(std::floor(s.x));
    const int cy = static_cast<int>(std::floor(s.y));
    REQUIRE(map.traversable_at(cx, cy));
  }
}

TEST_CASE("tall grass is entered freely, bush is not") {
  WorldMap map = testsup::open_map(20, 20);
  for (int y = 1; y < 19; ++y) map.set(10, y, Terrain::TallGrass);
  const SimParams p = noiseless();
  RobotState out = step_state({9.6, 5.5, 0.0}, {1.0, 0.0}, 1.0, map, p);
  CHECK(out.x == doctest::Approx(10.6));  // drove straight through

  for (int y = 1; y < 19; ++y) map.set(10, y, Terrain::Bush);
  out = step_state({9.6, 5.5, 0.0}, {1.0, 0.0}, 1.0, map, p);
  CHECK(out.x < 10.0);  // blocked like a wall
}

TEST_CASE("rays in an empty region report max range and background code") {
  const WorldMap map = testsup::open_map(40, 40);
  const SimParams p = noiseless();
  const Snapshot snap = cast_rays({20.0, 20.0, 0.0}, map, p);
  REQUIRE(static_cast<int>(snap.rays.size()) == 2 * p.ray_count);
  for (int k = 0; k < p.ray_count; ++k) {
    CHECK(snap.rays[static_cast<std::size_t>(2 * k)] ==
          doctest::Approx(p.max_range));
    CHECK(snap.rays[static_cast<std::size_t>(2 * k + 1)] ==
          doctest::Approx(kAppearanceBackground));
  }
}

TEST_CASE("center ray facing a wall reports the wall distance and code") {
  WorldMap map = testsup::open_map(20, 20);
  for (int y = 1; y < 19; ++y) map.set(12, y, Terrain::Wall);
  const SimParams p = noiseless();
  const Snapshot snap = cast_rays({10.0, 5.5, 0.0}, map, p);
  // With an even ray count the two middle rays straddle the centerline at
  // +-fan/(2(R-1)); both hit the wall slightly obliquely at ~2 m.
  const int mid = p.ray_count / 2;
  const double d = snap.rays[static_cast<std::size_t>(2 * mid)];
  CHECK(d == doctest::Approx(2.0).epsilon(0.02));
  const int code = static_cast<int>(snap.rays[static_cast<std::size_t>(2 * mid + 1)]);
  CHECK(code >= 17);
  CHECK(code <= 24);
}

TEST_CASE("holes are invisible to rays") {
  WorldMap map = testsup::open_map(20, 20);
  for (int y = 1; y < 19; ++y) map.set(12, y, Terrain::Hole);
  const Snapshot with_hole = cast_rays({10.0, 5.5, 0.0}, map, noiseless());
  const Snapshot without =
      cast_rays({10.0, 5.5, 0.0}, testsup::open_map(20, 20), noiseless());
  CHECK(with_hole == without);
}

TEST_CASE("cast_rays matches a fine-grained marching oracle") {
  const WorldMap map = generate_map(MapGenParams{}, 77);
  const SimParams p = noiseless();
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    const RobotState s = sample_spawn(map, p, rng);
    const Snapshot snap = cast_rays(s, map, p);
    for (int k = 0; k < p.ray_count; ++k) {
      const double frac =
          p.ray_count == 1 ? 0.5 : static_cast<double>(k) / (p.ray_count - 1);
      const double bearing = -0.5 * p.fan_angle + frac * p.fan_angle;
      const double expect = march_ray(s, bearing, map, p.max_range);
      CHECK(snap.rays[static_cast<std::size_t>(2 * k)] ==
            doctest::Approx(expect).epsilon(0.01));
    }
  }
}

TEST_CASE("observations differ only in the lighting channel") {
  const WorldMap map = generate_map(MapGenParams{}, 3);
  const SimParams p = noiseless();
  std::mt19937_64 rng(5);
  const RobotState s = sample_spawn(map, p, rng);
  const Observation a = observe(s, map, 0.2, p);
  const Observation b = observe(s, map, 0.9, p);
  CHECK(a.frames == b.frames);
  CHECK(a.lighting != b.lighting);
  CHECK(a.dim() == static_cast<std::size_t>(4 * p.ray_count + 1));
}

TEST_CASE("ground_truth_distance basics") {
  const WorldMap map = testsup::open_map(20, 20);
  CHECK(ground_truth_distance(5.3, 5.7, 5.3, 5.7, map) == doctest::Approx(0.0));
  // Straight open corridor: 10 m apart along x.
  CHECK(ground_truth_distance(4.5, 10.5, 14.5, 10.5, map) ==
        doctest::Approx(10.0).epsilon(0.1));
  CHECK_THROWS(ground_truth_distance(0.5, 0.5, 5.0, 5.0, map));  // wall cell
}

TEST_CASE("ground_truth_distance takes the detour around a wall") {
  const WorldMap map = testsup::detour_map();
  // Wall column at x=7 spans y=3..9; path from (5.5, 8.5) to (9.5, 8.5)
  // must climb to the gap at y <= 2.
  const double d = ground_truth_distance(5.5, 8.5, 9.5, 8.5, map);
  const double oracle = bfs_distance(5, 8, 9, 8, map);
  CHECK(d == doctest::Approx(oracle));
  CHECK(d > 10.0);  // much longer than the 4 m straight line
}

TEST_CASE("ground_truth_distance equals the oracle on random map pairs") {
  const WorldMap map = generate_map(MapGenParams{}, 41);
  std::mt19937_64 rng(7);
  const auto comp = map.largest_component();
  std::uniform_int_distribution<std::size_t> pick(0, comp.size() - 1);
  for (int i = 0; i < 30; ++i) {
    const auto [ax, ay] = comp[pick(rng)];
    const auto [bx, by] = comp[pick(rng)];
    const double d = ground_truth_distance(ax + 0.5, ay + 0.5, bx + 0.5,
                                           by + 0.5, map);
    CHECK(d == doctest::Approx(bfs_distance(ax, ay, bx, by, map)));
  }
}

TEST_CASE("distance_field marks unreachable pockets") {
  const WorldMap m = WorldMap::from_ascii(
      "#######\n"
      "#..#..#\n"
      "#..#..#\n"
      "#######\n",
      3);
  const auto field = distance_field(1, 1, m);
  CHECK(field[static_cast<std::size_t>(2) * 7 + 2] < kUnreachable);
  CHECK(field[static_cast<std::size_t>(1) * 7 + 4] == kUnreachable);
  CHECK(field[static_cast<std::size_t>(0) * 7 + 0] == kUnreachable);  // wall
  CHECK(field[static_cast<std::size_t>(1) * 7 + 1] == doctest::Approx(0.0));
}

TEST_CASE("odometry composes to the true displacement when noise is off") {
  const WorldMap map = generate_map(MapGenParams{}, 9);
  SimParams p = noiseless();
  Simulator simulator(map, p, 42);
  std::mt19937_64 rng(31);
  simulator.reset(sample_spawn(map, p, rng), 0.5);
  const RobotState start = simulator.state();
  Pose2 acc{};
  std::uniform_real_distribution<double> v(0.0, 1.5), w(-1.5, 1.5);
  for (int t = 0; t < 300; ++t) {
    const OdometryDelta d = simulator.step({v(rng), w(rng)});
    acc = compose(acc, Pose2{d.dx, d.dy, d.dtheta});
  }
  const Pose2 true_delta = relative_pose(start, simulator.state());
  CHECK(std::abs(acc.x - true_delta.x) < 1e-9);
  CHECK(std::abs(acc.y - true_delta.y) < 1e-9);
  CHECK(std::abs(wrap_angle(acc.theta - true_delta.theta)) < 1e-9);
}

TEST_CASE("simulator runs are deterministic per seed") {
  const WorldMap map = generate_map(MapGenParams{}, 11);
  SimParams p;  // with odometry noise on
  auto run = [&]() {
    Simulator simulator(map, p, 1234);
    std::mt19937_64 rng(8);
    simulator.reset(sample_spawn(map, p, rng), 0.3);
    std::vector<double> trace;
    for (int t = 0; t < 100; ++t) {
      const OdometryDelta d = simulator.step({1.0, 0.3});
      trace.push_back(d.dx);
      trace.push_back(d.dy);
      trace.push_back(d.dtheta);
    }
    trace.push_back(simulator.state().x);
    trace.push_back(simulator.state().y);
    return trace;
  };
  CHECK(run() == run());
}

TEST_CASE("observe stacks the previous snapshot in front") {
  const WorldMap map = generate_map(MapGenParams{}, 13);
  SimParams p = noiseless();
  Simulator simulator(map, p, 5);
  std::mt19937_64 rng(2);
  simulator.reset(sample_spawn(map, p, rng), 0.5);

  // Immediately after reset both frames hold the same snapshot.
  const Observation o0 = simulator.observe();
  const std::size_t half = o0.frames.size() / 2;
  for (std::size_t i = 0; i < half; ++i)
    CHECK(o0.frames[i] == o0.frames[half + i]);

  // After one step the first half is the pre-step snapshot.
  simulator.step({1.0, 0.0});
  const Observation o1 = simulator.observe();
  for (std::size_t i = 0; i < half; ++i)
    CHECK(o1.frames[i] == o0.frames[half + i]);
}
