#include "doctest.h"

#include <filesystem>

#include "graphnav/collect.hpp"
#include "graphnav/trajectory.hpp"
#include "test_support.hpp"

using namespace graphnav;

TEST_CASE("trajectory binary round-trip is lossless") {
  testsup::TempDir dir("traj");
  const sim::WorldMap map = sim::generate_map(sim::MapGenParams{}, 21);
  sim::SimParams sp;
  CollectParams cp;
  cp.steps = 40;
  const Trajectory t = collect(map, sp, cp, 99, 7);
  REQUIRE(t.size() == 40);
  REQUIRE(t.gt_poses.size() == 40);

  t.save(dir.file("a.bin"));
  const Trajectory back = Trajectory::load(dir.file("a.bin"));
  CHECK(back.id == t.id);
  CHECK(back.lighting == t.lighting);
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(back.records[i].obs == t.records[i].obs);
    CHECK(static_cast<float>(back.records[i].cmd.v) ==
          static_cast<float>(t.records[i].cmd.v));
    CHECK(static_cast<float>(back.records[i].odom.dx) ==
          static_cast<float>(t.records[i].odom.dx));
    CHECK(static_cast<float>(back.records[i].odom.dtheta) ==
          static_cast<float>(t.records[i].odom.dtheta));
  }
  // Ground-truth sidecar travels alongside.
  REQUIRE(back.gt_poses.size() == t.gt_poses.size());
  CHECK(back.gt_poses[5].x == doctest::Approx(t.gt_poses[5].x));
}

TEST_CASE("trajectory without sidecar loads with empty gt_poses") {
  testsup::TempDir dir("traj");
  const sim::WorldMap map = sim::generate_map(sim::MapGenParams{}, 21);
  sim::SimParams sp;
  CollectParams cp;
  cp.steps = 10;
  Trajectory t = collect(map, sp, cp, 4, 0);
  t.save(dir.file("a.bin"));
  std::filesystem::remove(dir.file("a.bin.poses"));
  const Trajectory back = Trajectory::load(dir.file("a.bin"));
  CHECK(back.size() == 10);
  CHECK(back.gt_poses.empty());
}

TEST_CASE("odom_relative composes deltas between capture points") {
  const sim::WorldMap map = sim::generate_map(sim::MapGenParams{}, 33);
  sim::SimParams sp;
  CollectParams cp;
  cp.steps = 60;
  cp.odom_noise = false;
  const Trajectory t = collect(map, sp, cp, 5, 0);

  // Identity pair.
  const Pose2 self = t.odom_relative(10, 10);
  CHECK(self.x == doctest::Approx(0.0));
  CHECK(self.y == doctest::Approx(0.0));
  CHECK(self.theta == doctest::Approx(0.0));

  // With noise off, odometry matches ground truth.
  const Pose2 rel = t.odom_relative(5, 40);
  const Pose2 gt = relative_pose(t.gt_poses[5], t.gt_poses[40]);
  CHECK(rel.x == doctest::Approx(gt.x).epsilon(1e-5));
  CHECK(rel.y == doctest::Approx(gt.y).epsilon(1e-5));
  CHECK(std::abs(wrap_angle(rel.theta - gt.theta)) < 1e-4);
}

TEST_CASE("trajectory set directory round-trip keeps order and ids") {
  testsup::TempDir dir("set");
  const sim::WorldMap map = sim::generate_map(sim::MapGenParams{}, 3);
  const TrajectorySet set = testsup::tiny_corpus(map, 5, 20, 11);
  REQUIRE(set.size() == 5);
  CHECK(set.total_records() == 100);

  set.save_dir(dir.path());
  const TrajectorySet back = TrajectorySet::load_dir(dir.path());
  REQUIRE(back.size() == 5);
  for (int k = 0; k < 5; ++k) {
    const auto& orig = set.trajectories[static_cast<std::size_t>(k)];
    const auto& got = back.trajectories[static_cast<std::size_t>(k)];
    CHECK(got.id == k);
    REQUIRE(got.size() == orig.size());
    // Observations are stored as-is; commands and odometry as 32-bit floats.
    for (std::size_t i = 0; i < orig.size(); ++i) {
      CHECK(got.records[i].obs == orig.records[i].obs);
      CHECK(got.records[i].cmd.v ==
            static_cast<double>(static_cast<float>(orig.records[i].cmd.v)));
    }
  }
  CHECK(back.record(2, 3).obs == set.record(2, 3).obs);
}

TEST_CASE("collect is deterministic and honors the step count") {
  const sim::WorldMap map = sim::generate_map(sim::MapGenParams{}, 17);
  sim::SimParams sp;
  CollectParams cp;
  cp.steps = 2;
  const Trajectory two = collect(map, sp, cp, 1, 0);
  CHECK(two.size() == 2);

  cp.steps = 50;
  const Trajectory a = collect(map, sp, cp, 123, 0);
  const Trajectory b = collect(map, sp, cp, 123, 0);
  CHECK(a.records == b.records);
  CHECK(a.lighting == b.lighting);
  const Trajectory c = collect(map, sp, cp, 124, 0);
  CHECK(a.records != c.records);
}
