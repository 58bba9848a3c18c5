#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "graphnav/pair_dataset.hpp"
#include "test_support.hpp"

using namespace graphnav;

namespace {

TrajectorySet corpus() {
  const sim::WorldMap map = sim::generate_map(sim::MapGenParams{}, 51);
  return testsup::tiny_corpus(map, 6, 120, 400, /*noise=*/false);
}

}  // namespace

TEST_CASE("positive labels satisfy d = min(j - i, d_max) exactly") {
  const TrajectorySet set = corpus();
  const auto pos = make_positives(set, 2000, 100, kDefaultDMax, 9);
  REQUIRE(pos.size() >= 10000);
  for (const PairSample& s : pos) {
    CHECK_FALSE(s.is_negative);
    CHECK(s.traj_i == s.traj_j);
    CHECK(s.idx_i <= s.idx_j);
    CHECK(s.idx_j - s.idx_i <= 100);            // window
    CHECK(s.d == std::min(s.idx_j - s.idx_i, kDefaultDMax));  // exact label
    CHECK(s.has_pose);
  }
  // Spec formula spot values.
  CHECK(std::min(10 - 3, 50) == 7);
  CHECK(std::min(200 - 0, 50) == 50);
}

TEST_CASE("identity pairs have zero label and zero pose with noise off") {
  const TrajectorySet set = corpus();
  const auto pos = make_positives(set, 3000, 100, kDefaultDMax, 10);
  int self_pairs = 0;
  for (const PairSample& s : pos) {
    if (s.idx_i != s.idx_j) continue;
    ++self_pairs;
    CHECK(s.d == 0);
    CHECK(s.delta.x == doctest::Approx(0.0));
    CHECK(s.delta.y == doctest::Approx(0.0));
    CHECK(s.delta.theta == doctest::Approx(0.0));
  }
  CHECK(self_pairs > 0);
}

TEST_CASE("positive poses match ground truth within 1e-6 with noise off") {
  const TrajectorySet set = corpus();
  const auto pos = make_positives(set, 1500, 100, kDefaultDMax, 11);
  for (const PairSample& s : pos) {
    const auto& traj = set.trajectories[static_cast<std::size_t>(s.traj_i)];
    const Pose2 gt = relative_pose(traj.gt_poses[static_cast<std::size_t>(s.idx_i)],
                                   traj.gt_poses[static_cast<std::size_t>(s.idx_j)]);
    CHECK(std::abs(s.delta.x - gt.x) < 1e-6);
    CHECK(std::abs(s.delta.y - gt.y) < 1e-6);
    CHECK(std::abs(wrap_angle(s.delta.theta - gt.theta)) < 1e-6);
  }
}

TEST_CASE("negatives are cross-trajectory, capped, and pose-free") {
  const TrajectorySet set = corpus();
  const auto neg = make_negatives(set, 5000, kDefaultDMax, 12);
  REQUIRE(neg.size() == 5000);
  int lighting_differs = 0;
  for (const PairSample& s : neg) {
    CHECK(s.is_negative);
    CHECK(s.traj_i != s.traj_j);  // negative purity
    CHECK(s.d == kDefaultDMax);   // exactly d_max, never less
    CHECK_FALSE(s.has_pose);
    const float la = set.record(s.traj_i, s.idx_i).obs.lighting;
    const float lb = set.record(s.traj_j, s.idx_j).obs.lighting;
    if (la != lb) ++lighting_differs;
  }
  // Lighting is drawn per trajectory, so cross-trajectory pairs almost
  // always differ.
  CHECK(lighting_differs >= 4950);
}

TEST_CASE("negative mining requires at least two trajectories") {
  TrajectorySet single;
  single.trajectories.push_back(corpus().trajectories[0]);
  CHECK_THROWS_AS(make_negatives(single, 10, kDefaultDMax, 1),
                  std::invalid_argument);
}

TEST_CASE("make_dataset honors the negative ratio and window") {
  const TrajectorySet set = corpus();
  DatasetParams params;
  params.pairs_per_traj = 500;
  params.window = 60;
  params.negative_ratio = 0.5;
  const Dataset ds = make_dataset(set, params, 77);
  CHECK(ds.positives.size() == 6 * 500);
  CHECK(ds.negatives.size() == ds.positives.size() / 2);
  for (const PairSample& s : ds.positives) CHECK(s.idx_j - s.idx_i <= 60);
}

TEST_CASE("dataset sampling is deterministic per seed") {
  const TrajectorySet set = corpus();
  DatasetParams params;
  params.pairs_per_traj = 200;
  const Dataset a = make_dataset(set, params, 5);
  const Dataset b = make_dataset(set, params, 5);
  REQUIRE(a.positives.size() == b.positives.size());
  for (std::size_t i = 0; i < a.positives.size(); ++i) {
    CHECK(a.positives[i].idx_i == b.positives[i].idx_i);
    CHECK(a.positives[i].idx_j == b.positives[i].idx_j);
  }
  const Dataset c = make_dataset(set, params, 6);
  bool any_differ = false;
  for (std::size_t i = 0; i < a.positives.size() && i < c.positives.size(); ++i)
    if (a.positives[i].idx_i != c.positives[i].idx_i) any_differ = true;
  CHECK(any_differ);
}

TEST_CASE("dataset binary round-trip is lossless") {
  testsup::TempDir dir("ds");
  const TrajectorySet set = corpus();
  DatasetParams params;
  params.pairs_per_traj = 300;
  const Dataset ds = make_dataset(set, params, 21);
  ds.save(dir.file("d.bin"));
  const Dataset back = Dataset::load(dir.file("d.bin"));
  CHECK(back.d_max == ds.d_max);
  REQUIRE(back.positives.size() == ds.positives.size());
  REQUIRE(back.negatives.size() == ds.negatives.size());
  for (std::size_t i = 0; i < ds.positives.size(); ++i) {
    const auto& a = ds.positives[i];
    const auto& b = back.positives[i];
    CHECK(a.traj_i == b.traj_i);
    CHECK(a.idx_i == b.idx_i);
    CHECK(a.traj_j == b.traj_j);
    CHECK(a.idx_j == b.idx_j);
    CHECK(a.d == b.d);
    CHECK(a.is_negative == b.is_negative);
    CHECK(a.has_pose == b.has_pose);
    CHECK(a.delta.x == b.delta.x);  // bit-exact doubles
    CHECK(a.delta.y == b.delta.y);
    CHECK(a.delta.theta == b.delta.theta);
  }
  for (std::size_t i = 0; i < ds.negatives.size(); ++i) {
    CHECK(back.negatives[i].d == kDefaultDMax);
    CHECK_FALSE(back.negatives[i].has_pose);
  }
}
