#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "graphnav/models.hpp"
#include "test_support.hpp"

using namespace graphnav;

TEST_CASE("encoded dimension covers rays, features and lighting") {
  const Normalizer norm;
  // Per ray: distance, cartesian x, cartesian y, 3 group one-hots, 8
  // sub-code one-hots; two frames; one lighting scalar.
  CHECK(Normalizer::kFeaturesPerRay == 14);
  CHECK(norm.encoded_dim(16) == 2 * 14 * 16 + 1);
  CHECK(norm.encoded_dim(4) == 113);
}

TEST_CASE("encode writes the documented per-ray layout") {
  Normalizer norm;
  norm.range_scale = 1.0 / 12.0;
  norm.lighting_scale = 1.0;
  norm.fan_deg = 170.0;
  const int rays = 4;

  sim::Observation obs = testsup::flat_observation(rays, 0.0f, 0.0f, 0.25f);
  // Ray 1 of the current frame (second half): distance 6, code 10
  // (vegetation group 1, sub-code 1).
  const int k = rays + 1;  // frame-major ray index
  obs.frames[static_cast<std::size_t>(2 * k)] = 6.0f;
  obs.frames[static_cast<std::size_t>(2 * k + 1)] = 10.0f;

  std::vector<double> enc(static_cast<std::size_t>(norm.encoded_dim(rays)));
  norm.encode(obs, enc.data());

  const double fan = 170.0 * M_PI / 180.0;
  const double bearing = -0.5 * fan + fan * (1.0 / (rays - 1));
  const double* p = enc.data() + k * Normalizer::kFeaturesPerRay;
  CHECK(p[0] == doctest::Approx(6.0 / 12.0));
  CHECK(p[1] == doctest::Approx(6.0 / 12.0 * std::cos(bearing)));
  CHECK(p[2] == doctest::Approx(6.0 / 12.0 * std::sin(bearing)));
  CHECK(p[3 + 1] == doctest::Approx(1.0));  // vegetation group one-hot
  CHECK(p[3 + 0] == doctest::Approx(0.0));
  CHECK(p[6 + 1] == doctest::Approx(1.0));  // sub-code 1 one-hot
  CHECK(p[6 + 0] == doctest::Approx(0.0));

  // Background code rays encode as all-zero one-hots.
  const double* q = enc.data();  // ray 0, frame 0: dist 0, code 0
  for (int f = 3; f < Normalizer::kFeaturesPerRay; ++f)
    CHECK(q[f] == doctest::Approx(0.0));

  // Lighting lands in the final slot.
  CHECK(enc.back() == doctest::Approx(0.25));
  norm.lighting_scale = 2.0;
  norm.encode(obs, enc.data());
  CHECK(enc.back() == doctest::Approx(0.5));
}

TEST_CASE("equal appearance codes produce equal features") {
  // The code value itself must not leak metric structure: two observations
  // differing only by which cell produced the same code are identical.
  const Normalizer norm;
  const auto a = testsup::flat_observation(8, 3.0f, 12.0f);
  const auto b = testsup::flat_observation(8, 3.0f, 12.0f);
  std::vector<double> ea(static_cast<std::size_t>(norm.encoded_dim(8)));
  std::vector<double> eb = ea;
  norm.encode(a, ea.data());
  norm.encode(b, eb.data());
  CHECK(ea == eb);
}

TEST_CASE("softmax normalizes within 1e-6 even for extreme logits") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-300.0, 300.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd logits(50);
    for (int i = 0; i < 50; ++i) logits(i) = uni(rng);
    const Eigen::VectorXd p = softmax(logits);
    CHECK(std::abs(p.sum() - 1.0) < 1e-6);
    CHECK(p.minCoeff() >= 0.0);
  }
}

TEST_CASE("expected_distance on canonical distributions") {
  Eigen::VectorXd logits = Eigen::VectorXd::Constant(50, -1e9);
  logits(0) = 0.0;  // one-hot bin 0 -> distance 1
  CHECK(expected_distance(logits) == doctest::Approx(1.0));
  logits.setConstant(-1e9);
  logits(49) = 0.0;  // one-hot last bin -> d_max
  CHECK(expected_distance(logits) == doctest::Approx(50.0));
  logits.setZero();  // uniform over 1..50
  CHECK(expected_distance(logits) == doctest::Approx(25.5));
}

TEST_CASE("expected_distance stays in [1, d_max] for arbitrary logits") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(-50.0, 50.0);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::VectorXd logits(50);
    for (int i = 0; i < 50; ++i) logits(i) = uni(rng);
    const double ed = expected_distance(logits);
    CHECK(ed >= 1.0);
    CHECK(ed <= 50.0);
  }
}

TEST_CASE("distance_to_bin folds d = 0 into bin 0") {
  CHECK(distance_to_bin(0, 50) == 0);
  CHECK(distance_to_bin(1, 50) == 0);
  CHECK(distance_to_bin(2, 50) == 1);
  CHECK(distance_to_bin(50, 50) == 49);
}

TEST_CASE("fresh model with zeroed head yields the uniform expectation") {
  const Normalizer norm;
  TraversabilityModel T =
      TraversabilityModel::make(8, norm, 50, {32, 32}, 123);
  const int last = T.pair.net.layer_count() - 1;
  T.pair.net.weight(last).setZero();
  T.pair.net.bias(last).setZero();
  const auto a = testsup::random_observation(8, 1);
  const auto b = testsup::random_observation(8, 2);
  const Eigen::VectorXd logits = T.logits(a, b);
  REQUIRE(logits.size() == 50);
  CHECK(logits.norm() == doctest::Approx(0.0));
  CHECK(T.expected(a, b) == doctest::Approx(25.5));
}

TEST_CASE("model forward is deterministic and respects output dims") {
  const Normalizer norm;
  const TraversabilityModel T =
      TraversabilityModel::make(16, norm, 50, {64}, 5);
  const PoseModel P = PoseModel::make(16, norm, {64}, 6);
  const auto a = testsup::random_observation(16, 3);
  const auto b = testsup::random_observation(16, 4);
  CHECK(T.logits(a, b) == T.logits(a, b));
  const Pose2 dp = P.predict(a, b);
  const Pose2 dp2 = P.predict(a, b);
  CHECK(dp.x == dp2.x);
  CHECK(dp.y == dp2.y);
  CHECK(dp.theta == dp2.theta);
}

TEST_CASE("traversability checkpoint round-trips with optimizer state") {
  const Normalizer norm{1.0 / 12.0, 1.0, 170.0};
  TraversabilityModel T = TraversabilityModel::make(8, norm, 50, {32}, 9);
  AdamOptimizer opt(T.pair.net.params().size(), 2e-4);
  Eigen::VectorXd g = Eigen::VectorXd::Constant(T.pair.net.params().size(), 0.01);
  opt.step(T.pair.net.params(), g);

  std::stringstream buf;
  T.save(buf, &opt);
  std::optional<AdamOptimizer> opt_back;
  const TraversabilityModel back = TraversabilityModel::load(buf, &opt_back);
  CHECK(back.d_max == 50);
  CHECK(back.pair.ray_count == 8);
  CHECK(back.pair.norm == T.pair.norm);  // includes fan_deg
  CHECK(back.pair.net.params() == T.pair.net.params());
  REQUIRE(opt_back.has_value());
  CHECK(opt_back->steps() == 1);
  CHECK(opt_back->first_moment() == opt.first_moment());
}

TEST_CASE("pose and bc checkpoints round-trip") {
  const Normalizer norm;
  PoseModel P = PoseModel::make(8, norm, {16, 16}, 3);
  std::stringstream buf;
  P.save(buf);
  const PoseModel pb = PoseModel::load(buf);
  CHECK(pb.pair.net.params() == P.pair.net.params());
  CHECK(pb.pair.net.output_dim() == 3);

  BcModel bc = BcModel::make(8, norm, true, 7, {16}, 4);
  std::stringstream buf2;
  bc.save(buf2);
  const BcModel bcb = BcModel::load(buf2);
  CHECK(bcb.discrete);
  CHECK(bcb.pair.net.params() == bc.pair.net.params());
  CHECK(bcb.pair.net.output_dim() == 7);
}

TEST_CASE("model bundle stores any subset of models") {
  testsup::TempDir dir("bundle");
  const Normalizer norm;
  ModelBundle bundle;
  bundle.T = TraversabilityModel::make(8, norm, 50, {16}, 1);
  bundle.P = PoseModel::make(8, norm, {16}, 2);
  bundle.save(dir.file("m.bin"));
  const ModelBundle back = ModelBundle::load(dir.file("m.bin"));
  REQUIRE(back.T.has_value());
  REQUIRE(back.P.has_value());
  CHECK_FALSE(back.bc.has_value());
  CHECK(back.T->pair.net.params() == bundle.T->pair.net.params());
  CHECK(back.P->pair.net.params() == bundle.P->pair.net.params());
}

TEST_CASE("pairwise scorer matches direct pair evaluation") {
  const Normalizer norm;
  const TraversabilityModel T =
      TraversabilityModel::make(8, norm, 50, {48, 48}, 77);
  std::vector<sim::Observation> obs;
  for (int i = 0; i < 12; ++i) obs.push_back(testsup::random_observation(8, 100 + i));

  PairwiseScorer scorer(T);
  std::vector<const Observation*> ptrs;
  for (const auto& o : obs) ptrs.push_back(&o);
  scorer.set_nodes(ptrs);
  REQUIRE(scorer.node_count() == 12);

  for (int u = 0; u < 12; ++u) {
    const Eigen::VectorXd row = scorer.from_node(u);
    for (int v = 0; v < 12; ++v) {
      const double direct = T.expected(obs[u], obs[v]);
      CHECK(scorer.node_pair(u, v) == doctest::Approx(direct).epsilon(1e-9));
      CHECK(row(v) == doctest::Approx(direct).epsilon(1e-9));
    }
  }

  const auto q = testsup::random_observation(8, 999);
  const Eigen::VectorXd from_q = scorer.from_query(q);
  const Eigen::VectorXd to_q = scorer.to_query(q);
  for (int v = 0; v < 12; ++v) {
    CHECK(from_q(v) == doctest::Approx(T.expected(q, obs[v])).epsilon(1e-9));
    CHECK(to_q(v) == doctest::Approx(T.expected(obs[v], q)).epsilon(1e-9));
  }
}
