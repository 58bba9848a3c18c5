#include "doctest.h"

#include <cmath>
#include <random>

#include "graphnav/geometry.hpp"

using namespace graphnav;

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));  // boundary folds up
  CHECK(wrap_angle(3.0 * M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(2.0 * M_PI) == doctest::Approx(0.0));
  CHECK(wrap_angle(-0.5) == doctest::Approx(-0.5));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = uni(rng);
    const double w = wrap_angle(a);
    CHECK(w > -M_PI - 1e-12);
    CHECK(w <= M_PI + 1e-12);
    // Same direction: sin/cos must agree with the raw angle.
    CHECK(std::sin(w) == doctest::Approx(std::sin(a)).epsilon(1e-9));
    CHECK(std::cos(w) == doctest::Approx(std::cos(a)).epsilon(1e-9));
  }
}

TEST_CASE("compose and relative_pose invert each other") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-8.0, 8.0);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    const Pose2 a{uni(rng), uni(rng), ang(rng)};
    const Pose2 b{uni(rng), uni(rng), ang(rng)};
    const Pose2 d = relative_pose(a, b);
    const Pose2 back = compose(a, d);
    CHECK(back.x == doctest::Approx(b.x).epsilon(1e-10));
    CHECK(back.y == doctest::Approx(b.y).epsilon(1e-10));
    CHECK(std::abs(wrap_angle(back.theta - b.theta)) < 1e-10);
  }
}

TEST_CASE("relative_pose of a pose with itself is identity") {
  const Pose2 a{3.0, -2.0, 1.2};
  const Pose2 d = relative_pose(a, a);
  CHECK(d.x == doctest::Approx(0.0));
  CHECK(d.y == doctest::Approx(0.0));
  CHECK(d.theta == doctest::Approx(0.0));
}

TEST_CASE("relative_pose resolves axes in the source frame") {
  // Source faces +y; a point one meter ahead of it lies at +x in its frame.
  const Pose2 a{0.0, 0.0, M_PI / 2.0};
  const Pose2 b{0.0, 1.0, M_PI / 2.0};
  const Pose2 d = relative_pose(a, b);
  CHECK(d.x == doctest::Approx(1.0));
  CHECK(d.y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.theta == doctest::Approx(0.0));
}

TEST_CASE("distance matches the Euclidean metric") {
  CHECK(distance(Pose2{0, 0, 0}, Pose2{3, 4, 2}) == doctest::Approx(5.0));
  CHECK(distance(Pose2{1, 1, 0}, Pose2{1, 1, 3}) == doctest::Approx(0.0));
}
