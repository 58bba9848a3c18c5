#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "graphnav/collect.hpp"
#include "graphnav/observation.hpp"
#include "graphnav/simulator.hpp"
#include "graphnav/world_map.hpp"

namespace testsup {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    const auto base = std::filesystem::temp_directory_path();
    std::random_device rd;
    path_ = base / (tag + "-" + std::to_string(rd()) + std::to_string(rd() % 1000));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Wall border, free interior.
inline graphnav::sim::WorldMap open_map(int w, int h, std::uint32_t seed = 7) {
  graphnav::sim::WorldMap m(w, h, seed);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1)
        m.set(x, y, graphnav::sim::Terrain::Wall);
  return m;
}

/// Small map with a dividing wall forcing a detour between the left and
/// right halves through a gap at the top.
inline graphnav::sim::WorldMap detour_map(std::uint32_t seed = 7) {
  auto m = open_map(15, 11, seed);
  for (int y = 3; y < 10; ++y) m.set(7, y, graphnav::sim::Terrain::Wall);
  return m;
}

/// Synthetic observation: every ray in both stacked frames reports the same
/// (distance, code) pair.
inline graphnav::sim::Observation flat_observation(int ray_count, float dist,
                                                   float code,
                                                   float lighting = 0.5f) {
  graphnav::sim::Observation obs;
  obs.ray_count = ray_count;
  obs.frames.assign(static_cast<std::size_t>(4 * ray_count), 0.0f);
  for (int k = 0; k < 2 * ray_count; ++k) {
    obs.frames[static_cast<std::size_t>(2 * k)] = dist;
    obs.frames[static_cast<std::size_t>(2 * k + 1)] = code;
  }
  obs.lighting = lighting;
  return obs;
}

/// Observation with i.i.d. random ray distances and codes; distinct seeds
/// give distinct, structureless inputs for model plumbing tests.
inline graphnav::sim::Observation random_observation(int ray_count,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(0.3f, 12.0f);
  std::uniform_int_distribution<int> code(0, graphnav::sim::kAppearanceCodeMax);
  graphnav::sim::Observation obs;
  obs.ray_count = ray_count;
  obs.frames.resize(static_cast<std::size_t>(4 * ray_count));
  for (int k = 0; k < 2 * ray_count; ++k) {
    obs.frames[static_cast<std::size_t>(2 * k)] = dist(rng);
    obs.frames[static_cast<std::size_t>(2 * k + 1)] =
        static_cast<float>(code(rng));
  }
  obs.lighting = std::uniform_real_distribution<float>(0.0f, 1.0f)(rng);
  return obs;
}

/// Tiny corpus for plumbing tests; noise off so pose labels are exact.
inline graphnav::TrajectorySet tiny_corpus(const graphnav::sim::WorldMap& map,
                                           int episodes, int steps,
                                           std::uint64_t seed,
                                           bool noise = false) {
  graphnav::sim::SimParams sp;
  graphnav::CollectParams cp;
  cp.policy = graphnav::CollectPolicy::RandomWalk;
  cp.steps = steps;
  cp.odom_noise = noise;
  return graphnav::collect_corpus(map, sp, cp, episodes, seed);
}

}  // namespace testsup
