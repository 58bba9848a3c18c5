#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace graphnav::sim {

enum class Terrain : std::uint8_t { Free = 0, Wall, TallGrass, Bush, Hole };

char terrain_char(Terrain t);
Terrain terrain_from_char(char c);

/// Terrain classes the robot can drive over. Tall grass is traversable even
/// though it looks like a bush; a hole is not traversable even though it looks
/// like open ground.
inline bool traversable(Terrain t) {
  return t == Terrain::Free || t == Terrain::TallGrass;
}

/// Appearance groups as seen by the range sensor. Rays stop at anything that
/// visibly sticks up (vegetation, walls) and pass over ground-like cells, so
/// holes are invisible.
enum class AppearanceGroup : std::uint8_t { Ground = 0, Vegetation, WallLike };

AppearanceGroup appearance_group(Terrain t);

inline bool blocks_rays(Terrain t) {
  return appearance_group(t) != AppearanceGroup::Ground;
}

/// Code 0 is the no-hit background. Ground cells use 1..8, vegetation 9..16,
/// walls 17..24. Within a group the sub-code depends on the map's appearance
/// seed, with overlapping sub-ranges so that equal codes can belong to cells
/// of different traversability.
constexpr int kAppearanceBackground = 0;
constexpr int kAppearanceCodeMax = 24;

/// Grid world, one cell per square meter. Cell (x, y) covers
/// [x, x+1) x [y, y+1); row y is line y of the map file body.
class WorldMap {
 public:
  WorldMap() = default;
  WorldMap(int width, int height, std::uint32_t appearance_seed);

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint32_t appearance_seed() const { return appearance_seed_; }
  std::uint32_t lighting_seed() const { return appearance_seed_ * 2654435761u + 1u; }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }
  Terrain at(int x, int y) const { return cells_[static_cast<size_t>(y) * width_ + x]; }
  void set(int x, int y, Terrain t) { cells_[static_cast<size_t>(y) * width_ + x] = t; }

  /// Out-of-bounds queries behave like walls.
  Terrain at_clamped(int x, int y) const {
    return in_bounds(x, y) ? at(x, y) : Terrain::Wall;
  }
  bool traversable_at(int x, int y) const {
    return in_bounds(x, y) && traversable(at(x, y));
  }

  int appearance_code(int x, int y) const;

  /// Cells of the largest traversable 4-connected component.
  std::vector<std::pair<int, int>> largest_component() const;

  /// Checks the map contract: largest traversable component covers at least
  /// half of all cells, and there is at least one pair of cells with equal
  /// appearance codes but different traversability. Throws on violation.
  void validate() const;

  static WorldMap load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  static WorldMap from_ascii(const std::string& body, std::uint32_t appearance_seed);
  std::string to_ascii() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::uint32_t appearance_seed_ = 0;
  std::vector<Terrain> cells_;
};

struct MapGenParams {
  int width = 48;
  int height = 48;
  double wall_density = 0.05;     // fraction of interior cells turned to wall rects
  double grass_density = 0.08;    // vegetation blobs, traversable part
  double bush_density = 0.05;     // vegetation blobs, blocking part
  double hole_density = 0.01;
  int structure_count = 10;       // wall rectangles / corridors
};

/// Procedural map with border walls, wall structures and vegetation/hole
/// blobs. Retries internally until validate() passes; deterministic per seed.
WorldMap generate_map(const MapGenParams& params, std::uint32_t seed);

}  // namespace graphnav::sim
