#include "graphnav/world_map.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace graphnav::sim {

char terrain_char(Terrain t) {
  switch (t) {
    case Terrain::Free: return '.';
    case Terrain::Wall: return '#';
    case Terrain::TallGrass: return 'g';
    case Terrain::Bush: return 'b';
    case Terrain::Hole: return 'h';
  }
  return '?';
}

Terrain terrain_from_char(char c) {
  switch (c) {
    case '.': return Terrain::Free;
    case '#': return Terrain::Wall;
    case 'g': return Terrain::TallGrass;
    case 'b': return Terrain::Bush;
    case 'h': return Terrain::Hole;
  }
  throw std::runtime_error(std::string("map: unknown terrain char '") + c + "'");
}

AppearanceGroup appearance_group(Terrain t) {
  switch (t) {
    case Terrain::Free:
    case Terrain::Hole: return AppearanceGroup::Ground;
    case Terrain::TallGrass:
    case Terrain::Bush: return AppearanceGroup::Vegetation;
    case Terrain::Wall: return AppearanceGroup::WallLike;
  }
  return AppearanceGroup::Ground;
}

WorldMap::WorldMap(int width, int height, std::uint32_t appearance_seed)
    : width_(width),
      height_(height),
      appearance_seed_(appearance_seed),
      cells_(static_cast<size_t>(width) * height, Terrain::Free) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("map: empty dimensions");
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t cell_hash(std::uint32_t seed, int x, int y) {
  return mix64((static_cast<std::uint64_t>(seed) << 32) ^
               (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 16) ^
               static_cast<std::uint32_t>(y));
}

}  // namespace

int WorldMap::appearance_code(int x, int y) const {
  const Terrain t = at(x, y);
  // 4x4 patches share one hash so texture varies in coherent segments, the
  // way a wall run or hedge does, rather than per-cell noise.
  const std::uint64_t h = cell_hash(appearance_seed_, x >> 2, y >> 2);
  const AppearanceGroup g = appearance_group(t);
  // Per-map palette rotation inside each group: the same terrain statistics
  // produce different code usage on maps with different seeds.
  const int rot = static_cast<int>(mix64(appearance_seed_ + 77u * static_cast<int>(g)) % 8);
  int variation;
  switch (t) {
    case Terrain::TallGrass: variation = static_cast<int>(h % 6); break;      // 0..5
    case Terrain::Bush: variation = 2 + static_cast<int>(h % 6); break;       // 2..7
    default: variation = static_cast<int>(h % 8); break;                      // 0..7
  }
  const int base = 1 + 8 * static_cast<int>(g);
  return base + (variation + rot) % 8;
}

std::vector<std::pair<int, int>> WorldMap::largest_component() const {
  std::vector<int> label(cells_.size(), -1);
  std::vector<std::pair<int, int>> best;
  int next = 0;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!traversable_at(x, y) || label[static_cast<size_t>(y) * width_ + x] >= 0)
        continue;
      std::vector<std::pair<int, int>> comp;
      std::queue<std::pair<int, int>> q;
      q.emplace(x, y);
      label[static_cast<size_t>(y) * width_ + x] = next;
      while (!q.empty()) {
        const auto [cx, cy] = q.front();
        q.pop();
        comp.emplace_back(cx, cy);
        const int dx[4] = {1, -1, 0, 0};
        const int dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = cx + dx[k], ny = cy + dy[k];
          if (traversable_at(nx, ny) &&
              label[static_cast<size_t>(ny) * width_ + nx] < 0) {
            label[static_cast<size_t>(ny) * width_ + nx] = next;
            q.emplace(nx, ny);
          }
        }
      }
      if (comp.size() > best.size()) best = std::move(comp);
      ++next;
    }
  }
  return best;
}

void WorldMap::validate() const {
  const auto comp = largest_component();
  if (comp.size() * 2 < cells_.size())
    throw std::runtime_error("map: largest traversable component covers < 50% of cells");

  // Equal appearance code, different traversability.
  std::map<int, std::pair<bool, bool>> seen;  // code -> (traversable?, blocked?)
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      auto& flags = seen[appearance_code(x, y)];
      if (traversable(at(x, y)))
        flags.first = true;
      else
        flags.second = true;
      if (flags.first && flags.second) return;
    }
  }
  throw std::runtime_error("map: no appearance-ambiguous cell pair found");
}

WorldMap WorldMap::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("map: cannot open " + path.string());
  int w, h;
  std::uint32_t seed;
  if (!(is >> w >> h >> seed)) throw std::runtime_error("map: bad header in " + path.string());
  std::string line;
  std::getline(is, line);  // rest of header line
  std::ostringstream body;
  for (int y = 0; y < h; ++y) {
    if (!std::getline(is, line)) throw std::runtime_error("map: truncated grid");
    body << line << '\n';
  }
  WorldMap m = from_ascii(body.str(), seed);
  if (m.width() != w || m.height() != h)
    throw std::runtime_error("map: header dimensions do not match grid");
  return m;
}

void WorldMap::save(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("map: cannot write " + path.string());
  os << width_ << ' ' << height_ << ' ' << appearance_seed_ << '\n' << to_ascii();
}

WorldMap WorldMap::from_ascii(const std::string& body, std::uint32_t appearance_seed) {
  std::istringstream is(body);
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) rows.push_back(line);
  }
  if (rows.empty()) throw std::runtime_error("map: empty grid");
  const int w = static_cast<int>(rows[0].size());
  const int h = static_cast<int>(rows.size());
  WorldMap m(w, h, appearance_seed);
  for (int y = 0; y < h; ++y) {
    if (static_cast<int>(rows[y].size()) != w)
      throw std::runtime_error("map: ragged grid rows");
    for (int x = 0; x < w; ++x) m.set(x, y, terrain_from_char(rows[y][x]));
  }
  return m;
}

std::string WorldMap::to_ascii() const {
  std::string out;
  out.reserve(cells_.size() + height_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) out.push_back(terrain_char(at(x, y)));
    out.push_back('\n');
  }
  return out;
}

namespace {

void paint_blob(WorldMap& m, std::mt19937_64& rng, Terrain t, int target_cells) {
  std::uniform_int_distribution<int> xd(1, m.width() - 2), yd(1, m.height() - 2);
  int x = xd(rng), y = yd(rng);
  int painted = 0;
  int guard = target_cells * 20;
  while (painted < target_cells && guard-- > 0) {
    if (m.at(x, y) == Terrain::Free) {
      m.set(x, y, t);
      ++painted;
    }
    const int dir = static_cast<int>(rng() % 4);
    x = std::clamp(x + (dir == 0) - (dir == 1), 1, m.width() - 2);
    y = std::clamp(y + (dir == 2) - (dir == 3), 1, m.height() - 2);
  }
}

WorldMap generate_once(const MapGenParams& p, std::uint32_t seed) {
  WorldMap m(p.width, p.height, seed);
  std::mt19937_64 rng(seed);
  for (int x = 0; x < p.width; ++x) {
    m.set(x, 0, Terrain::Wall);
    m.set(x, p.height - 1, Terrain::Wall);
  }
  for (int y = 0; y < p.height; ++y) {
    m.set(0, y, Terrain::Wall);
    m.set(p.width - 1, y, Terrain::Wall);
  }

  const int interior = (p.width - 2) * (p.height - 2);
  std::uniform_int_distribution<int> xd(1, p.width - 2), yd(1, p.height - 2);

  // Wall structures: thin rectangles with a gap, so corridors and rooms form
  // without sealing off large regions.
  int wall_budget = static_cast<int>(interior * p.wall_density);
  for (int s = 0; s < p.structure_count && wall_budget > 0; ++s) {
    const bool horizontal = rng() % 2 == 0;
    const int len = 4 + static_cast<int>(rng() % 10);
    const int gap = static_cast<int>(rng() % len);
    int x = xd(rng), y = yd(rng);
    for (int i = 0; i < len && wall_budget > 0; ++i) {
      if (i != gap && m.in_bounds(x, y) && x > 0 && x < p.width - 1 && y > 0 &&
          y < p.height - 1) {
        m.set(x, y, Terrain::Wall);
        --wall_budget;
      }
      (horizontal ? x : y) += 1;
    }
  }

  auto blob_cells = [&](double density) {
    return std::max(1, static_cast<int>(interior * density));
  };
  int grass_left = blob_cells(p.grass_density);
  int bush_left = blob_cells(p.bush_density);
  int hole_left = p.hole_density > 0 ? blob_cells(p.hole_density) : 0;
  while (grass_left > 0) {
    const int n = std::min(grass_left, 8 + static_cast<int>(rng() % 12));
    paint_blob(m, rng, Terrain::TallGrass, n);
    grass_left -= n;
  }
  while (bush_left > 0) {
    const int n = std::min(bush_left, 5 + static_cast<int>(rng() % 8));
    paint_blob(m, rng, Terrain::Bush, n);
    bush_left -= n;
  }
  while (hole_left > 0) {
    const int n = std::min(hole_left, 3 + static_cast<int>(rng() % 4));
    paint_blob(m, rng, Terrain::Hole, n);
    hole_left -= n;
  }
  return m;
}

}  // namespace

WorldMap generate_map(const MapGenParams& params, std::uint32_t seed) {
  for (std::uint32_t attempt = 0; attempt < 64; ++attempt) {
    WorldMap m = generate_once(params, seed + attempt * 7919u);
    try {
      m.validate();
      return m;
    } catch (const std::runtime_error&) {
      // densities produced an invalid layout, retry with shifted seed
    }
  }
  throw std::runtime_error("map: generation failed to satisfy invariants");
}

}  // namespace graphnav::sim
