#include "doctest.h"

#include <set>
#include <stdexcept>

#include "graphnav/world_map.hpp"
#include "test_support.hpp"

using namespace graphnav::sim;

TEST_CASE("terrain chars round-trip") {
  for (Terrain t : {Terrain::Free, Terrain::Wall, Terrain::TallGrass,
                    Terrain::Bush, Terrain::Hole}) {
    CHECK(terrain_from_char(terrain_char(t)) == t);
  }
  CHECK_THROWS_AS(terrain_from_char('z'), std::runtime_error);
}

TEST_CASE("traversability and ray-blocking by terrain class") {
  CHECK(traversable(Terrain::Free));
  CHECK(traversable(Terrain::TallGrass));
  CHECK_FALSE(traversable(Terrain::Wall));
  CHECK_FALSE(traversable(Terrain::Bush));
  CHECK_FALSE(traversable(Terrain::Hole));

  // Holes look like ground, so rays pass over them; vegetation and walls
  // stop rays whether or not they are traversable.
  CHECK_FALSE(blocks_rays(Terrain::Free));
  CHECK_FALSE(blocks_rays(Terrain::Hole));
  CHECK(blocks_rays(Terrain::TallGrass));
  CHECK(blocks_rays(Terrain::Bush));
  CHECK(blocks_rays(Terrain::Wall));
  CHECK(appearance_group(Terrain::Hole) == AppearanceGroup::Ground);
  CHECK(appearance_group(Terrain::TallGrass) == AppearanceGroup::Vegetation);
  CHECK(appearance_group(Terrain::Bush) == AppearanceGroup::Vegetation);
}

TEST_CASE("ascii round-trip preserves the grid") {
  const std::string body =
      "#####\n"
      "#..g#\n"
      "#b.h#\n"
      "#####\n";
  const WorldMap m = WorldMap::from_ascii(body, 42);
  CHECK(m.width() == 5);
  CHECK(m.height() == 4);
  CHECK(m.at(1, 1) == Terrain::Free);
  CHECK(m.at(3, 1) == Terrain::TallGrass);
  CHECK(m.at(1, 2) == Terrain::Bush);
  CHECK(m.at(3, 2) == Terrain::Hole);
  CHECK(m.to_ascii() == body);
}

TEST_CASE("file round-trip preserves grid and appearance seed") {
  testsup::TempDir dir("map");
  const WorldMap m = WorldMap::from_ascii("###\n#.#\n###\n", 99);
  m.save(dir.file("m.map"));
  const WorldMap back = WorldMap::load(dir.file("m.map"));
  CHECK(back.width() == m.width());
  CHECK(back.height() == m.height());
  CHECK(back.appearance_seed() == 99);
  CHECK(back.to_ascii() == m.to_ascii());
}

TEST_CASE("out-of-bounds cells behave like walls") {
  const WorldMap m = WorldMap::from_ascii("..\n..\n", 1);
  CHECK(m.at_clamped(-1, 0) == Terrain::Wall);
  CHECK(m.at_clamped(0, 5) == Terrain::Wall);
  CHECK_FALSE(m.traversable_at(-1, -1));
  CHECK(m.traversable_at(0, 0));
}

TEST_CASE("largest_component finds the bigger of two pockets") {
  // Left pocket has 4 free cells, right pocket 2; they are sealed apart.
  const WorldMap m = WorldMap::from_ascii(
      "#######\n"
      "#..#..#\n"
      "#..####\n",
      3);
  const auto comp = m.largest_component();
  CHECK(comp.size() == 4);
  for (const auto& [x, y] : comp) CHECK(x < 3);
}

TEST_CASE("appearance codes stay inside their group ranges") {
  const WorldMap m = testsup::open_map(20, 20, 1234);
  WorldMap mixed = m;
  mixed.set(5, 5, Terrain::TallGrass);
  mixed.set(6, 5, Terrain::Bush);
  mixed.set(7, 5, Terrain::Hole);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      const int code = mixed.appearance_code(x, y);
      CHECK(code >= 1);
      CHECK(code <= kAppearanceCodeMax);
      switch (appearance_group(mixed.at(x, y))) {
        case AppearanceGroup::Ground:
          CHECK(code <= 8);
          break;
        case AppearanceGroup::Vegetation:
          CHECK(code >= 9);
          CHECK(code <= 16);
          break;
        case AppearanceGroup::WallLike:
          CHECK(code >= 17);
          break;
      }
    }
  }
}

TEST_CASE("validate accepts a legal map and rejects broken ones") {
  // Plant one grass cell and one bush cell whose codes collide. Sub-code
  // ranges overlap across texture patches, so scan cell pairs for a match.
  WorldMap good = testsup::open_map(16, 16, 5);
  auto code_as = [&](int x, int y, Terrain t) {
    const Terrain orig = good.at(x, y);
    good.set(x, y, t);
    const int code = good.appearance_code(x, y);
    good.set(x, y, orig);
    return code;
  };
  bool planted = false;
  for (int y1 = 1; y1 < 15 && !planted; ++y1) {
    for (int x1 = 1; x1 < 15 && !planted; ++x1) {
      const int grass_code = code_as(x1, y1, Terrain::TallGrass);
      for (int y2 = 1; y2 < 15 && !planted; ++y2) {
        for (int x2 = 1; x2 < 15 && !planted; ++x2) {
          if (x1 == x2 && y1 == y2) continue;
          if (code_as(x2, y2, Terrain::Bush) == grass_code) {
            good.set(x1, y1, Terrain::TallGrass);
            good.set(x2, y2, Terrain::Bush);
            planted = true;
          }
        }
      }
    }
  }
  REQUIRE(planted);
  CHECK_NOTHROW(good.validate());

  // Mostly walls: the coverage clause fails.
  const WorldMap walled = WorldMap::from_ascii(
      "####\n"
      "#..#\n"
      "####\n",
      1);
  CHECK_THROWS_AS(walled.validate(), std::runtime_error);

  // Free interior and walls only: ground codes (1..8) and wall codes
  // (17..24) never collide, so the ambiguity clause fails.
  const WorldMap plain = testsup::open_map(16, 16, 5);
  CHECK_THROWS_AS(plain.validate(), std::runtime_error);
}

TEST_CASE("generated maps are deterministic and valid") {
  MapGenParams params;
  params.width = 40;
  params.height = 40;
  const WorldMap a = generate_map(params, 2024);
  const WorldMap b = generate_map(params, 2024);
  CHECK(a.to_ascii() == b.to_ascii());
  CHECK(a.appearance_seed() == b.appearance_seed());
  CHECK_NOTHROW(a.validate());

  const WorldMap c = generate_map(params, 2025);
  CHECK(a.to_ascii() != c.to_ascii());

  // Border is sealed.
  for (int x = 0; x < a.width(); ++x) {
    CHECK_FALSE(traversable(a.at(x, 0)));
    CHECK_FALSE(traversable(a.at(x, a.height() - 1)));
  }
}

TEST_CASE("every generated map carries the appearance ambiguity") {
  // The validate() contract, exercised over several seeds: some code is used
  // by both a traversable and a non-traversable cell.
  MapGenParams params;
  for (std::uint32_t seed : {1u, 7u, 99u, 31415u}) {
    const WorldMap m = generate_map(params, seed);
    std::set<int> traversable_codes, blocked_codes;
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) {
        if (traversable(m.at(x, y)))
          traversable_codes.insert(m.appearance_code(x, y));
        else
          blocked_codes.insert(m.appearance_code(x, y));
      }
    }
    bool overlap = false;
    for (int code : traversable_codes)
      if (blocked_codes.count(code)) overlap = true;
    CHECK(overlap);
  }
}
