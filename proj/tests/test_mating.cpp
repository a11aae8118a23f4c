#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "fixtures.h"
#include "peanolab/errors.h"
#include "peanolab/mating.h"

using namespace peanolab;
using testing::make_path;
using testing::walk;

namespace {

using Matches = std::vector<std::pair<Index, Index>>;

Matches chords_by_scan(const std::vector<double>& x) {
  Matches out;
  const auto n = static_cast<Index>(x.size());
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      if (x[i] != x[j]) continue;
      bool above = true;
      for (Index s = i + 1; s < j && above; ++s) above = x[s] > x[i];
      if (above) out.emplace_back(i, j);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("tree chords examples", "[mating]") {
  CHECK(tree_chords(std::vector<double>{0, 1, 0}, ChordSide::upper).matches == Matches{{0, 2}});
  CHECK(tree_chords(std::vector<double>{0, 1, 2, 1, 0}, ChordSide::lower).matches == Matches{{1, 3}, {0, 4}});
  CHECK(tree_chords(walk({1, 1, 1, 1}), ChordSide::lower).matches.empty());
  CHECK_THROWS_AS(tree_chords(std::vector<double>{0, 2}, ChordSide::lower), DomainError);
  CHECK_THROWS_AS(tree_chords(std::vector<double>{}, ChordSide::lower), DomainError);
}

TEST_CASE("tree chords agree with a quadratic scan", "[mating][oracle]") {
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const PathPair p = sample_lattice_pair(build_cov_spec(6.0), 120, 31, trial);
    for (const auto* x : {&p.L, &p.R}) {
      const ChordSystem c = tree_chords(*x, ChordSide::upper);
      Matches expect = chords_by_scan(*x);
      REQUIRE(c.matches == expect);
      // non-crossing
      for (const auto& [i, j] : c.matches) {
        for (const auto& [k, l] : c.matches) REQUIRE_FALSE((i < k && k < j && j < l));
      }
    }
  }
}

TEST_CASE("mating small walks", "[mating]") {
  const ChordSystem flat_l = tree_chords(walk({1, 1}), ChordSide::lower);
  const ChordSystem flat_u = tree_chords(walk({1, 1}), ChordSide::upper);
  CHECK(euler_genus(mate(flat_l, flat_u)) == EulerSummary{3, 2, 1, 0});

  const ChordSystem arch = tree_chords(walk({1, -1}), ChordSide::lower);
  REQUIRE(arch.matches.size() == 1);
  CHECK(euler_genus(mate(arch, flat_u)) == EulerSummary{3, 3, 2, 0});
  CHECK(euler_genus(mate(arch, tree_chords(walk({1, -1}), ChordSide::upper))) == EulerSummary{3, 4, 3, 0});

  CHECK_THROWS_AS(mate(arch, tree_chords(walk({1, 1, 1}), ChordSide::upper)), ShapeError);
}

TEST_CASE("euler genus fixtures", "[mating]") {
  const PlanarMap edge = map_from_rotations(2, {{0, 1}}, {{0}, {0}});
  CHECK(euler_genus(edge) == EulerSummary{2, 1, 1, 0});

  const PlanarMap tri = map_from_rotations(3, {{0, 1}, {1, 2}, {2, 0}}, {{0, 2}, {1, 0}, {2, 1}});
  CHECK(euler_genus(tri) == EulerSummary{3, 3, 2, 0});

  // two interleaved loops at one vertex: a torus
  const PlanarMap torus = map_from_rotations(1, {{0, 0}, {0, 0}}, {{0, 1, 0, 1}});
  CHECK(euler_genus(torus).genus == 1);

  // two crossing chords on the same side of the spine
  ChordSystem crossed;
  crossed.side = ChordSide::upper;
  crossed.length = 3;
  crossed.matches = {{0, 2}, {1, 3}};
  ChordSystem empty;
  empty.length = 3;
  CHECK(euler_genus(mate(empty, crossed)).genus >= 1);

  CHECK(euler_genus(map_from_rotations(3, {}, {{}, {}, {}})) == EulerSummary{3, 0, 3, 0});
}

TEST_CASE("malformed maps are rejected", "[mating]") {
  PlanarMap bad = map_from_rotations(2, {{0, 1}}, {{0}, {0}});
  bad.twin[0] = 0;
  CHECK_THROWS_AS(euler_genus(bad), StructureError);
  PlanarMap bad_rot = map_from_rotations(3, {{0, 1}, {1, 2}}, {{0}, {0, 1}, {1}});
  bad_rot.next_at_vertex[0] = 2;
  CHECK_THROWS_AS(euler_genus(bad_rot), StructureError);
  CHECK_THROWS_AS(map_from_rotations(2, {{0, 1}}, {{0}, {}}), StructureError);
}

TEST_CASE("mated lattice paths are spheres", "[mating][property]") {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const PathPair p = sample_lattice_pair(build_cov_spec(6.0), 1 << 12, 8, trial);
    const PlanarMap m = mate_path(p, full_window(p));
    const EulerSummary s = euler_genus(m);
    CHECK(s.genus == 0);
    CHECK(s.V == (1u << 12) + 1);
    const std::size_t chords = tree_chords(p.L, ChordSide::upper).matches.size() +
                               tree_chords(p.R, ChordSide::lower).matches.size();
    CHECK(s.E == (1u << 12) + chords);
  }
  const PathPair p = sample_lattice_pair(build_cov_spec(5.0), 3000, 8);
  CHECK(euler_genus(mate_path(p, Window{700, 2100})).genus == 0);
}

TEST_CASE("mating determinism and input checks", "[mating]") {
  const PathPair p = sample_lattice_pair(build_cov_spec(6.0), 2000, 3);
  const PlanarMap a = mate_path(p, full_window(p));
  const PlanarMap b = mate_path(p, full_window(p));
  CHECK(a.twin == b.twin);
  CHECK(a.next_at_vertex == b.next_at_vertex);
  CHECK(a.vertex == b.vertex);

  const PathPair q = sample_brownian_pair(build_cov_spec(6.0), 2000, 1.0, 3);
  CHECK_THROWS_AS(mate_path(q, full_window(q)), DomainError);
  CHECK(euler_genus(mate_path(coarsen_to_lattice(q), full_window(q))).genus == 0);
}

TEST_CASE("map exports", "[mating][io]") {
  const PlanarMap tri = map_from_rotations(3, {{0, 1}, {1, 2}, {2, 0}}, {{0, 2}, {1, 0}, {2, 1}});
  std::ostringstream csv, json;
  write_map_csv(tri, csv);
  CHECK(csv.str().rfind("half_edge,twin,next_at_vertex,vertex\n", 0) == 0);
  write_map_summary_json(euler_genus(tri), json);
  CHECK(json.str() == "{\"V\": 3, \"E\": 3, \"F\": 2, \"genus\": 0}\n");
}
