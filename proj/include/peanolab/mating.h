#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "peanolab/corrpath.h"

namespace peanolab {

enum class ChordSide { lower, upper };

/// Arches of one contour tree: (i, j) with X_i = X_j and X_s > X_i strictly
/// inside. Drawn above the spine for the upper (L) system and below it for
/// the lower (R) system.
struct ChordSystem {
  ChordSide side = ChordSide::lower;
  Index length = 0;  // walk has length + 1 vertices
  std::vector<std::pair<Index, Index>> matches;  // sorted by right endpoint
};

/// Rotation-system map. Half-edges 2e and 2e+1 are the two ends of edge e, so
/// the edge involution is h ^ 1 and is fixed-point free by construction;
/// `twin` is stored explicitly anyway so malformed maps can be detected.
struct PlanarMap {
  std::size_t vertex_count = 0;
  std::vector<std::uint32_t> twin;            // edge involution
  std::vector<std::uint32_t> next_at_vertex;  // counterclockwise rotation
  std::vector<std::uint32_t> vertex;          // tail vertex of each half-edge

  std::size_t half_edge_count() const noexcept { return twin.size(); }
  std::size_t edge_count() const noexcept { return twin.size() / 2; }
};

struct EulerSummary {
  std::size_t V = 0;
  std::size_t E = 0;
  std::size_t F = 0;
  long genus = 0;

  friend bool operator==(const EulerSummary&, const EulerSummary&) = default;
};

/// O(n) stack sweep over a +-1 integer walk.
ChordSystem tree_chords(std::span<const double> walk, ChordSide side);

/// Spine edges (i, i+1) plus one edge per chord, embedded with the upper
/// chords above and the lower chords below the spine. Throws ShapeError if the
/// two systems come from walks of different length.
PlanarMap mate(const ChordSystem& lower, const ChordSystem& upper);

/// Convenience: lower chords from R, upper chords from L of a lattice path.
PlanarMap mate_path(const PathPair& lattice_path, Window w);

/// Faces are the orbits of h -> next_at_vertex[twin[h]].
/// Throws StructureError if twin is not a fixed-point-free involution or the
/// rotation is not a permutation.
EulerSummary euler_genus(const PlanarMap& map);

/// Builds a map from explicit rotations; used for hand-made fixtures.
/// rotation[v] lists the (v, w) edge ends around v counterclockwise by edge
/// id; each edge id must appear exactly twice overall.
PlanarMap map_from_rotations(std::size_t vertex_count,
                             const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                             const std::vector<std::vector<std::size_t>>& rotation);

void write_map_csv(const PlanarMap& map, std::ostream& out);
void write_map_summary_json(const EulerSummary& summary, std::ostream& out);

}  // namespace peanolab
