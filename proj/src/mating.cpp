#include "peanolab/mating.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "peanolab/errors.h"

namespace peanolab {

ChordSystem tree_chords(std::span<const double> walk, ChordSide side) {
  if (walk.empty()) throw DomainError("empty walk");
  for (std::size_t i = 1; i < walk.size(); ++i) {
    if (std::abs(walk[i] - walk[i - 1]) != 1.0) {
      throw DomainError("walk step " + std::to_string(i) + " is not +-1");
    }
  }
  ChordSystem chords;
  chords.side = side;
  chords.length = static_cast<Index>(walk.size()) - 1;
  std::vector<Index> stack;
  for (Index j = 0; j <= chords.length; ++j) {
    const double x = walk[static_cast<std::size_t>(j)];
    while (!stack.empty() && walk[static_cast<std::size_t>(stack.back())] > x) stack.pop_back();
    if (!stack.empty() && walk[static_cast<std::size_t>(stack.back())] == x) {
      chords.matches.emplace_back(stack.back(), j);
      stack.pop_back();
    }
    stack.push_back(j);
  }
  return chords;
}

namespace {

struct End {
  Index other;
  std::uint32_t half_edge;
};

}  // namespace

PlanarMap mate(const ChordSystem& lower, const ChordSystem& upper) {
  if (lower.length != upper.length) {
    throw ShapeError("chord systems built from walks of different length");
  }
  const Index n = lower.length;
  const std::size_t vertices = static_cast<std::size_t>(n) + 1;
  const std::size_t edges =
      static_cast<std::size_t>(n) + lower.matches.size() + upper.matches.size();
  if (2 * edges >= 0xFFFFFFFFu) throw SizeError("map too large for 32-bit half-edge ids");

  PlanarMap map;
  map.vertex_count = vertices;
  map.twin.resize(2 * edges);
  map.next_at_vertex.resize(2 * edges);
  map.vertex.resize(2 * edges);

  std::uint32_t next_edge = 0;
  auto add_edge = [&](Index i, Index j) {
    const std::uint32_t h = 2 * next_edge++;
    map.twin[h] = h + 1;
    map.twin[h + 1] = h;
    map.vertex[h] = static_cast<std::uint32_t>(i);
    map.vertex[h + 1] = static_cast<std::uint32_t>(j);
    return h;
  };

  // Per-vertex buckets in counterclockwise sectors.
  std::vector<std::vector<End>> up_right(vertices), up_left(vertices);
  std::vector<std::vector<End>> low_left(vertices), low_right(vertices);
  std::vector<std::uint32_t> spine_right(vertices, 0xFFFFFFFFu), spine_left(vertices, 0xFFFFFFFFu);

  for (Index i = 0; i < n; ++i) {
    const std::uint32_t h = add_edge(i, i + 1);
    spine_right[static_cast<std::size_t>(i)] = h;
    spine_left[static_cast<std::size_t>(i + 1)] = h + 1;
  }
  for (const auto& [i, j] : upper.matches) {
    const std::uint32_t h = add_edge(i, j);
    up_right[static_cast<std::size_t>(i)].push_back({j, h});
    up_left[static_cast<std::size_t>(j)].push_back({i, h + 1});
  }
  for (const auto& [i, j] : lower.matches) {
    const std::uint32_t h = add_edge(i, j);
    low_right[static_cast<std::size_t>(i)].push_back({j, h});
    low_left[static_cast<std::size_t>(j)].push_back({i, h + 1});
  }

  auto by_other_asc = [](const End& x, const End& y) { return x.other < y.other; };
  auto by_other_desc = [](const End& x, const End& y) { return x.other > y.other; };
  std::vector<std::uint32_t> ring;
  for (std::size_t v = 0; v < vertices; ++v) {
    ring.clear();
    // east spine, then upper arcs inner-to-outer going right, upper arcs
    // outer-to-inner going left, west spine, lower arcs inner-to-outer going
    // left, lower arcs outer-to-inner going right
    if (spine_right[v] != 0xFFFFFFFFu) ring.push_back(spine_right[v]);
    std::sort(up_right[v].begin(), up_right[v].end(), by_other_asc);
    for (const End& e : up_right[v]) ring.push_back(e.half_edge);
    std::sort(up_left[v].begin(), up_left[v].end(), by_other_asc);
    for (const End& e : up_left[v]) ring.push_back(e.half_edge);
    if (spine_left[v] != 0xFFFFFFFFu) ring.push_back(spine_left[v]);
    std::sort(low_left[v].begin(), low_left[v].end(), by_other_desc);
    for (const End& e : low_left[v]) ring.push_back(e.half_edge);
    std::sort(low_right[v].begin(), low_right[v].end(), by_other_desc);
    for (const End& e : low_right[v]) ring.push_back(e.half_edge);
    for (std::size_t k = 0; k < ring.size(); ++k) {
      map.next_at_vertex[ring[k]] = ring[(k + 1) % ring.size()];
    }
  }
  return map;
}

PlanarMap mate_path(const PathPair& lattice_path, Window w) {
  check_window(lattice_path, w);
  if (lattice_path.kind != PathKind::lattice) {
    throw DomainError("mating needs a lattice path; coarsen Brownian paths first");
  }
  const auto first = static_cast<std::size_t>(w.a);
  const auto count = static_cast<std::size_t>(w.length()) + 1;
  const std::span<const double> l(lattice_path.L.data() + first, count);
  const std::span<const double> r(lattice_path.R.data() + first, count);
  return mate(tree_chords(r, ChordSide::lower), tree_chords(l, ChordSide::upper));
}

EulerSummary euler_genus(const PlanarMap& map) {
  const std::size_t h_count = map.twin.size();
  if (h_count % 2 != 0 || map.next_at_vertex.size() != h_count || map.vertex.size() != h_count) {
    throw StructureError("half-edge arrays disagree in size");
  }
  for (std::size_t h = 0; h < h_count; ++h) {
    const std::uint32_t t = map.twin[h];
    if (t >= h_count || t == h || map.twin[t] != h) {
      throw StructureError("twin is not a fixed-point-free involution at half-edge " +
                           std::to_string(h));
    }
    if (map.vertex[h] >= map.vertex_count) throw StructureError("half-edge vertex out of range");
  }
  std::vector<char> seen(h_count, 0);
  for (std::size_t h = 0; h < h_count; ++h) {
    const std::uint32_t nx = map.next_at_vertex[h];
    if (nx >= h_count || seen[nx] || map.vertex[nx] != map.vertex[h]) {
      throw StructureError("rotation is not a permutation within vertices");
    }
    seen[nx] = 1;
  }

  // connected components over vertices (isolated vertices count as spheres)
  std::vector<std::uint32_t> parent(map.vertex_count);
  for (std::size_t v = 0; v < parent.size(); ++v) parent[v] = static_cast<std::uint32_t>(v);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t h = 0; h < h_count; h += 2) {
    parent[find(map.vertex[h])] = find(map.vertex[map.twin[h]]);
  }
  std::size_t components = 0;
  for (std::size_t v = 0; v < parent.size(); ++v) components += find(static_cast<std::uint32_t>(v)) == v;

  std::fill(seen.begin(), seen.end(), 0);
  std::size_t faces = 0;
  for (std::size_t h = 0; h < h_count; ++h) {
    if (seen[h]) continue;
    ++faces;
    for (std::uint32_t x = static_cast<std::uint32_t>(h); !seen[x]; x = map.next_at_vertex[map.twin[x]]) {
      seen[x] = 1;
    }
  }
  // isolated vertices contribute one face each
  std::vector<char> has_edge(map.vertex_count, 0);
  for (std::size_t h = 0; h < h_count; ++h) has_edge[map.vertex[h]] = 1;
  for (std::size_t v = 0; v < map.vertex_count; ++v) faces += has_edge[v] == 0;

  EulerSummary s;
  s.V = map.vertex_count;
  s.E = h_count / 2;
  s.F = faces;
  const long chi = static_cast<long>(s.V) - static_cast<long>(s.E) + static_cast<long>(s.F);
  s.genus = (2 * static_cast<long>(components) - chi) / 2;
  return s;
}

PlanarMap map_from_rotations(std::size_t vertex_count,
                             const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                             const std::vector<std::vector<std::size_t>>& rotation) {
  if (rotation.size() != vertex_count) throw ShapeError("one rotation list per vertex required");
  PlanarMap map;
  map.vertex_count = vertex_count;
  map.twin.resize(2 * edges.size());
  map.next_at_vertex.resize(2 * edges.size());
  map.vertex.resize(2 * edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    map.twin[2 * e] = static_cast<std::uint32_t>(2 * e + 1);
    map.twin[2 * e + 1] = static_cast<std::uint32_t>(2 * e);
    map.vertex[2 * e] = static_cast<std::uint32_t>(edges[e].first);
    map.vertex[2 * e + 1] = static_cast<std::uint32_t>(edges[e].second);
  }
  std::vector<char> used(2 * edges.size(), 0);
  for (std::size_t v = 0; v < vertex_count; ++v) {
    std::vector<std::uint32_t> ring;
    for (const std::size_t e : rotation[v]) {
      if (e >= edges.size()) throw StructureError("rotation names an unknown edge");
      std::uint32_t h;
      if (edges[e].first == v && !used[2 * e]) {
        h = static_cast<std::uint32_t>(2 * e);
      } else if (edges[e].second == v && !used[2 * e + 1]) {
        h = static_cast<std::uint32_t>(2 * e + 1);
      } else {
        throw StructureError("edge " + std::to_string(e) + " does not end at vertex " + std::to_string(v));
      }
      used[h] = 1;
      ring.push_back(h);
    }
    for (std::size_t k = 0; k < ring.size(); ++k) {
      map.next_at_vertex[ring[k]] = ring[(k + 1) % ring.size()];
    }
  }
  if (std::find(used.begin(), used.end(), 0) != used.end()) {
    throw StructureError("some edge end is missing from the rotations");
  }
  return map;
}

void write_map_csv(const PlanarMap& map, std::ostream& out) {
  out << "half_edge,twin,next_at_vertex,vertex\n";
  for (std::size_t h = 0; h < map.half_edge_count(); ++h) {
    out << h << ',' << map.twin[h] << ',' << map.next_at_vertex[h] << ',' << map.vertex[h] << '\n';
  }
}

void write_map_summary_json(const EulerSummary& summary, std::ostream& out) {
  out << "{\"V\": " << summary.V << ", \"E\": " << summary.E << ", \"F\": " << summary.F
      << ", \"genus\": " << summary.genus << "}\n";
}

}  // namespace peanolab
