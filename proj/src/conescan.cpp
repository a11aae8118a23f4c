#include "peanolab/conescan.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "peanolab/errors.h"

namespace peanolab {

namespace {

// Which coordinate barrier fixes the entrance v of the cone at t. The barrier
// sits at v - 1: a strictly smaller L there means Z leaves the cone through
// its vertical edge, so L_v == L_t on a lattice path and the bubble lies on the
// right side.
Side classify_side(const PathPair& path, Index v, Index t) {
  if (v == 0) return Side::ambiguous;
  // zero-length boundary: a lattice tie in both coordinates
  if (path.L[t] == path.L[v] && path.R[t] == path.R[v]) return Side::ambiguous;
  const bool l_barrier = path.L[v - 1] < path.L[t];
  const bool r_barrier = path.R[v - 1] < path.R[t];
  if (l_barrier && !r_barrier) return Side::right;
  if (r_barrier && !l_barrier) return Side::left;
  return Side::ambiguous;
}

ConeInterval make_interval(const PathPair& path, Index v, Index t) {
  ConeInterval iv;
  iv.v = v;
  iv.t = t;
  iv.side = classify_side(path, v, t);
  iv.dL = path.L[t] - path.L[v];
  iv.dR = path.R[t] - path.R[v];
  return iv;
}

}  // namespace

const char* side_name(Side side) noexcept {
  switch (side) {
    case Side::left:
      return "left";
    case Side::right:
      return "right";
    case Side::ambiguous:
      break;
  }
  return "ambiguous";
}

EntranceMap entrance_times(const PathPair& path, Window w) {
  check_window(path, w);
  EntranceMap map;
  map.window = w;
  map.entrance.resize(static_cast<std::size_t>(w.length()) + 1);

  // Monotonic stacks hold indices whose values strictly increase from bottom
  // to top; after popping everything >= X_t the top is the previous strictly
  // smaller element.
  std::vector<Index> stack_l;
  std::vector<Index> stack_r;
  for (Index t = w.a; t <= w.b; ++t) {
    const double lt = path.L[t];
    const double rt = path.R[t];
    while (!stack_l.empty() && path.L[stack_l.back()] >= lt) stack_l.pop_back();
    while (!stack_r.empty() && path.R[stack_r.back()] >= rt) stack_r.pop_back();
    const Index prev_l = stack_l.empty() ? w.a - 1 : stack_l.back();
    const Index prev_r = stack_r.empty() ? w.a - 1 : stack_r.back();
    Index v = 1 + std::max(prev_l, prev_r);
    if (v == w.a && w.a > 0 && path.L[w.a - 1] >= lt && path.R[w.a - 1] >= rt) {
      v = EntranceMap::kBeyondWindow;
    }
    map.entrance[static_cast<std::size_t>(t - w.a)] = v;
    stack_l.push_back(t);
    stack_r.push_back(t);
  }
  return map;
}

std::vector<ConeInterval> maximal_cone_intervals(const PathPair& path, const EntranceMap& map) {
  const Window w = map.window;
  std::vector<ConeInterval> out;
  // Right-to-left: an index at or right of `covered_from` sits inside an
  // accepted interval, and nesting forces its own interval inside that one.
  Index covered_from = w.b + 1;
  for (Index t = w.b; t >= w.a; --t) {
    if (t >= covered_from || !map.is_cone_time(t)) continue;
    const Index v = map.at(t);
    out.push_back(make_interval(path, v, t));
    covered_from = v;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<ConeInterval> maximal_cone_intervals(const PathPair& path, Window w) {
  return maximal_cone_intervals(path, entrance_times(path, w));
}

IndexSet non_cone_set(Window w, std::span<const ConeInterval> maximal) {
  IndexSet set;
  Index next = w.a;
  for (const ConeInterval& iv : maximal) {
    // keep [next, iv.v], drop the open interior (iv.v, iv.t)
    for (Index s = next; s <= iv.v; ++s) set.items.push_back(s);
    next = iv.t;
  }
  for (Index s = next; s <= w.b; ++s) set.items.push_back(s);
  return set;
}

IndexSet non_cone_set(const PathPair& path, Window w) {
  return non_cone_set(w, maximal_cone_intervals(path, w));
}

CoveringCurve covering_count(const IndexSet& set, std::span<const double> epsilons, double dt) {
  if (set.empty()) throw EmptySetError("cannot cover an empty set");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  CoveringCurve curve;
  curve.points.reserve(epsilons.size());
  for (const double eps : epsilons) {
    if (!(eps > 0.0)) throw DomainError("covering length must be positive");
    std::size_t count = 0;
    Index start = 0;
    for (std::size_t i = 0; i < set.items.size(); ++i) {
      const Index s = set.items[i];
      if (count == 0 || static_cast<double>(s - start) * dt >= eps) {
        ++count;
        start = s;
      }
    }
    curve.points.push_back({eps, count});
  }
  return curve;
}

std::vector<double> dyadic_epsilons(Window w, double dt, int min_exponent, int max_exponent) {
  if (min_exponent > max_exponent) throw DomainError("empty dyadic epsilon range");
  std::vector<double> eps;
  const double span = static_cast<double>(w.length()) * dt;
  for (int k = min_exponent; k <= max_exponent; ++k) eps.push_back(std::ldexp(span, k));
  return eps;
}

IndexSet simultaneous_infima(const PathPair& path, Index t, Index until) {
  if (t < 0 || t > path.steps()) throw DomainError("origin outside path");
  until = std::min(until, path.steps());
  IndexSet set;
  double min_l = path.L[t];
  double min_r = path.R[t];
  for (Index s = t; s <= until; ++s) {
    const bool low_l = path.L[s] <= min_l;
    const bool low_r = path.R[s] <= min_r;
    if (low_l) min_l = path.L[s];
    if (low_r) min_r = path.R[s];
    if (low_l && low_r) set.items.push_back(s);
  }
  return set;
}

IndexSet simultaneous_infima(const PathPair& path, Index t) {
  return simultaneous_infima(path, t, path.steps());
}

std::pair<Index, Index> window_argmins(const PathPair& path, Window w) {
  check_window(path, w);
  Index xl = w.a;
  Index xr = w.a;
  for (Index s = w.a + 1; s <= w.b; ++s) {
    if (path.L[s] < path.L[xl]) xl = s;
    if (path.R[s] < path.R[xr]) xr = s;
  }
  return {xl, xr};
}

Index cone_gap_reach(const PathPair& path, Index t, Window w) {
  check_window(path, w);
  if (!w.contains(t)) throw DomainError("t must lie inside the window");
  // A cone interval covering t ends at a simultaneous running infimum s of Z
  // relative to t, and these intervals are nested and grow with s. Walk the
  // candidates until the entrance leaves the window.
  double min_l = path.L[t];
  double min_r = path.R[t];
  Index entrance = t;  // cone condition verified on [entrance, s]
  Index reach = t - 1;
  for (Index s = t; s <= w.b; ++s) {
    const bool low_l = path.L[s] <= min_l;
    const bool low_r = path.R[s] <= min_r;
    if (low_l) min_l = path.L[s];
    if (low_r) min_r = path.R[s];
    if (!(low_l && low_r)) continue;
    while (entrance > 0 && path.L[entrance - 1] >= path.L[s] && path.R[entrance - 1] >= path.R[s]) {
      --entrance;
    }
    if (entrance < w.a) break;  // every later candidate reaches past a too
    if (entrance < s) reach = s;
  }
  return reach;
}

bool cone_gap_event(const PathPair& path, Index t, Index eps, Window w) {
  check_window(path, w);
  if (eps < 0 || t < w.a || t + eps > w.b) {
    throw DomainError("[t, t+eps] must lie inside the window");
  }
  return cone_gap_reach(path, t, w) < t + eps;
}

ConeOracleResult brute_force_cone_oracle(const PathPair& path, Window w) {
  check_window(path, w);
  if (w.length() > (Index{1} << 16)) throw SizeError("oracle window exceeds 2^16 steps");

  ConeOracleResult result;
  result.entrance.window = w;
  std::vector<ConeInterval> all;
  for (Index t = w.a; t <= w.b; ++t) {
    Index v = t;
    while (v > 0 && path.L[v - 1] >= path.L[t] && path.R[v - 1] >= path.R[t]) --v;
    const Index recorded = v < w.a ? EntranceMap::kBeyondWindow : v;
    result.entrance.entrance.push_back(recorded);
    if (recorded != EntranceMap::kBeyondWindow && v < t) all.push_back(make_interval(path, v, t));
  }
  for (const ConeInterval& iv : all) {
    const bool dominated = std::any_of(all.begin(), all.end(), [&](const ConeInterval& other) {
      return other.v <= iv.v && iv.t <= other.t && (other.v != iv.v || other.t != iv.t);
    });
    if (!dominated) result.maximal.push_back(iv);
  }
  return result;
}

void write_covering_csv(const CoveringCurve& curve, std::ostream& out) {
  out << "epsilon,count\n";
  out << std::setprecision(17);
  for (const CoveringPoint& p : curve.points) out << p.epsilon << ',' << p.count << '\n';
}

void write_intervals_csv(std::span<const ConeInterval> intervals, double dt, std::ostream& out) {
  out << "v,t,side,dL,dR,area\n";
  out << std::setprecision(17);
  for (const ConeInterval& iv : intervals) {
    out << iv.v << ',' << iv.t << ',' << side_name(iv.side) << ',' << iv.dL << ',' << iv.dR << ','
        << static_cast<double>(iv.area()) * dt << '\n';
  }
}

}  // namespace peanolab
