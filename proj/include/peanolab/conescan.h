#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "peanolab/corrpath.h"

namespace peanolab {

// Discrete pi/2-cone times. An index t is a cone time if for some v < t the
// whole stretch Z[v..t] stays in the closed quadrant Z_t + [0,inf)^2; the
// entrance v_Z(t) is the least such v. A cone interval [v_Z(t), t] belongs to a
// window [a, b] only if it fits inside it, so a cone whose entrance lies before
// a is reported as extending beyond the window. Index 0 has no past, so a cone
// reaching it enters at 0.

/// Entrance map of a window: entrance[t - a] = v_Z(t), or kBeyondWindow when
/// the cone at t reaches past a. v_Z(t) == t means t is not a cone time.
struct EntranceMap {
  static constexpr Index kBeyondWindow = -1;

  Window window;
  std::vector<Index> entrance;

  Index at(Index t) const { return entrance[static_cast<std::size_t>(t - window.a)]; }
  /// True iff t is a cone time whose interval lies in the window.
  bool is_cone_time(Index t) const {
    const Index v = at(t);
    return v != kBeyondWindow && v < t;
  }

  friend bool operator==(const EntranceMap&, const EntranceMap&) = default;
};

/// Which side of the curve traces the bubble. On a continuous path exactly one
/// coordinate of Z_t - Z_v vanishes; when the discrete path cannot decide
/// (both barriers hit at the same index, or the cone reaches index 0) the
/// interval is ambiguous.
enum class Side { left, right, ambiguous };

struct ConeInterval {
  Index v = 0;
  Index t = 0;
  Side side = Side::ambiguous;
  double dL = 0.0;  // L_t - L_v <= 0
  double dR = 0.0;  // R_t - R_v <= 0

  Index area() const noexcept { return t - v; }
  /// Bubble boundary length |Z_t - Z_v| (l1 norm; one coordinate is ~0).
  double boundary_length() const noexcept { return -(dL + dR); }
  bool contains(Index s) const noexcept { return v <= s && s <= t; }

  friend bool operator==(const ConeInterval&, const ConeInterval&) = default;
};

/// Strictly increasing list of indices.
struct IndexSet {
  std::vector<Index> items;

  bool empty() const noexcept { return items.empty(); }
  std::size_t size() const noexcept { return items.size(); }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;
};

struct CoveringPoint {
  double epsilon = 0.0;
  std::size_t count = 0;
};

/// Minimal cover counts N_eps, one entry per epsilon.
struct CoveringCurve {
  std::vector<CoveringPoint> points;
};

/// O(n): two previous-strictly-smaller sweeps, one per coordinate.
EntranceMap entrance_times(const PathPair& path, Window w);

/// Maximal cone intervals of the window, sorted by right endpoint. Distinct
/// maximal intervals are disjoint as closed intervals.
std::vector<ConeInterval> maximal_cone_intervals(const PathPair& path, Window w);
std::vector<ConeInterval> maximal_cone_intervals(const PathPair& path, const EntranceMap& map);

/// Window indices outside every open maximal cone interval (endpoints kept).
IndexSet non_cone_set(const PathPair& path, Window w);
IndexSet non_cone_set(Window w, std::span<const ConeInterval> maximal);

/// Greedy left-to-right cover by half-open intervals [x, x + eps) in time
/// units (index * dt). Throws EmptySetError on an empty set.
CoveringCurve covering_count(const IndexSet& set, std::span<const double> epsilons, double dt);

/// Dyadic grid (b - a) * dt * 2^k for k = min_exponent .. max_exponent.
std::vector<double> dyadic_epsilons(Window w, double dt, int min_exponent, int max_exponent);

/// Indices s >= t where L and R both sit at their running minimum over [t, s]
/// (weak inequality). Scans to the end of the path, or to `until` if given.
IndexSet simultaneous_infima(const PathPair& path, Index t);
IndexSet simultaneous_infima(const PathPair& path, Index t, Index until);

/// First argmin of L and of R over the window.
std::pair<Index, Index> window_argmins(const PathPair& path, Window w);

/// True iff no cone time s has [t, t+eps] inside [v_Z(s), s] inside [a, b].
/// eps is in index units.
bool cone_gap_event(const PathPair& path, Index t, Index eps, Window w);

/// Largest cone time s with t, s in [v_Z(s), s] inside [a, b], or t - 1 if
/// there is none. cone_gap_event(path, t, eps, w) == (reach < t + eps), so one
/// scan answers every eps.
Index cone_gap_reach(const PathPair& path, Index t, Window w);

struct ConeOracleResult {
  EntranceMap entrance;
  std::vector<ConeInterval> maximal;
};

/// Quadratic evaluation straight from the definitions. Windows longer than
/// 2^16 steps throw SizeError.
ConeOracleResult brute_force_cone_oracle(const PathPair& path, Window w);

void write_covering_csv(const CoveringCurve& curve, std::ostream& out);
void write_intervals_csv(std::span<const ConeInterval> intervals, double dt, std::ostream& out);

const char* side_name(Side side) noexcept;

}  // namespace peanolab
