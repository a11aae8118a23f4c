#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "peanolab/conescan.h"
#include "peanolab/corrpath.h"

namespace peanolab {

/// One bead of the future surface seen from the ledger origin: the stretch
/// between consecutive simultaneous running infima of (L, R).
struct BeadRecord {
  Index start = 0;
  Index end = 0;
  double dL = 0.0;  // L_start - L_end >= 0
  double dR = 0.0;  // R_start - R_end >= 0

  Index area() const noexcept { return end - start; }

  friend bool operator==(const BeadRecord&, const BeadRecord&) = default;
};

struct BeadLedger {
  Index origin = 0;
  /// Complete records; they abut and tile [origin, last infimum time].
  std::vector<BeadRecord> records;
  /// Stretch after the last infimum time up to the end of the path, if any.
  /// It is not a bead yet: its closing infimum lies beyond the sample.
  std::optional<BeadRecord> open_record;

  Index last_infimum() const noexcept { return records.empty() ? origin : records.back().end; }
};

struct BeadTriple {
  double area = 0.0;
  double dL = 0.0;
  double dR = 0.0;

  friend bool operator==(const BeadTriple&, const BeadTriple&) = default;
};

BeadLedger bead_ledger(const PathPair& path, Index origin);

/// Area and boundary lengths of the bead containing s (areas in index units).
/// Right-continuous at record boundaries; (0,0,0) for s < origin. Throws
/// IncompleteError past the last complete record.
BeadTriple p_function(const BeadLedger& ledger, Index s);

/// Index of the first record whose (area, dL, dR) satisfies the predicate.
/// Throws NotFoundError if none does.
std::size_t first_bead_in(const BeadLedger& ledger,
                          const std::function<bool(const BeadTriple&)>& target);

BeadTriple triple_of(const BeadRecord& record);

enum class JumpCoordinate { L, R, ambiguous };

struct BoundaryJump {
  Index mass_time = 0;  // sigma^b: the jump happens here
  Index hold = 0;       // tau^b - sigma^b = area of the disconnected bubble
  JumpCoordinate coordinate = JumpCoordinate::ambiguous;
  double dL = 0.0;  // jump of L^b (<= 0)
  double dR = 0.0;  // jump of R^b (<= 0)

  double magnitude() const noexcept { return -(dL + dR); }
};

/// Boundary length process of a chordal exploration of one bead,
/// parameterized by the mass it disconnects. Between bubbles Zb follows Z
/// (linearly between grid points); on [sigma^b, tau^b] it is constant at its
/// post-jump value, and it drops by the bubble boundary length at sigma^b.
struct ChordalProcess {
  BeadRecord bead;
  /// Zb at mass times u = 0..area (right-continuous values).
  std::vector<double> Lb;
  std::vector<double> Rb;
  /// Bubbles in order of mass time; constancy intervals are
  /// [mass_time, mass_time + hold].
  std::vector<BoundaryJump> jumps;

  Index area() const noexcept { return bead.area(); }
  /// Left limit of Zb at mass time u (differs from Zb only at jump times).
  std::pair<double, double> left_limit(Index u) const;
};

/// Builds Zb_u = Z_{tau(lo + u)} - Z_hi for the bead [lo, hi], where tau maps an
/// index inside a maximal cone interval of the bead interior to its right end.
ChordalProcess chordal_boundary_process(const PathPair& path, const BeadRecord& bead);

/// Jump-ordinal clock: entry k is the mass time of the k-th bubble. A discrete
/// stand-in for the local-time clock at disconnection events; it carries no
/// normalization.
struct JumpClock {
  std::vector<Index> mass_times;
  std::vector<Index> holds;
};

JumpClock mass_to_jumpcount_reparam(const ChordalProcess& cp);

/// Zb with every constancy interval squeezed to its left endpoint.
struct CollapsedProcess {
  BeadRecord bead;
  std::vector<double> Lb;
  std::vector<double> Rb;
};

CollapsedProcess collapse(const ChordalProcess& cp, const JumpClock& clock);
/// Inverse of collapse: reinserts each constancy interval.
ChordalProcess expand(const CollapsedProcess& collapsed, const JumpClock& clock,
                      std::span<const BoundaryJump> jumps);

/// Sorted positive sample for tail estimation. `censored` holds
/// right-censored observations: lengths known only to exceed the value (an
/// open gap cut off by the end of the data).
struct TailSample {
  std::vector<double> values;
  std::vector<double> censored;
};

/// Bubble boundary lengths of maximal cone excursions. Ambiguous intervals
/// are skipped. Throws EmptySetError on an empty input list.
TailSample bubble_tail_sample(std::span<const ConeInterval> intervals);

/// Gap lengths (in time units) between consecutive elements of a set.
TailSample gap_tail_sample(const IndexSet& set, double dt);
/// Same, plus the open gap from the last element to `horizon` as a censored
/// observation when horizon lies past it.
TailSample gap_tail_sample(const IndexSet& set, double dt, Index horizon);

/// Pools samples; both lists stay sorted.
void append_tail_sample(TailSample& into, const TailSample& from);

/// Area of a free Boltzmann disk with boundary length ell:
/// density ell^3 / sqrt(2 pi a^5) * exp(-ell^2 / (2a)). Sampled as
/// ell^2 / (2G) with G ~ Gamma(3/2, 1) built from three squared normals.
double sample_boltzmann_area(double ell, std::uint64_t seed, std::uint64_t index = 0);
double boltzmann_area_density(double ell, double a);
/// Closed-form CDF (upper regularized gamma at ell^2 / 2a).
double boltzmann_area_cdf(double ell, double a);

void write_ledger_csv(const BeadLedger& ledger, std::ostream& out);
void write_chordal_csv(const ChordalProcess& cp, std::ostream& out);

}  // namespace peanolab
