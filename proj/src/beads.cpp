#include "peanolab/beads.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "peanolab/errors.h"
#include "peanolab/rng.h"

namespace peanolab {

BeadLedger bead_ledger(const PathPair& path, Index origin) {
  if (origin < 0 || origin >= path.steps()) {
    throw DomainError("ledger origin must lie before the last path index");
  }
  const IndexSet infima = simultaneous_infima(path, origin);
  BeadLedger ledger;
  ledger.origin = origin;
  for (std::size_t k = 0; k + 1 < infima.size(); ++k) {
    const Index s = infima.items[k];
    const Index e = infima.items[k + 1];
    ledger.records.push_back({s, e, path.L[s] - path.L[e], path.R[s] - path.R[e]});
  }
  const Index last = infima.items.back();
  if (last < path.steps()) {
    const Index end = path.steps();
    ledger.open_record = BeadRecord{last, end, path.L[last] - path.L[end], path.R[last] - path.R[end]};
  }
  return ledger;
}

BeadTriple triple_of(const BeadRecord& record) {
  return {static_cast<double>(record.area()), record.dL, record.dR};
}

BeadTriple p_function(const BeadLedger& ledger, Index s) {
  if (s < ledger.origin) return {};
  if (s >= ledger.last_infimum()) {
    throw IncompleteError("index " + std::to_string(s) + " lies past the last complete bead");
  }
  // first record with end > s; right-continuity picks the one starting at s
  const auto it = std::upper_bound(ledger.records.begin(), ledger.records.end(), s,
                                   [](Index x, const BeadRecord& r) { return x < r.end; });
  return triple_of(*it);
}

std::size_t first_bead_in(const BeadLedger& ledger,
                          const std::function<bool(const BeadTriple&)>& target) {
  for (std::size_t k = 0; k < ledger.records.size(); ++k) {
    if (target(triple_of(ledger.records[k]))) return k;
  }
  throw NotFoundError("no bead satisfies the target predicate");
}

std::pair<double, double> ChordalProcess::left_limit(Index u) const {
  const auto it = std::lower_bound(jumps.begin(), jumps.end(), u,
                                   [](const BoundaryJump& j, Index x) { return j.mass_time < x; });
  const auto i = static_cast<std::size_t>(u);
  if (it != jumps.end() && it->mass_time == u) return {Lb[i] - it->dL, Rb[i] - it->dR};
  return {Lb[i], Rb[i]};
}

ChordalProcess chordal_boundary_process(const PathPair& path, const BeadRecord& bead) {
  const Index lo = bead.start;
  const Index hi = bead.end;
  if (lo < 0 || hi > path.steps() || hi <= lo) throw DomainError("bead outside path");
  // A complete bead ends at the first simultaneous infimum of Z after its start.
  const IndexSet infima = simultaneous_infima(path, lo, hi);
  if (infima.size() != 2 || infima.items.back() != hi) {
    throw IncompleteError("bead end is not the next simultaneous infimum after its start");
  }

  ChordalProcess cp;
  cp.bead = bead;
  const Index area = hi - lo;
  cp.Lb.resize(static_cast<std::size_t>(area) + 1);
  cp.Rb.resize(static_cast<std::size_t>(area) + 1);

  // Cone times strictly inside the bead enter strictly after lo, so the
  // bubbles are the maximal cone intervals of [lo, hi - 1]; the bead's own
  // span (a cone interval ending at hi) is excluded.
  std::vector<ConeInterval> bubbles;
  if (hi - 1 > lo) bubbles = maximal_cone_intervals(path, Window{lo, hi - 1});

  const double l_end = path.L[hi];
  const double r_end = path.R[hi];
  auto next = bubbles.begin();
  for (Index r = lo; r <= hi; ++r) {
    while (next != bubbles.end() && next->t < r) ++next;
    const Index tau = (next != bubbles.end() && next->v <= r) ? next->t : r;
    const auto u = static_cast<std::size_t>(r - lo);
    cp.Lb[u] = path.L[tau] - l_end;
    cp.Rb[u] = path.R[tau] - r_end;
  }
  for (const ConeInterval& b : bubbles) {
    BoundaryJump j;
    j.mass_time = b.v - lo;
    j.hold = b.area();
    j.dL = b.dL;
    j.dR = b.dR;
    j.coordinate = b.side == Side::left    ? JumpCoordinate::L
                   : b.side == Side::right ? JumpCoordinate::R
                                           : JumpCoordinate::ambiguous;
    cp.jumps.push_back(j);
  }
  return cp;
}

JumpClock mass_to_jumpcount_reparam(const ChordalProcess& cp) {
  JumpClock clock;
  for (const BoundaryJump& j : cp.jumps) {
    clock.mass_times.push_back(j.mass_time);
    clock.holds.push_back(j.hold);
  }
  return clock;
}

CollapsedProcess collapse(const ChordalProcess& cp, const JumpClock& clock) {
  CollapsedProcess out;
  out.bead = cp.bead;
  std::size_t k = 0;
  for (Index u = 0; u <= cp.area(); ++u) {
    if (k < clock.mass_times.size() && u > clock.mass_times[k]) {
      // inside (sigma, tau]: skip the held samples
      const Index tau = clock.mass_times[k] + clock.holds[k];
      if (u <= tau) continue;
      ++k;
    }
    out.Lb.push_back(cp.Lb[static_cast<std::size_t>(u)]);
    out.Rb.push_back(cp.Rb[static_cast<std::size_t>(u)]);
  }
  return out;
}

ChordalProcess expand(const CollapsedProcess& collapsed, const JumpClock& clock,
                      std::span<const BoundaryJump> jumps) {
  ChordalProcess cp;
  cp.bead = collapsed.bead;
  cp.jumps.assign(jumps.begin(), jumps.end());
  std::size_t k = 0;
  for (std::size_t i = 0; i < collapsed.Lb.size(); ++i) {
    cp.Lb.push_back(collapsed.Lb[i]);
    cp.Rb.push_back(collapsed.Rb[i]);
    const auto u = static_cast<Index>(cp.Lb.size()) - 1;
    if (k < clock.mass_times.size() && clock.mass_times[k] == u) {
      for (Index h = 0; h < clock.holds[k]; ++h) {
        cp.Lb.push_back(collapsed.Lb[i]);
        cp.Rb.push_back(collapsed.Rb[i]);
      }
      ++k;
    }
  }
  return cp;
}

TailSample bubble_tail_sample(std::span<const ConeInterval> intervals) {
  if (intervals.empty()) throw EmptySetError("no cone intervals to sample");
  TailSample sample;
  for (const ConeInterval& iv : intervals) {
    if (iv.side == Side::ambiguous) continue;
    const double x = iv.boundary_length();
    if (x > 0.0) sample.values.push_back(x);
  }
  std::sort(sample.values.begin(), sample.values.end());
  return sample;
}

TailSample gap_tail_sample(const IndexSet& set, double dt) {
  TailSample sample;
  for (std::size_t k = 1; k < set.size(); ++k) {
    sample.values.push_back(static_cast<double>(set.items[k] - set.items[k - 1]) * dt);
  }
  std::sort(sample.values.begin(), sample.values.end());
  return sample;
}

TailSample gap_tail_sample(const IndexSet& set, double dt, Index horizon) {
  TailSample sample = gap_tail_sample(set, dt);
  if (!set.empty() && horizon > set.items.back()) {
    sample.censored.push_back(static_cast<double>(horizon - set.items.back()) * dt);
  }
  return sample;
}

void append_tail_sample(TailSample& into, const TailSample& from) {
  auto merge = [](std::vector<double>& a, const std::vector<double>& b) {
    const auto mid = static_cast<std::ptrdiff_t>(a.size());
    a.insert(a.end(), b.begin(), b.end());
    std::inplace_merge(a.begin(), a.begin() + mid, a.end());
  };
  merge(into.values, from.values);
  merge(into.censored, from.censored);
}

double sample_boltzmann_area(double ell, std::uint64_t seed, std::uint64_t index) {
  if (!(ell > 0.0) || !std::isfinite(ell)) throw DomainError("boundary length must be positive");
  CounterRng rng(seed, index);
  const double z1 = rng.normal();
  const double z2 = rng.normal();
  const double z3 = rng.normal();
  const double gamma_3_2 = 0.5 * (z1 * z1 + z2 * z2 + z3 * z3);
  return ell * ell / (2.0 * gamma_3_2);
}

double boltzmann_area_density(double ell, double a) {
  if (a <= 0.0) return 0.0;
  return ell * ell * ell / std::sqrt(2.0 * std::numbers::pi * a * a * a * a * a) *
         std::exp(-ell * ell / (2.0 * a));
}

double boltzmann_area_cdf(double ell, double a) {
  if (a <= 0.0) return 0.0;
  const double x = ell * ell / (2.0 * a);
  return std::erfc(std::sqrt(x)) + 2.0 * std::sqrt(x / std::numbers::pi) * std::exp(-x);
}

void write_ledger_csv(const BeadLedger& ledger, std::ostream& out) {
  out << "start,end,area,dL,dR\n";
  out << std::setprecision(17);
  for (const BeadRecord& r : ledger.records) {
    out << r.start << ',' << r.end << ',' << r.area() << ',' << r.dL << ',' << r.dR << '\n';
  }
}

void write_chordal_csv(const ChordalProcess& cp, std::ostream& out) {
  out << "mass_time,Lb,Rb,is_jump\n";
  out << std::setprecision(17);
  std::size_t k = 0;
  for (Index u = 0; u <= cp.area(); ++u) {
    const auto i = static_cast<std::size_t>(u);
    if (k < cp.jumps.size() && cp.jumps[k].mass_time == u) {
      const auto [l, r] = cp.left_limit(u);
      out << u << ',' << l << ',' << r << ",0\n";
      out << u << ',' << cp.Lb[i] << ',' << cp.Rb[i] << ",1\n";
      ++k;
    } else {
      out << u << ',' << cp.Lb[i] << ',' << cp.Rb[i] << ",0\n";
    }
  }
}

}  // namespace peanolab
