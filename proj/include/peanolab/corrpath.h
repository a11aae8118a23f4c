#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace peanolab {

/// Path index. Signed so that "no such index" sentinels stay representable.
using Index = std::int64_t;

/// Covariance structure of the peanosphere pair Z = (L, R):
/// Var L_t = Var R_t = alpha*t and Cov(L_t, R_t) = alpha*rho*t.
struct CovSpec {
  double kappa_prime = 6.0;
  double gamma = 0.0;        // 4 / sqrt(kappa')
  double alpha_scale = 1.0;  // undetermined overall variance constant
  double rho = 0.0;          // -cos(pi gamma^2 / 4)

  friend bool operator==(const CovSpec&, const CovSpec&) = default;
};

/// kappa' must lie in (4, 8]. kappa' = 8 is the uncorrelated boundary case.
CovSpec build_cov_spec(double kappa_prime, double alpha_scale = 1.0);

enum class PathKind : std::uint8_t { brownian = 0, lattice = 1 };

/// A sampled two-dimensional path with n steps (n + 1 samples, L[0] = R[0] = 0).
/// Lattice paths have dt = 1 and +-1 increments in each coordinate.
struct PathPair {
  CovSpec spec;
  PathKind kind = PathKind::brownian;
  double dt = 1.0;
  std::vector<double> L;
  std::vector<double> R;

  Index steps() const noexcept { return static_cast<Index>(L.size()) - 1; }
  Index last() const noexcept { return steps(); }

  friend bool operator==(const PathPair&, const PathPair&) = default;
};

/// Closed index window [a, b] of a path, 0 <= a <= b <= n.
struct Window {
  Index a = 0;
  Index b = 0;

  Index length() const noexcept { return b - a; }
  bool contains(Index t) const noexcept { return a <= t && t <= b; }

  friend bool operator==(const Window&, const Window&) = default;
};

/// Throws DomainError unless 0 <= a <= b <= path.steps().
void check_window(const PathPair& path, Window w);

/// Whole-path window [0, n].
inline Window full_window(const PathPair& path) { return {0, path.steps()}; }

/// Step count used by the deterministic parallel fill of Brownian paths.
inline constexpr Index kBrownianChunk = Index{1} << 16;

/// Gaussian increments with covariance dt*alpha*[[1,rho],[rho,1]].
/// Output is a pure function of (spec, n, dt, seed, trial).
PathPair sample_brownian_pair(const CovSpec& spec, Index n, double dt, std::uint64_t seed,
                              std::uint64_t trial = 0);

/// +-1 steps with P(+,+) = P(-,-) = (1+rho)/4 and P(+,-) = P(-,+) = (1-rho)/4.
PathPair sample_lattice_pair(const CovSpec& spec, Index n, std::uint64_t seed,
                             std::uint64_t trial = 0);

struct LatticeStepLaw {
  double same = 0.0;      // each of (+,+) and (-,-)
  double opposite = 0.0;  // each of (+,-) and (-,+)
};
LatticeStepLaw lattice_step_law(double rho);

struct EmpiricalCov {
  double var_L = 0.0;
  double var_R = 0.0;
  double cov = 0.0;

  double correlation() const;
};

/// Sample (co)variances of the increments, divided by dt.
EmpiricalCov empirical_cov(const PathPair& path);

/// Sign-of-increment coarsening of a path onto the +-1 lattice (zero
/// increments map to +1).
PathPair coarsen_to_lattice(const PathPair& path);

// Binary path format: "PNLB", u16 version, u8 kind, f64 kappa', f64 alpha,
// f64 dt, u64 n, then n+1 (L_i, R_i) f64 pairs. Little-endian throughout.
inline constexpr std::uint16_t kPathFormatVersion = 1;

void save_path(const PathPair& path, std::ostream& out);
void save_path(const PathPair& path, const std::filesystem::path& destination);
PathPair load_path(std::istream& in);
PathPair load_path(const std::filesystem::path& source);

}  // namespace peanolab
