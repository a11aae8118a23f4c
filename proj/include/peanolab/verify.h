#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "peanolab/corrpath.h"
#include "peanolab/exponents.h"

namespace peanolab {

/// Sizes of the acceptance suite. Defaults are the full-size runs.
struct VerifyConfig {
  std::uint64_t seed = 1;
  std::size_t bootstrap_resamples = 32;

  // covariance law
  std::vector<double> covariance_kappas{5.0, 6.0, 7.0};
  Index covariance_steps = 1'000'000;

  // long lattice paths: covering dimensions, bubble and gap tails
  double kappa_prime = 6.0;
  double second_kappa_prime = 5.0;  // extra run of the ancestor-free covering
  std::size_t long_paths = 32;
  int long_log_steps = 24;
  int eps_min_exponent = -16;  // dyadic grid (b - a) * 2^k
  int eps_max_exponent = -4;
  int gap_segment_log_steps = 18;
  double gap_x_min = 1024.0;

  // cone gap probability on Brownian windows
  int cone_window_log_steps = 18;
  int cone_eps_min_log = 6;
  int cone_eps_max_log = 11;
  std::size_t cone_trials = 10'000;

  // mating
  std::size_t maps = 100;
  int map_log_steps = 14;

  // sweep against the quadratic oracle
  std::size_t oracle_paths = 1000;
  int oracle_log_steps = 10;

  // bead ledger and chordal dictionary
  std::size_t beads = 10'000;
  int bead_path_log_steps = 12;

  // free Boltzmann area law
  std::size_t boltzmann_samples = 1'000'000;
  double boltzmann_ell = 1.0;

  /// Throws DomainError on a value the suite cannot run with.
  void validate() const;
};

struct ClaimResult {
  std::string claim_id;
  int criterion = 0;
  std::string anchor;  // short neutral description of the checked statement
  double theoretical_value = 0.0;
  double estimate = 0.0;
  double stderr_estimate = 0.0;
  double tolerance = 0.0;
  std::size_t n_paths = 0;
  Index n_steps = 0;
  bool pass = false;
  std::optional<RegressionFit> fit;
};

struct VerificationReport {
  std::string version;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::size_t workers = 0;
  /// Wall time per stage, in run order; part of the environment stamp.
  std::vector<std::pair<std::string, double>> stage_seconds;
  std::vector<ClaimResult> claims;

  bool all_pass() const;
  /// True iff every claim of the criterion passed (false if it has none).
  bool criterion_pass(int criterion) const;
};

/// Ensemble of long paths analysed for covering dimensions and tails.
struct PathEnsemble {
  double kappa_prime = 6.0;
  PathKind kind = PathKind::lattice;
  Index n_steps = Index{1} << 20;
  double dt = 1.0;           // Brownian only; lattice paths use 1
  double window_a = 0.0;     // window as fractions of [0, n]
  double window_b = 1.0;
  std::size_t paths = 8;
  int eps_min_exponent = -16;
  int eps_max_exponent = -4;
  Index gap_segment = Index{1} << 18;  // steps per infimum restart
  double gap_x_min = 1024.0;           // time units
  std::uint64_t seed = 1;
  std::size_t bootstrap_resamples = 32;
  bool ancestor_free_only = false;

  Window window() const;
  /// Throws DomainError on an unusable setup.
  void validate() const;
};

/// Claims for the infima dimension (2), ancestor-free covering (3), bubble
/// tail (5) and infima gap tail (6) of one ensemble. Only claim 3 when
/// ancestor_free_only is set.
std::vector<ClaimResult> ensemble_claims(const PathEnsemble& ensemble);

using ProgressSink = std::function<void(const std::string&)>;

/// Runs criteria 1 to 12. Claim values are a pure function of the config;
/// only the environment stamp (wall time, workers) varies between runs.
VerificationReport verify_all(const VerifyConfig& config, const ProgressSink& progress = {});

/// Individual criteria, each returning its claims.
std::vector<ClaimResult> verify_covariance(const VerifyConfig& config);
std::vector<ClaimResult> verify_long_paths(const VerifyConfig& config);  // criteria 2, 3, 5, 6
std::vector<ClaimResult> verify_cone_gap(const VerifyConfig& config);
std::vector<ClaimResult> verify_mating(const VerifyConfig& config);
std::vector<ClaimResult> verify_oracle(const VerifyConfig& config);
std::vector<ClaimResult> verify_identities(const VerifyConfig& config);
std::vector<ClaimResult> verify_beads(const VerifyConfig& config);  // criteria 10, 11
std::vector<ClaimResult> verify_boltzmann(const VerifyConfig& config);

/// JSON report. Without the stamp the output is byte-identical across reruns.
void write_report_json(const VerificationReport& report, std::ostream& out, bool with_stamp = true);

const char* library_version() noexcept;

}  // namespace peanolab
