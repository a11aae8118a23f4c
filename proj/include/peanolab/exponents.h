#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "peanolab/beads.h"
#include "peanolab/conescan.h"

namespace peanolab {

/// Closed-form constants attached to kappa' in (4, 8).
struct Constants {
  double kappa_prime = 0.0;
  double gamma = 0.0;              // 4 / sqrt(kappa')
  double kappa = 0.0;              // gamma^2
  double Q = 0.0;                  // 2/gamma + gamma/2
  double dim_infima = 0.0;         // 1 - kappa'/8
  double dim_ancestor_free = 0.0;  // kappa'/8
  double stable_index_bubbles = 0.0;  // kappa'/4
  double diam_alpha = 0.0;         // decay exponent of the diameter sum
};

Constants constants(double kappa_prime);

/// Diameter-sum exponent written in gamma.
double diam_alpha_gamma_form(double gamma);
/// The same exponent written in kappa'.
double diam_alpha_kappa_form(double kappa_prime);

/// One-sided KPZ bound (2 + gamma^2/2) beta - (gamma^2/2) beta^2 - 2.
double kpz_upper(double beta, double gamma);

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double stderr_slope = 0.0;
  std::size_t sample_size = 0;
  /// Trial-level bootstrap standard error; negative when not computed.
  double bootstrap_stderr = -1.0;
  /// The log-log points the fit used.
  std::vector<double> log_x;
  std::vector<double> log_y;
};

/// Ordinary least squares of log y on log x. Needs >= 3 points with positive
/// coordinates and a non-degenerate x range (FitError otherwise).
RegressionFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Fit of log N_eps against log(1/eps): the slope is a box-counting dimension.
RegressionFit fit_loglog(const CoveringCurve& curve);

/// Epsilon range kept by dimension fits.
struct ScaleCutoff {
  double min_epsilon = 0.0;
  double max_epsilon = 0.0;
};

/// Drops eps below 8 * dt * mixing_guard and above span / 8.
ScaleCutoff default_scale_cutoff(double span, double dt, double mixing_guard = 1.0);

/// Covering count plus log-log fit over the epsilons inside the cutoff.
/// Needs at least 3 dyadic scales after the cutoff.
RegressionFit estimate_dimension(const IndexSet& set, double dt, std::span<const double> epsilons,
                                 const ScaleCutoff& cutoff);

/// Fit of the trial-averaged covering curve, with a bootstrap over trials.
/// All curves must share the same epsilon grid.
RegressionFit fit_mean_covering(std::span<const CoveringCurve> curves, const ScaleCutoff& cutoff,
                                std::size_t bootstrap_resamples, std::uint64_t seed);

struct TailCutoff {
  double x_min = 0.0;             // 0: start at the sample minimum
  std::size_t min_upper_count = 100;  // upper edge keeps this many samples above it
  int points = 11;                // CCDF evaluation points across the decade
};

/// Empirical P[X >= x]: the plain CCDF, or the Kaplan-Meier product-limit
/// estimate when the sample carries censored observations.
double survival_at(const TailSample& sample, double x);

/// Log-log slope of P[X >= x] over the central decade of [lower edge, upper
/// edge]. The lower edge is max(x_min, smallest value); the upper edge keeps
/// min_upper_count observations (censored ones included) at or above it.
/// Negative for a decaying tail.
RegressionFit tail_slope(const TailSample& sample, const TailCutoff& cutoff = {});

/// One Monte-Carlo trial: for each eps, whether the event occurred.
using EventSampler = std::function<void(std::uint64_t seed, std::uint64_t trial,
                                        std::span<const double> epsilons,
                                        std::span<std::uint8_t> hits)>;

struct ProbabilityScaling {
  RegressionFit fit;
  std::vector<double> epsilons;
  std::vector<double> probability;
  std::vector<double> binomial_stderr;
  std::vector<std::string> warnings;
};

/// Slope of log P(eps) against log eps. Trials run in parallel with
/// per-trial keys; counts are reduced in trial order. Points with zero hits are
/// dropped with a warning.
ProbabilityScaling mc_probability_scaling(const EventSampler& sampler,
                                          std::span<const double> epsilons, std::size_t trials,
                                          std::uint64_t seed, std::size_t bootstrap_resamples = 32);

}  // namespace peanolab
