#include "peanolab/exponents.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "peanolab/errors.h"
#include "peanolab/parallel.h"
#include "peanolab/rng.h"

namespace peanolab {

double diam_alpha_gamma_form(double gamma) {
  const double g2 = gamma * gamma;
  return 2.0 * (g2 - 2.0) / (g2 * (4.0 + 3.0 * g2 + 2.0 * std::sqrt(2.0 * g2 * g2 + 8.0 * g2 - 4.0)));
}

double diam_alpha_kappa_form(double kappa_prime) {
  const double k = kappa_prime;
  return (8.0 - k) * k / (16.0 * (12.0 + k + std::sqrt(32.0 * (4.0 + k) - k * k)));
}

Constants constants(double kappa_prime) {
  if (!(kappa_prime > 4.0 && kappa_prime < 8.0)) {
    throw DomainError("constants need kappa' in (4, 8), got " + std::to_string(kappa_prime));
  }
  Constants c;
  c.kappa_prime = kappa_prime;
  c.gamma = 4.0 / std::sqrt(kappa_prime);
  c.kappa = c.gamma * c.gamma;
  c.Q = 2.0 / c.gamma + c.gamma / 2.0;
  c.dim_ancestor_free = kappa_prime / 8.0;
  c.dim_infima = 1.0 - c.dim_ancestor_free;
  c.stable_index_bubbles = kappa_prime / 4.0;
  c.diam_alpha = diam_alpha_kappa_form(kappa_prime);
  return c;
}

double kpz_upper(double beta, double gamma) {
  const double g2 = gamma * gamma;
  return (2.0 + g2 / 2.0) * beta - g2 / 2.0 * beta * beta - 2.0;
}

namespace {

RegressionFit ols(std::vector<double> lx, std::vector<double> ly) {
  const std::size_t n = lx.size();
  if (n < 3) throw FitError("log-log fit needs at least 3 points, got " + std::to_string(n));
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 1e-24)) throw FitError("degenerate x range in log-log fit");

  RegressionFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  // a flat response leaves only rounding noise in syy; call it a perfect fit
  const double noise = 1e-24 * static_cast<double>(n) * (1.0 + my * my);
  if (syy > noise) {
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  } else {
    fit.r_squared = ss_res <= noise ? 1.0 : 0.0;
  }
  fit.stderr_slope = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
  fit.sample_size = n;
  fit.log_x = std::move(lx);
  fit.log_y = std::move(ly);
  return fit;
}

double stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double s = 0.0;
  for (const double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

RegressionFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("x and y differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw FitError("log-log fit needs positive coordinates");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return ols(std::move(lx), std::move(ly));
}

RegressionFit fit_loglog(const CoveringCurve& curve) {
  std::vector<double> x, y;
  for (const CoveringPoint& p : curve.points) {
    x.push_back(1.0 / p.epsilon);
    y.push_back(static_cast<double>(p.count));
  }
  return fit_loglog(x, y);
}

ScaleCutoff default_scale_cutoff(double span, double dt, double mixing_guard) {
  return {8.0 * dt * mixing_guard, span / 8.0};
}

namespace {

std::vector<std::size_t> kept_scales(std::span<const double> epsilons, const ScaleCutoff& cutoff) {
  std::vector<std::size_t> keep;
  // tolerate rounding of dyadic grid points sitting exactly on a cutoff
  const double slack = 1.0 + 1e-12;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (epsilons[i] * slack >= cutoff.min_epsilon && epsilons[i] <= cutoff.max_epsilon * slack) {
      keep.push_back(i);
    }
  }
  if (keep.size() < 3) {
    throw FitError("fewer than 3 scales survive the cutoff [" + std::to_string(cutoff.min_epsilon) +
                   ", " + std::to_string(cutoff.max_epsilon) + "]");
  }
  return keep;
}

}  // namespace

RegressionFit estimate_dimension(const IndexSet& set, double dt, std::span<const double> epsilons,
                                 const ScaleCutoff& cutoff) {
  const std::vector<std::size_t> keep = kept_scales(epsilons, cutoff);
  std::vector<double> eps;
  for (const std::size_t i : keep) eps.push_back(epsilons[i]);
  return fit_loglog(covering_count(set, eps, dt));
}

RegressionFit fit_mean_covering(std::span<const CoveringCurve> curves, const ScaleCutoff& cutoff,
                                std::size_t bootstrap_resamples, std::uint64_t seed) {
  if (curves.empty()) throw EmptySetError("no covering curves to average");
  const std::size_t grid = curves.front().points.size();
  std::vector<double> eps;
  for (const CoveringPoint& p : curves.front().points) eps.push_back(p.epsilon);
  for (const CoveringCurve& c : curves) {
    if (c.points.size() != grid) throw ShapeError("covering curves use different grids");
  }
  const std::vector<std::size_t> keep = kept_scales(eps, cutoff);

  auto fit_indices = [&](const std::vector<std::size_t>& trials) {
    std::vector<double> x, y;
    for (const std::size_t i : keep) {
      double total = 0.0;
      for (const std::size_t t : trials) total += static_cast<double>(curves[t].points[i].count);
      x.push_back(1.0 / eps[i]);
      y.push_back(total / static_cast<double>(trials.size()));
    }
    return fit_loglog(x, y);
  };

  std::vector<std::size_t> all(curves.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  RegressionFit fit = fit_indices(all);
  if (bootstrap_resamples > 0 && curves.size() > 1) {
    CounterRng rng(seed, 0xB00757A9ULL);
    std::vector<double> slopes;
    std::vector<std::size_t> pick(curves.size());
    for (std::size_t b = 0; b < bootstrap_resamples; ++b) {
      for (auto& p : pick) p = static_cast<std::size_t>(rng.next_u64() % curves.size());
      slopes.push_back(fit_indices(pick).slope);
    }
    fit.bootstrap_stderr = stddev(slopes);
  }
  return fit;
}

namespace {

// Product-limit survival P[X >= x] at ascending query points. Events tied
// with a censored value count first, as usual.
std::vector<double> survival_curve(const TailSample& sample, const std::vector<double>& at) {
  const std::vector<double>& ev = sample.values;
  const std::vector<double>& cs = sample.censored;
  std::vector<double> out;
  out.reserve(at.size());
  double surv = 1.0;
  std::size_t risk = ev.size() + cs.size();
  std::size_t i = 0, j = 0;
  for (const double x : at) {
    // consume every observation strictly below x
    while ((i < ev.size() && ev[i] < x) || (j < cs.size() && cs[j] < x)) {
      const double next = std::min(i < ev.size() ? ev[i] : HUGE_VAL, j < cs.size() ? cs[j] : HUGE_VAL);
      std::size_t d = 0;
      while (i < ev.size() && ev[i] == next) ++d, ++i;
      if (d > 0 && risk > 0) surv *= 1.0 - static_cast<double>(d) / static_cast<double>(risk);
      risk -= d;
      while (j < cs.size() && cs[j] == next) --risk, ++j;
    }
    out.push_back(surv);
  }
  return out;
}

}  // namespace

double survival_at(const TailSample& sample, double x) {
  return survival_curve(sample, {x}).front();
}

RegressionFit tail_slope(const TailSample& sample, const TailCutoff& cutoff) {
  const std::vector<double>& xs = sample.values;
  if (!std::is_sorted(xs.begin(), xs.end()) ||
      !std::is_sorted(sample.censored.begin(), sample.censored.end())) {
    throw DomainError("tail sample must be sorted");
  }
  const std::size_t keep = std::max<std::size_t>(cutoff.min_upper_count, 100);
  const auto first = std::lower_bound(xs.begin(), xs.end(), std::max(cutoff.x_min, 0.0));
  if (first == xs.end()) throw FitError("no tail samples above the cutoff");
  const double lo = std::max(*first, cutoff.x_min);
  if (!(lo > 0.0)) throw FitError("tail sample must be positive");

  std::vector<double> all(xs.begin(), xs.end());
  all.insert(all.end(), sample.censored.begin(), sample.censored.end());
  std::sort(all.begin(), all.end());
  const auto above = static_cast<std::size_t>(all.end() - std::lower_bound(all.begin(), all.end(), lo));
  if (above < keep) {
    throw FitError("tail fit needs at least " + std::to_string(keep) +
                   " samples above the cutoff, got " + std::to_string(above));
  }
  const double hi = all[all.size() - keep];
  const double centre = std::sqrt(lo * hi);
  const double half_decade = std::sqrt(10.0);
  const double d_lo = centre / half_decade;
  const double d_hi = centre * half_decade;
  if (d_lo < lo * (1.0 - 1e-12) || d_hi > hi * (1.0 + 1e-12)) {
    throw FitError("tail sample spans less than a decade between its cutoffs");
  }
  const int points = std::max(cutoff.points, 3);
  std::vector<double> x;
  for (int k = 0; k < points; ++k) x.push_back(d_lo * std::pow(10.0, static_cast<double>(k) / (points - 1)));
  const std::vector<double> y = survival_curve(sample, x);
  return fit_loglog(x, y);
}

ProbabilityScaling mc_probability_scaling(const EventSampler& sampler,
                                          std::span<const double> epsilons, std::size_t trials,
                                          std::uint64_t seed, std::size_t bootstrap_resamples) {
  if (trials < 1000) throw DomainError("probability scaling needs at least 1000 trials");
  const std::size_t m = epsilons.size();
  std::vector<std::uint8_t> hits(trials * m, 0);
  parallel_for(trials, [&](std::size_t trial) {
    sampler(seed, trial, epsilons, std::span<std::uint8_t>(hits.data() + trial * m, m));
  });

  ProbabilityScaling out;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t count = 0;
    for (std::size_t t = 0; t < trials; ++t) count += hits[t * m + i] != 0;
    const double p = static_cast<double>(count) / static_cast<double>(trials);
    if (count == 0) {
      out.warnings.push_back("no hits at eps = " + std::to_string(epsilons[i]) + "; point dropped");
      continue;
    }
    kept.push_back(i);
    out.epsilons.push_back(epsilons[i]);
    out.probability.push_back(p);
    out.binomial_stderr.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(trials)));
  }
  out.fit = fit_loglog(out.epsilons, out.probability);

  if (bootstrap_resamples > 0) {
    CounterRng rng(seed, 0xB00757A9ULL);
    std::vector<double> slopes;
    std::vector<double> p(kept.size());
    for (std::size_t b = 0; b < bootstrap_resamples; ++b) {
      std::vector<std::size_t> counts(kept.size(), 0);
      for (std::size_t t = 0; t < trials; ++t) {
        const auto pick = static_cast<std::size_t>(rng.next_u64() % trials);
        for (std::size_t k = 0; k < kept.size(); ++k) counts[k] += hits[pick * m + kept[k]] != 0;
      }
      bool usable = true;
      for (std::size_t k = 0; k < kept.size(); ++k) {
        usable = usable && counts[k] > 0;
        p[k] = static_cast<double>(counts[k]) / static_cast<double>(trials);
      }
      if (usable) slopes.push_back(fit_loglog(out.epsilons, p).slope);
    }
    out.fit.bootstrap_stderr = stddev(slopes);
  }
  return out;
}

}  // namespace peanolab
