#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "peanolab/errors.h"
#include "peanolab/exponents.h"
#include "peanolab/rng.h"

using namespace peanolab;

TEST_CASE("constants at kappa' = 6", "[exponents]") {
  const Constants c = constants(6.0);
  CHECK(c.dim_infima == 0.25);
  CHECK(c.dim_ancestor_free == 0.75);
  CHECK(c.stable_index_bubbles == 1.5);
  CHECK(c.diam_alpha == Catch::Approx(12.0 / (16.0 * (18.0 + std::sqrt(284.0)))).epsilon(1e-14));
  CHECK(c.diam_alpha == Catch::Approx(0.021520).margin(1e-5));
  CHECK(c.gamma * c.gamma == Catch::Approx(c.kappa));
  CHECK(c.Q == Catch::Approx(2.0 / c.gamma + c.gamma / 2.0));
  CHECK_THROWS_AS(constants(8.0), DomainError);
  CHECK_THROWS_AS(constants(4.0), DomainError);
}

TEST_CASE("closed-form identities on a grid", "[exponents][property]") {
  for (int i = 1; i < 1000; ++i) {
    const double kp = 4.0 + 4.0 * i / 1000.0;
    const Constants c = constants(kp);
    CHECK(std::abs(diam_alpha_gamma_form(c.gamma) - diam_alpha_kappa_form(kp)) < 1e-12);
    CHECK(std::abs(kpz_upper(kp / 8.0, c.gamma) - (kp / 8.0 - 1.0)) < 1e-12);
    CHECK(c.dim_infima + c.dim_ancestor_free == 1.0);
    CHECK(c.Q > 2.0);
    CHECK(c.diam_alpha > 0.0);
  }
  CHECK(diam_alpha_kappa_form(8.0 - 1e-9) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("kpz polynomial endpoints", "[exponents]") {
  for (const double g : {1.5, 1.7, 1.9}) {
    CHECK(kpz_upper(0.0, g) == -2.0);
    CHECK(kpz_upper(1.0, g) == Catch::Approx(0.0).margin(1e-15));
  }
}

TEST_CASE("log-log fits of synthetic curves", "[exponents]") {
  std::vector<double> x, y, flat;
  for (int k = 0; k < 12; ++k) {
    const double eps = std::ldexp(1.0, -k);
    x.push_back(1.0 / eps);
    y.push_back(std::pow(eps, -0.75));
    flat.push_back(5.0);
  }
  const RegressionFit exact = fit_loglog(x, y);
  CHECK(exact.slope == Catch::Approx(0.75).margin(1e-12));
  CHECK(exact.r_squared == Catch::Approx(1.0).margin(1e-12));
  CHECK(exact.stderr_slope >= 0.0);
  CHECK(exact.stderr_slope < 1e-10);
  CHECK(exact.sample_size == 12);

  const RegressionFit zero = fit_loglog(x, flat);
  CHECK(zero.slope == Catch::Approx(0.0).margin(1e-12));
  CHECK(zero.r_squared == 1.0);

  CounterRng rng(3);
  std::vector<double> noisy;
  for (std::size_t i = 0; i < y.size(); ++i) noisy.push_back(y[i] * std::exp(0.1 * (2.0 * rng.uniform() - 1.0)));
  const RegressionFit nf = fit_loglog(x, noisy);
  CHECK(std::abs(nf.slope - 0.75) < 0.02);
  CHECK(nf.r_squared >= 0.0);
  CHECK(nf.r_squared <= 1.0);

  CHECK_THROWS_AS(fit_loglog(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), FitError);
  CHECK_THROWS_AS(fit_loglog(std::vector<double>{1, 2}, std::vector<double>{1, 2}), FitError);
  CHECK_THROWS_AS(fit_loglog(std::vector<double>{1, 2, 0}, std::vector<double>{1, 2, 3}), FitError);

  CoveringCurve curve;
  for (int k = 0; k < 8; ++k) {
    const double eps = std::ldexp(1.0, -k);
    curve.points.push_back({eps, static_cast<std::size_t>(std::llround(std::pow(2.0, k)))});
  }
  CHECK(fit_loglog(curve).slope == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("dimension of simple sets", "[exponents]") {
  const Index n = 1 << 16;
  IndexSet full;
  for (Index s = 0; s <= n; ++s) full.items.push_back(s);
  const double dt = 1.0 / n;
  const Window w{0, n};
  const auto eps = dyadic_epsilons(w, dt, -12, -2);
  const ScaleCutoff cut = default_scale_cutoff(1.0, dt);
  CHECK(cut.min_epsilon == 8.0 * dt);
  CHECK(cut.max_epsilon == 1.0 / 8.0);
  // N_eps = 1/eps + 1 on a grid of points bends the curve slightly
  CHECK(estimate_dimension(full, dt, eps, cut).slope == Catch::Approx(1.0).margin(0.02));
  CHECK(estimate_dimension(IndexSet{{n / 2}}, dt, eps, cut).slope == Catch::Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(estimate_dimension(full, dt, eps, ScaleCutoff{0.1, 0.2}), FitError);
}

TEST_CASE("mean covering fit with bootstrap", "[exponents]") {
  std::vector<CoveringCurve> curves;
  CounterRng rng(12);
  for (int t = 0; t < 16; ++t) {
    CoveringCurve c;
    for (int k = 1; k <= 10; ++k) {
      const double eps = std::ldexp(1.0, -k);
      const double mean = std::pow(eps, -0.5);
      c.points.push_back({eps, static_cast<std::size_t>(std::llround(mean * (0.8 + 0.4 * rng.uniform())))});
    }
    curves.push_back(c);
  }
  const RegressionFit f = fit_mean_covering(curves, ScaleCutoff{1e-9, 1.0}, 32, 5);
  CHECK(f.slope == Catch::Approx(0.5).margin(0.03));
  CHECK(f.bootstrap_stderr > 0.0);
  CHECK(f.bootstrap_stderr < 0.05);
  const RegressionFit g = fit_mean_covering(curves, ScaleCutoff{1e-9, 1.0}, 32, 5);
  CHECK(g.bootstrap_stderr == f.bootstrap_stderr);
}

TEST_CASE("tail slope of a pareto sample", "[exponents]") {
  CounterRng rng(8);
  TailSample s;
  const int n = 1000000;
  s.values.reserve(n);
  for (int i = 0; i < n; ++i) s.values.push_back(std::pow(rng.uniform_pos(), -1.0 / 1.5));
  std::sort(s.values.begin(), s.values.end());
  const RegressionFit f = tail_slope(s);
  CHECK(f.slope == Catch::Approx(-1.5).margin(0.03));

  TailSample few;
  for (int i = 1; i <= 50; ++i) few.values.push_back(i);
  CHECK_THROWS_AS(tail_slope(few), FitError);
  TailSample narrow;
  for (int i = 0; i < 1000; ++i) narrow.values.push_back(1.0 + i * 1e-3);
  CHECK_THROWS_AS(tail_slope(narrow), FitError);
}

TEST_CASE("product-limit survival", "[exponents]") {
  TailSample s{{1.0, 2.0, 3.0}, {2.0}};
  CHECK(survival_at(s, 1.0) == 1.0);
  CHECK(survival_at(s, 2.0) == Catch::Approx(0.75));
  CHECK(survival_at(s, 2.5) == Catch::Approx(0.5));
  CHECK(survival_at(s, 3.0) == Catch::Approx(0.5));
  CHECK(survival_at(s, 4.0) == 0.0);
  TailSample plain{{1.0, 2.0, 2.0, 5.0}, {}};
  CHECK(survival_at(plain, 2.0) == Catch::Approx(0.75));
  CHECK(survival_at(plain, 3.0) == Catch::Approx(0.25));
}

TEST_CASE("tail slope of a censored pareto sample", "[exponents]") {
  // X ~ Pareto(0.3), observed up to an independent horizon C = 10^U, U ~ U(2, 6)
  CounterRng rng(12);
  TailSample s, dropped;
  for (int i = 0; i < 400000; ++i) {
    const double x = std::pow(rng.uniform_pos(), -1.0 / 0.3);
    const double c = std::pow(10.0, 2.0 + 4.0 * rng.uniform());
    if (x <= c) {
      s.values.push_back(x);
      dropped.values.push_back(x);
    } else {
      s.censored.push_back(c);
    }
  }
  std::sort(s.values.begin(), s.values.end());
  std::sort(s.censored.begin(), s.censored.end());
  std::sort(dropped.values.begin(), dropped.values.end());
  const TailCutoff cut{1.0, 1000, 11};
  CHECK(tail_slope(s, cut).slope == Catch::Approx(-0.3).margin(0.02));
  // ignoring the censored lengths steepens the tail
  CHECK(tail_slope(dropped, cut).slope < -0.4);

  const IndexSet set{{0, 1, 5, 6, 10}};
  const TailSample g = gap_tail_sample(set, 1.0, 13);
  CHECK(g.censored == std::vector<double>{3.0});
  CHECK(gap_tail_sample(set, 1.0, 10).censored.empty());
  TailSample pooled = g;
  append_tail_sample(pooled, gap_tail_sample(set, 2.0, 11));
  CHECK(std::is_sorted(pooled.values.begin(), pooled.values.end()));
  CHECK(pooled.censored == std::vector<double>{2.0, 3.0});
}

TEST_CASE("probability scaling", "[exponents]") {
  const std::vector<double> eps{1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2};
  const EventSampler always = [](std::uint64_t, std::uint64_t, std::span<const double> e,
                                 std::span<std::uint8_t> hits) {
    for (std::size_t i = 0; i < e.size(); ++i) hits[i] = 1;
  };
  const ProbabilityScaling one = mc_probability_scaling(always, eps, 1000, 1);
  CHECK(one.fit.slope == Catch::Approx(0.0).margin(1e-12));
  CHECK(one.warnings.empty());

  const EventSampler power = [](std::uint64_t seed, std::uint64_t trial, std::span<const double> e,
                                std::span<std::uint8_t> hits) {
    CounterRng rng(seed, trial);
    const double u = rng.uniform();
    for (std::size_t i = 0; i < e.size(); ++i) hits[i] = u < std::pow(e[i], 0.25);
  };
  const ProbabilityScaling ps = mc_probability_scaling(power, eps, 100000, 2);
  CHECK(ps.fit.slope == Catch::Approx(0.25).margin(0.02));
  CHECK(ps.fit.bootstrap_stderr > 0.0);
  CHECK(ps.binomial_stderr.size() == eps.size());
  // bitwise deterministic
  const ProbabilityScaling again = mc_probability_scaling(power, eps, 100000, 2);
  CHECK(again.fit.slope == ps.fit.slope);
  CHECK(again.fit.bootstrap_stderr == ps.fit.bootstrap_stderr);

  const std::vector<double> with_zero{1e-30, 1.0 / 64, 1.0 / 16, 1.0 / 4};
  const EventSampler rare = [](std::uint64_t, std::uint64_t, std::span<const double> e,
                               std::span<std::uint8_t> hits) {
    for (std::size_t i = 0; i < e.size(); ++i) hits[i] = e[i] > 1e-20;
  };
  const ProbabilityScaling dropped = mc_probability_scaling(rare, with_zero, 1000, 3);
  CHECK(dropped.warnings.size() == 1);
  CHECK(dropped.epsilons.size() == 3);
  CHECK_THROWS_AS(mc_probability_scaling(always, eps, 999, 1), DomainError);
}
