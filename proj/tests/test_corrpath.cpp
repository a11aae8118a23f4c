#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "fixtures.h"
#include "peanolab/corrpath.h"
#include "peanolab/errors.h"

using namespace peanolab;

TEST_CASE("build_cov_spec closed forms", "[corrpath]") {
  const CovSpec six = build_cov_spec(6.0);
  CHECK(six.gamma == Catch::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-14));
  CHECK(six.rho == Catch::Approx(0.5).epsilon(1e-14));
  CHECK(six.alpha_scale == 1.0);

  const CovSpec eight = build_cov_spec(8.0);
  CHECK(eight.gamma == Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(eight.rho == 0.0);

  const CovSpec five = build_cov_spec(5.0);
  CHECK(five.gamma == Catch::Approx(4.0 / std::sqrt(5.0)).epsilon(1e-14));
  CHECK(five.rho == Catch::Approx(0.809017).margin(1e-6));
  // independent route through gamma
  CHECK(five.rho == Catch::Approx(-std::cos(std::numbers::pi * five.gamma * five.gamma / 4)).margin(1e-14));

  CHECK_THROWS_AS(build_cov_spec(4.0), DomainError);
  CHECK_THROWS_AS(build_cov_spec(8.5), DomainError);
  CHECK_THROWS_AS(build_cov_spec(6.0, 0.0), DomainError);
}

TEST_CASE("cov spec invariants over a grid", "[corrpath][property]") {
  for (int i = 1; i <= 400; ++i) {
    const double kp = 4.0 + 4.0 * i / 400.0;
    const CovSpec s = build_cov_spec(kp);
    CHECK(s.gamma * s.gamma * kp == Catch::Approx(16.0).epsilon(1e-13));
    CHECK(s.rho >= 0.0);
    CHECK(s.rho < 1.0);
    if (kp < 8.0) CHECK(s.rho > 0.0);
    // [[1,rho],[rho,1]] is PSD iff |rho| <= 1
    CHECK(1.0 - s.rho * s.rho >= 0.0);
    const LatticeStepLaw law = lattice_step_law(s.rho);
    CHECK(2 * law.same + 2 * law.opposite == Catch::Approx(1.0).epsilon(1e-15));
    // E[dL dR] = 2 same - 2 opposite
    CHECK(2 * law.same - 2 * law.opposite == Catch::Approx(s.rho).margin(1e-15));
  }
}

TEST_CASE("lattice step law examples", "[corrpath]") {
  const LatticeStepLaw zero = lattice_step_law(0.0);
  CHECK(zero.same == 0.25);
  CHECK(zero.opposite == 0.25);
  const LatticeStepLaw half = lattice_step_law(0.5);
  CHECK(half.same == Catch::Approx(0.375));
  CHECK(half.opposite == Catch::Approx(0.125));
}

TEST_CASE("brownian increments have the requested covariance", "[corrpath]") {
  const CovSpec spec = build_cov_spec(6.0);
  const PathPair p = sample_brownian_pair(spec, 1000000, 1e-6, 11);
  REQUIRE(p.L.size() == 1000001);
  CHECK(p.L[0] == 0.0);
  CHECK(p.R[0] == 0.0);
  const EmpiricalCov c = empirical_cov(p);
  CHECK(c.cov == Catch::Approx(0.5).margin(0.01));
  CHECK(c.var_L == Catch::Approx(1.0).margin(0.01));
  CHECK(c.var_R == Catch::Approx(1.0).margin(0.01));
  CHECK(c.correlation() == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("single increment marginal variance", "[corrpath]") {
  const CovSpec spec = build_cov_spec(6.0, 2.0);
  const int trials = 40000;
  const double dt = 0.25;
  double sl = 0, sr = 0;
  for (int t = 0; t < trials; ++t) {
    const PathPair p = sample_brownian_pair(spec, 1, dt, 5, static_cast<std::uint64_t>(t));
    sl += p.L[1] * p.L[1];
    sr += p.R[1] * p.R[1];
  }
  // alpha * dt = 0.5; standard error of the mean square is ~0.5*sqrt(2/n)
  CHECK(sl / trials == Catch::Approx(0.5).margin(0.012));
  CHECK(sr / trials == Catch::Approx(0.5).margin(0.012));
}

TEST_CASE("sampling is deterministic and independent of worker count", "[corrpath][property]") {
  const CovSpec spec = build_cov_spec(6.0);
  const Index n = 3 * kBrownianChunk + 17;
  const PathPair a = sample_brownian_pair(spec, n, 0.01, 99, 2);
  const PathPair b = sample_brownian_pair(spec, n, 0.01, 99, 2);
  CHECK(a == b);
  ::setenv("PEANOLAB_THREADS", "1", 1);
  const PathPair c = sample_brownian_pair(spec, n, 0.01, 99, 2);
  ::setenv("PEANOLAB_THREADS", "3", 1);
  const PathPair d = sample_brownian_pair(spec, n, 0.01, 99, 2);
  ::unsetenv("PEANOLAB_THREADS");
  CHECK(a == c);
  CHECK(a == d);
  CHECK_FALSE(a == sample_brownian_pair(spec, n, 0.01, 100, 2));
  CHECK(sample_lattice_pair(spec, n, 4) == sample_lattice_pair(spec, n, 4));
}

TEST_CASE("brownian scaling leaves the empirical spec invariant", "[corrpath][property]") {
  const CovSpec spec = build_cov_spec(7.0);
  const double c = 3.0;
  const PathPair p = sample_brownian_pair(spec, 200000, 1e-3, 21);
  PathPair q = sample_brownian_pair(spec, 200000, 1e-3 * c * c, 21);
  for (auto& x : q.L) x /= c;
  for (auto& x : q.R) x /= c;
  q.dt /= c * c;
  const EmpiricalCov ep = empirical_cov(p);
  const EmpiricalCov eq = empirical_cov(q);
  // same seed: the rescaled path is the original up to rounding
  CHECK(eq.cov == Catch::Approx(ep.cov).epsilon(1e-9));
  CHECK(eq.var_L == Catch::Approx(ep.var_L).epsilon(1e-9));
  // and both agree with the law at 3 sigma (sd of the correlation ~ (1-rho^2)/sqrt(n))
  const double sd = (1 - spec.rho * spec.rho) / std::sqrt(200000.0);
  CHECK(std::abs(eq.correlation() - spec.rho) < 3 * sd + 1e-12);
}

TEST_CASE("lattice paths", "[corrpath]") {
  const PathPair p = sample_lattice_pair(build_cov_spec(6.0), 10000000, 3);
  REQUIRE(p.kind == PathKind::lattice);
  for (std::size_t i = 1; i < p.L.size(); i += 997) {
    CHECK(std::abs(p.L[i] - p.L[i - 1]) == 1.0);
    CHECK(std::abs(p.R[i] - p.R[i - 1]) == 1.0);
  }
  CHECK(empirical_cov(p).correlation() == Catch::Approx(0.5).margin(0.002));

  const PathPair q = sample_lattice_pair(build_cov_spec(8.0), 1000000, 3);
  CHECK(empirical_cov(q).cov == Catch::Approx(0.0).margin(0.005));
}

TEST_CASE("empirical covariance edge cases", "[corrpath]") {
  using testing::make_path;
  const PathPair flat = make_path({0, 0, 0, 0}, {0, 0, 0, 0}, PathKind::brownian);
  const EmpiricalCov c = empirical_cov(flat);
  CHECK(c.var_L == 0.0);
  CHECK(c.var_R == 0.0);
  CHECK(c.cov == 0.0);
  CHECK_THROWS_AS(empirical_cov(make_path({0, 1}, {0, 1})), DomainError);
}

TEST_CASE("sampling preconditions", "[corrpath]") {
  const CovSpec spec = build_cov_spec(6.0);
  CHECK_THROWS_AS(sample_brownian_pair(spec, 0, 1.0, 1), DomainError);
  CHECK_THROWS_AS(sample_brownian_pair(spec, 10, -1.0, 1), DomainError);
  CHECK_THROWS_AS(sample_brownian_pair(spec, 10, 1e300, 1), SizeError);
  CHECK_THROWS_AS(sample_lattice_pair(spec, 0, 1), DomainError);
}

TEST_CASE("coarsening to the lattice", "[corrpath]") {
  using testing::make_path;
  const PathPair p = make_path({0, 0.3, 0.1, 0.1}, {0, -0.2, -0.5, 0.4}, PathKind::brownian);
  const PathPair q = coarsen_to_lattice(p);
  CHECK(q.kind == PathKind::lattice);
  CHECK(q.L == std::vector<double>{0, 1, 0, 1});
  CHECK(q.R == std::vector<double>{0, -1, -2, -1});
}

TEST_CASE("path files round trip", "[corrpath][io]") {
  const PathPair p = sample_brownian_pair(build_cov_spec(5.5, 1.7), 5000, 0.003, 8);
  std::stringstream buf;
  save_path(p, buf);
  const PathPair q = load_path(buf);
  CHECK(p == q);

  const PathPair lat = sample_lattice_pair(build_cov_spec(6.0), 70000, 8);
  std::stringstream buf2;
  save_path(lat, buf2);
  CHECK(load_path(buf2) == lat);
}

TEST_CASE("malformed path files", "[corrpath][io]") {
  const PathPair p = sample_lattice_pair(build_cov_spec(6.0), 100, 1);
  std::stringstream buf;
  save_path(p, buf);
  const std::string good = buf.str();

  SECTION("truncated") {
    std::stringstream in(good.substr(0, good.size() - 5));
    CHECK_THROWS_AS(load_path(in), FormatError);
    std::stringstream head(good.substr(0, 10));
    CHECK_THROWS_AS(load_path(head), FormatError);
  }
  SECTION("wrong magic") {
    std::string bad = good;
    bad[0] = 'X';
    std::stringstream in(bad);
    CHECK_THROWS_AS(load_path(in), FormatError);
  }
  SECTION("wrong version") {
    std::string bad = good;
    bad[4] = 2;
    std::stringstream in(bad);
    CHECK_THROWS_AS(load_path(in), FormatError);
  }
  SECTION("trailing bytes") {
    std::stringstream in(good + "x");
    CHECK_THROWS_AS(load_path(in), FormatError);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(load_path(std::filesystem::path("/nonexistent/p.pnlb")), FormatError);
  }
}
