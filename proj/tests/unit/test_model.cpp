#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "momentest/error.hpp"
#include "momentest/model.hpp"
#include "momentest/rng.hpp"
#include "momentest/specialfn.hpp"
#include "testing.hpp"

using namespace momentest;
using testing::close_rel;

TEST_CASE("philox known answers") {
  using B = Philox4x32::Block;
  CHECK(Philox4x32::encrypt(B{0, 0, 0, 0}, {0, 0}) ==
        B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::encrypt(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                            {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::encrypt(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                            {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  Philox4x32 a({42, 0}), b({42, 0}), c({42, 1}), d({43, 0});
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    const auto va = a();
    CHECK(va == b());
    seen.insert(va);
    seen.insert(c());
    seen.insert(d());
  }
  CHECK(seen.size() == 300);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("uniform variates") {
  RandomStream s({5, 0});
  double sum = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform_open();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
}

TEST_CASE("gamma variates agree with the standard library") {
  // Mean, variance, and empirical CDF at the reference quartiles.
  std::mt19937_64 ref_engine(99);
  for (double shape : {0.05, 0.3, 1.0, 2.5, 40.0}) {
    CAPTURE(shape);
    RandomStream s({11, static_cast<std::uint64_t>(shape * 100)});
    std::gamma_distribution<double> ref(shape, 1.0);
    constexpr int n = 100000;
    std::vector<double> ours(n), theirs(n);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      ours[i] = s.gamma(shape);
      theirs[i] = ref(ref_engine);
      REQUIRE(ours[i] >= 0.0);
      sum += ours[i];
      sumsq += ours[i] * ours[i];
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean - shape) < 5 * std::sqrt(shape / n));
    CHECK(std::abs(var - shape) < 5 * std::sqrt((6 * shape + 2 * shape * shape) / n));
    std::sort(theirs.begin(), theirs.end());
    for (double q : {0.25, 0.5, 0.75}) {
      const double cut = theirs[static_cast<std::size_t>(q * n)];
      const double frac =
          static_cast<double>(std::count_if(ours.begin(), ours.end(), [&](double v) { return v <= cut; })) / n;
      // Two independent samples: the difference has variance about 2q(1-q)/n.
      CHECK(std::abs(frac - q) < 5 * std::sqrt(2 * q * (1 - q) / n));
    }
  }
}

TEST_CASE("log gamma variates stay finite for tiny shapes") {
  RandomStream s({3, 0});
  double sum = 0.0;
  constexpr int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = s.log_gamma(0.01);
    REQUIRE(std::isfinite(v));
    sum += v;
  }
  // E log G = psi(shape), V log G = psi1(shape).
  CHECK(std::abs(sum / n - specialfn::digamma(0.01)) <
        5 * std::sqrt(specialfn::trigamma(0.01) / n));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(DirichletParams({1.0}), ParameterError);
  CHECK_THROWS_AS(DirichletParams({1.0, 0.0}), ParameterError);
  CHECK_THROWS_AS(DirichletParams({1.0, std::nan("")}), ParameterError);
  CHECK_THROWS_AS(MGammaParams({}, 1.0), ParameterError);
  CHECK_THROWS_AS(MGammaParams({1.0}, -1.0), ParameterError);
  CHECK_THROWS_AS(MGammaParams::from_theta(std::vector<double>{1.0}), ParameterError);
  CHECK_THROWS_AS(parse_family("beta"), ConfigError);
  CHECK(parse_family("mgamma") == Family::mgamma);

  const DirichletParams d({0.5, 1.5, 2.0});
  CHECK(d.k() == 3);
  CHECK(d.alpha0() == 4.0);
  const auto g = MGammaParams::from_theta(std::vector<double>{1.0, 2.0, 3.0});
  CHECK(g.k() == 2);
  CHECK(g.beta() == 3.0);
  CHECK(g.alpha0() == 3.0);
  CHECK(g.theta()(2) == 3.0);
}

TEST_CASE("sample validation") {
  Eigen::MatrixXd good(2, 3);
  good << 0.2, 0.3, 0.5, 0.1, 0.1, 0.8;
  CHECK_NOTHROW(SampleMatrix::dirichlet(good));

  Eigen::MatrixXd off = good;
  off(1, 2) = 0.8 + 5e-7;
  CHECK_THROWS_AS(SampleMatrix::dirichlet(off), SupportError);
  const auto fixed = SampleMatrix::dirichlet(off, true);
  CHECK(std::abs(fixed.data().row(1).sum() - 1.0) < 1e-15);
  off(1, 2) = 0.81;
  CHECK_THROWS_AS(SampleMatrix::dirichlet(off, true), SupportError);

  Eigen::MatrixXd zero = good;
  zero(0, 0) = 0.0;
  zero(0, 2) = 0.7;
  CHECK_THROWS_AS(SampleMatrix::dirichlet(zero), SupportError);

  Eigen::MatrixXd mg(2, 2);
  mg << 1.0, 2.0, 0.5, 0.7;
  CHECK_NOTHROW(SampleMatrix::mgamma(mg));
  mg(1, 1) = 0.5;
  CHECK_THROWS_AS(SampleMatrix::mgamma(mg), SupportError);
  CHECK_THROWS_AS(SampleMatrix::mgamma(Eigen::MatrixXd(0, 2)), SampleError);
}

TEST_CASE("samplers are deterministic and stay in the support") {
  const DirichletParams d({0.05, 0.2, 1.0, 5.0});
  const auto a = sample_dirichlet(d, 500, {9, 2});
  const auto b = sample_dirichlet(d, 500, {9, 2});
  CHECK(a.data() == b.data());
  CHECK(a.data() != sample_dirichlet(d, 500, {9, 3}).data());
  for (Eigen::Index r = 0; r < a.n(); ++r) {
    const Eigen::RowVectorXd row = a.data().row(r);
    CHECK_NOTHROW(validate_dirichlet_point({row.data(), static_cast<std::size_t>(row.size())}));
  }

  const MGammaParams g({0.01, 1.0, 3.0}, 0.5);
  const auto s = sample_mgamma(g, 2000, {4, 0});
  for (Eigen::Index r = 0; r < s.n(); ++r) {
    for (Eigen::Index c = 1; c < s.k(); ++c) REQUIRE(s.data()(r, c) > s.data()(r, c - 1));
    REQUIRE(s.data()(r, 0) > 0.0);
  }
}

TEST_CASE("sample means match the distribution means") {
  const DirichletParams d({0.5, 2.0, 3.5});
  const auto s = sample_dirichlet(d, 100000, {1, 0});
  for (std::size_t i = 0; i < d.k(); ++i) {
    const double m = d.alpha(i) / d.alpha0();
    const double v = m * (1 - m) / (d.alpha0() + 1);
    CHECK(std::abs(s.data().col(static_cast<Eigen::Index>(i)).mean() - m) <
          5 * std::sqrt(v / 100000));
  }

  const MGammaParams g({0.7, 2.0}, 3.0);
  const auto z = delta_transform(sample_mgamma(g, 100000, {2, 0}));
  for (std::size_t i = 0; i < g.k(); ++i) {
    const double m = g.alpha(i) * g.beta();
    const double v = g.alpha(i) * g.beta() * g.beta();
    CHECK(std::abs(z.col(static_cast<Eigen::Index>(i)).mean() - m) < 5 * std::sqrt(v / 100000));
  }
}

TEST_CASE("log densities") {
  const DirichletParams flat({1.0, 1.0, 1.0});
  CHECK(close_rel(log_density_dirichlet(flat, std::vector<double>{0.2, 0.3, 0.5}),
                  std::log(2.0), 1e-15));
  const DirichletParams d({2.0, 3.0});
  // Beta(2, 3) density 12 x (1 - x)^2.
  CHECK(close_rel(log_density_dirichlet(d, std::vector<double>{0.4, 0.6}),
                  std::log(12 * 0.4 * 0.36), 1e-14));
  CHECK_THROWS_AS(log_density_dirichlet(d, std::vector<double>{0.4, 0.4}), SupportError);

  const MGammaParams g({2.0}, 0.5);
  // Gamma(2, scale 0.5) density x e^{-2x} / 0.25.
  CHECK(close_rel(log_density_mgamma(g, std::vector<double>{1.3}),
                  std::log(1.3 * std::exp(-2.6) / 0.25), 1e-14));
  const MGammaParams g2({1.0, 1.0}, 1.0);
  CHECK(close_rel(log_density_mgamma(g2, std::vector<double>{0.5, 2.0}), -2.0, 1e-15));
}

TEST_CASE("transforms and sufficient statistics") {
  Eigen::MatrixXd x(2, 3);
  x << 1.0, 3.0, 4.0, 0.5, 0.75, 2.0;
  const auto s = SampleMatrix::mgamma(x);
  const auto z = delta_transform(s);
  CHECK(z(0, 1) == 2.0);
  CHECK(z(1, 2) == 1.25);
  const auto w = dirichlet_projection(s);
  CHECK(w.family() == Family::dirichlet);
  CHECK(w.data()(0, 0) == 0.25);
  CHECK(w.data()(1, 1) == 0.125);

  const auto t = sufficient_stats(Family::mgamma, std::vector<double>{1.0, 3.0, 4.0});
  REQUIRE(t.size() == 4);
  CHECK(t(1) == std::log(2.0));
  CHECK(t(3) == 4.0);
  const auto td = sufficient_stats(Family::dirichlet, std::vector<double>{0.25, 0.75});
  CHECK(td(0) == std::log(0.25));
  CHECK_THROWS_AS(sufficient_stats(Family::dirichlet, std::vector<double>{0.25, 0.5}),
                  SupportError);
}

TEST_CASE("log partition") {
  const DirichletParams d({2.0, 3.0});
  CHECK(close_rel(log_partition(d), std::log(1.0 / 12.0), 1e-14));
  const MGammaParams g({2.0, 1.0}, 2.0);
  CHECK(close_rel(log_partition(g), 3 * std::log(2.0), 1e-14));
}
