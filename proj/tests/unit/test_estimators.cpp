#include <cmath>
#include <vector>

#include "momentest/error.hpp"
#include "momentest/estimators.hpp"
#include "momentest/model.hpp"
#include "momentest/specialfn.hpp"
#include "testing.hpp"

using namespace momentest;
using testing::close_rel;
using testing::uniform;

namespace {

SampleMatrix two_point_dirichlet() {
  Eigen::MatrixXd x(2, 2);
  x << 0.25, 0.75, 0.75, 0.25;
  return SampleMatrix::dirichlet(x);
}

SampleMatrix two_row_mgamma() {
  Eigen::MatrixXd x(2, 2);
  x << 1, 3, 2, 4;
  return SampleMatrix::mgamma(x);
}

std::vector<Method> methods_for(Family f) {
  if (f == Family::dirichlet) return {Method::me, Method::same, Method::mle};
  return {Method::me, Method::same, Method::same_unbiased, Method::mle, Method::dir_me,
          Method::dir_same};
}

}  // namespace

TEST_CASE("hand fixtures") {
  const auto d = two_point_dirichlet();
  auto r = dirichlet_me(d);
  REQUIRE(r.exists);
  CHECK(close_rel((*r.estimate)(0), 1.5, 1e-12));
  CHECK(close_rel((*r.estimate)(1), 1.5, 1e-12));

  r = dirichlet_same(d);
  REQUIRE(r.exists);
  // Centered x log x means are ln(3) / 8 per coordinate, so alpha = 2 / ln 3.
  CHECK(close_rel((*r.estimate)(0), 2 / std::log(3.0), 1e-13));
  CHECK((*r.estimate)(0) == (*r.estimate)(1));

  const auto g = two_row_mgamma();
  r = mgamma_me(g);
  REQUIRE(r.exists);
  CHECK(close_rel((*r.estimate)(0), 18.0, 1e-12));
  CHECK(close_rel((*r.estimate)(1), 24.0, 1e-12));
  CHECK(close_rel((*r.estimate)(2), 1.0 / 12, 1e-12));

  r = mgamma_same(g);
  REQUIRE(r.exists);
  // Z = {(1, 2), (2, 2)}: beta = ln 2 / 8.
  CHECK(close_rel((*r.estimate)(2), std::log(2.0) / 8, 1e-13));
  CHECK(close_rel((*r.estimate)(0), 12 / std::log(2.0), 1e-13));
  CHECK(close_rel((*r.estimate)(1), 16 / std::log(2.0), 1e-13));
  const auto u = mgamma_same(g, true);
  CHECK(close_rel((*u.estimate)(2), 2 * (*r.estimate)(2), 1e-14));
  CHECK(close_rel((*u.estimate)(0), 0.5 * (*r.estimate)(0), 1e-14));
  CHECK(close_rel((*u.estimate)(2), 0.1732868, 1e-6));

  r = mgamma_dirichlet_based(g, Method::me);
  REQUIRE(r.exists);
  CHECK(close_rel((*r.estimate)(0), 85.0 / 6, 1e-12));
  CHECK(close_rel((*r.estimate)(1), 119.0 / 6, 1e-12));
  CHECK(close_rel((*r.estimate)(2), 3.5 / 34, 1e-12));
}

TEST_CASE("constructed fixed points") {
  // Psi(1, 2) = -1.
  const Eigen::VectorXd mean_log = Eigen::VectorXd::Constant(2, -1.0);
  const auto s = solve_dirichlet_mle(mean_log, Eigen::VectorXd::Constant(2, 3.0));
  REQUIRE(s.converged);
  CHECK(std::abs(s.alpha(0) - 1.0) < 1e-10);
  CHECK(std::abs(s.alpha(1) - 1.0) < 1e-10);

  const DirichletParams p({0.3, 2.0, 7.5});
  Eigen::VectorXd target(3);
  for (std::size_t i = 0; i < 3; ++i) {
    target(static_cast<Eigen::Index>(i)) = specialfn::digamma_diff(p.alpha(i), p.alpha0());
  }
  const auto s3 = solve_dirichlet_mle(target, Eigen::VectorXd::Ones(3));
  REQUIRE(s3.converged);
  CHECK((s3.alpha - p.vector()).cwiseAbs().maxCoeff() < 1e-10);

  // k = 1: mean x = 1, mean log z = psi(1) gives alpha = beta = 1.
  const auto g = solve_mgamma_mle(Eigen::VectorXd::Constant(1, specialfn::digamma(1.0)), 1.0,
                                  Eigen::VectorXd::Constant(1, 0.2));
  REQUIRE(g.converged);
  CHECK(std::abs(g.alpha(0) - 1.0) < 1e-10);

  // alpha = (0.5, 3), beta = 2: mean log z_i = psi(alpha_i) + log 2, mean x_k = 7.
  Eigen::VectorXd mlz(2);
  mlz << specialfn::digamma(0.5) + std::log(2.0), specialfn::digamma(3.0) + std::log(2.0);
  const auto g2 = solve_mgamma_mle(mlz, 7.0, Eigen::VectorXd::Ones(2));
  REQUIRE(g2.converged);
  CHECK(std::abs(g2.alpha(0) - 0.5) < 1e-10);
  CHECK(std::abs(g2.alpha(1) - 3.0) < 1e-10);
}

TEST_CASE("mle diagnostics and score residual") {
  const DirichletParams p({2.0, 3.0});
  const auto s = sample_dirichlet(p, 5000, {21, 0});
  const auto r = dirichlet_mle(s);
  REQUIRE(r.exists);
  REQUIRE(r.diagnostics);
  CHECK(r.diagnostics->score_norm <= 1e-10);
  CHECK(r.diagnostics->iterations <= 25);

  const MGammaParams g({1.0, 2.0}, 3.0);
  const auto sg = sample_mgamma(g, 5000, {22, 0});
  const auto rg = mgamma_mle(sg);
  REQUIRE(rg.exists);
  // Both likelihood equations: alpha0 beta = mean x_k, mean log z_i = psi(alpha_i) + log beta.
  const auto& e = *rg.estimate;
  const double alpha0 = e(0) + e(1);
  CHECK(std::abs(alpha0 * e(2) - sg.data().col(1).mean()) < 1e-8 * sg.data().col(1).mean());
  const auto z = delta_transform(sg);
  for (Eigen::Index i = 0; i < 2; ++i) {
    const double mean_log = z.col(i).array().log().mean();
    CHECK(std::abs(specialfn::digamma(e(i)) + std::log(e(2)) - mean_log) < 1e-8);
  }
}

TEST_CASE("solver configuration") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.tolerance = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.max_iterations = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  // One iteration is not enough from a distant start.
  SolverConfig tight;
  tight.max_iterations = 1;
  const auto s = solve_dirichlet_mle(Eigen::VectorXd::Constant(2, -1.0),
                                     Eigen::VectorXd::Constant(2, 50.0), tight);
  CHECK_FALSE(s.converged);
  CHECK(s.reason == FailureReason::no_convergence);
}

TEST_CASE("existence failures are reported, not thrown") {
  Eigen::MatrixXd x(3, 2);
  x << 0.25, 0.75, 0.25, 0.75, 0.25, 0.75;
  const auto d = SampleMatrix::dirichlet(x);
  for (Method m : methods_for(Family::dirichlet)) {
    CAPTURE(to_string(m));
    EstimateReport r;
    REQUIRE_NOTHROW(r = estimate(d, m));
    CHECK_FALSE(r.exists);
    CHECK_FALSE(r.estimate.has_value());
    CHECK(r.reason != FailureReason::none);
  }
  CHECK(dirichlet_me(d).reason == FailureReason::zero_variance);

  Eigen::MatrixXd y(3, 2);
  y << 1, 3, 1, 3, 1, 3;
  const auto g = SampleMatrix::mgamma(y);
  for (Method m : methods_for(Family::mgamma)) {
    CAPTURE(to_string(m));
    EstimateReport r;
    REQUIRE_NOTHROW(r = estimate(g, m));
    CHECK_FALSE(r.exists);
  }

  // k = 1 has no Dirichlet projection to estimate from.
  Eigen::MatrixXd one(3, 1);
  one << 1, 2, 4;
  const auto r1 = estimate(SampleMatrix::mgamma(one), Method::dir_me);
  CHECK_FALSE(r1.exists);
  CHECK(estimate(SampleMatrix::mgamma(one), Method::mle).exists);
}

TEST_CASE("invalid requests throw") {
  Eigen::MatrixXd x(1, 2);
  x << 0.5, 0.5;
  CHECK_THROWS_AS(dirichlet_me(SampleMatrix::dirichlet(x)), SampleError);
  CHECK_THROWS_AS(mgamma_me(two_point_dirichlet()), SampleError);
  CHECK_THROWS_AS(estimate(two_point_dirichlet(), Method::dir_same), ConfigError);
  CHECK_THROWS_AS(parse_method("em"), ConfigError);
  CHECK(parse_method("dir_same") == Method::dir_same);
  CHECK_FALSE(method_supports(Family::dirichlet, Method::same_unbiased));
}

TEST_CASE("scale equivariance") {
  const MGammaParams p({0.4, 1.5, 3.0}, 2.0);
  const auto s = sample_mgamma(p, 400, {31, 0});
  const auto scaled = SampleMatrix::mgamma(s.data() * 2.5);
  for (Method m : methods_for(Family::mgamma)) {
    CAPTURE(to_string(m));
    const auto a = estimate(s, m);
    const auto b = estimate(scaled, m);
    REQUIRE(a.exists);
    REQUIRE(b.exists);
    const double tol = m == Method::mle ? 1e-8 : 1e-12;
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(close_rel((*a.estimate)(i), (*b.estimate)(i), tol));
    CHECK(close_rel(2.5 * (*a.estimate)(3), (*b.estimate)(3), tol));
  }
}

TEST_CASE("permutation equivariance") {
  const DirichletParams p({0.6, 2.0, 4.0, 1.0});
  const auto s = sample_dirichlet(p, 300, {41, 0});
  const std::vector<Eigen::Index> perm{2, 0, 3, 1};
  Eigen::MatrixXd shuffled(s.n(), s.k());
  for (Eigen::Index c = 0; c < s.k(); ++c) shuffled.col(c) = s.data().col(perm[static_cast<std::size_t>(c)]);
  const auto t = SampleMatrix::dirichlet(shuffled);
  for (Method m : methods_for(Family::dirichlet)) {
    CAPTURE(to_string(m));
    const auto a = estimate(s, m);
    const auto b = estimate(t, m);
    REQUIRE(a.exists);
    REQUIRE(b.exists);
    for (Eigen::Index c = 0; c < s.k(); ++c) {
      CHECK(close_rel((*b.estimate)(c), (*a.estimate)(perm[static_cast<std::size_t>(c)]), 1e-9));
    }
  }
}

TEST_CASE("same shares its denominator across coordinates") {
  const auto s = sample_dirichlet(DirichletParams({1.0, 2.0, 3.0}), 200, {5, 5});
  const auto r = dirichlet_same(s);
  REQUIRE(r.exists);
  const auto& e = *r.estimate;
  const Eigen::VectorXd mean = s.data().colwise().mean();
  CHECK(close_rel(e(0) / e(2), mean(0) / mean(2), 1e-13));
}

TEST_CASE("large-sample accuracy") {
  const auto d = sample_dirichlet(DirichletParams({1, 0.2, 1, 2, 5}), 100000, {61, 0});
  const Eigen::VectorXd alpha_d = DirichletParams({1, 0.2, 1, 2, 5}).vector();
  for (Method m : methods_for(Family::dirichlet)) {
    const auto r = estimate(d, m);
    REQUIRE(r.exists);
    CHECK(((*r.estimate - alpha_d).array() / alpha_d.array()).abs().maxCoeff() < 0.05);
  }
  const MGammaParams gp({0.2, 1, 2, 5}, 2.0);
  const auto g = sample_mgamma(gp, 100000, {62, 0});
  for (Method m : methods_for(Family::mgamma)) {
    CAPTURE(to_string(m));
    const auto r = estimate(g, m);
    REQUIRE(r.exists);
    CHECK(((*r.estimate - gp.theta()).array() / gp.theta().array()).abs().maxCoeff() < 0.05);
  }
}

TEST_CASE("consistency: error shrinks with n") {
  // Norm of the relative error at n = 1e3, 1e4, 1e5 should decrease in at
  // least 9 of 10 random parameter draws, for every estimator.
  struct Draw {
    Family family;
    Eigen::VectorXd theta;
  };
  std::vector<Draw> draws;
  for (int t = 0; t < 10; ++t) {
    const int k = 3 + t % 3;
    Eigen::VectorXd a(k);
    for (int i = 0; i < k; ++i) a(i) = uniform(0.3, 5.0);
    draws.push_back({Family::dirichlet, a});
    Eigen::VectorXd th(k + 1);
    th.head(k) = a;
    th(k) = uniform(0.3, 3.0);
    draws.push_back({Family::mgamma, th});
  }
  for (Family f : {Family::dirichlet, Family::mgamma}) {
    for (Method m : methods_for(f)) {
      if (m == Method::same_unbiased) continue;
      CAPTURE(to_string(m));
      int decreasing = 0;
      std::uint64_t seed = 100;
      for (const auto& d : draws) {
        if (d.family != f) continue;
        double prev = INFINITY;
        bool ok = true;
        for (std::size_t n : {1000u, 10000u, 100000u}) {
          const RngSpec rng{++seed, 0};
          const auto s = f == Family::dirichlet
                             ? sample_dirichlet(DirichletParams({d.theta.data(), d.theta.data() + d.theta.size()}), n, rng)
                             : sample_mgamma(MGammaParams::from_theta({d.theta.data(), static_cast<std::size_t>(d.theta.size())}), n, rng);
          const auto r = estimate(s, m);
          REQUIRE(r.exists);
          const double err = ((*r.estimate - d.theta).array() / d.theta.array()).matrix().norm();
          ok = ok && err < prev;
          prev = err;
        }
        decreasing += ok ? 1 : 0;
      }
      CHECK(decreasing >= 9);
    }
  }
}
