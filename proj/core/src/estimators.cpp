#include "momentest/estimators.hpp"

#include <cmath>
#include <string>

#include "momentest/error.hpp"
#include "momentest/specialfn.hpp"

namespace momentest {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Column means and centered second-order statistics, all divided by N.
// Centering keeps a constant column at exactly zero variance.
struct ColumnStats {
  VectorXd mean;
  VectorXd var;
  VectorXd mean_log;
  VectorXd cov_x_log;
};

ColumnStats column_stats(const MatrixXd& x, const MatrixXd& log_x) {
  const double n = static_cast<double>(x.rows());
  ColumnStats s;
  s.mean = x.colwise().sum().transpose() / n;
  s.mean_log = log_x.colwise().sum().transpose() / n;
  s.var.resize(x.cols());
  s.cov_x_log.resize(x.cols());
  for (Index c = 0; c < x.cols(); ++c) {
    const auto dx = x.col(c).array() - s.mean(c);
    const auto dl = log_x.col(c).array() - s.mean_log(c);
    s.var(c) = (dx * dx).sum() / n;
    s.cov_x_log(c) = (dx * dl).sum() / n;
  }
  return s;
}

bool all_positive_finite(const VectorXd& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0) || !std::isfinite(v(i))) return false;
  }
  return true;
}

EstimateReport make_report(Method method, Family family, Index n) {
  EstimateReport r{method, family, std::nullopt, false, FailureReason::none, std::nullopt, n};
  return r;
}

EstimateReport accept(EstimateReport r, VectorXd theta) {
  if (!all_positive_finite(theta)) {
    r.reason = FailureReason::nonpositive_estimate;
    return r;
  }
  r.estimate = std::move(theta);
  r.exists = true;
  return r;
}

EstimateReport fail(EstimateReport r, FailureReason reason) {
  r.reason = reason;
  return r;
}

void require(const SampleMatrix& sample, Family family) {
  if (sample.family() != family) {
    throw SampleError("estimator expects a " + std::string(to_string(family)) + " sample");
  }
  if (sample.n() < 2) throw SampleError("estimators need at least 2 observations");
}

// Dirichlet estimators on raw coordinates; shared with the W-sample of the
// Dirichlet-based estimators.

EstimateReport dirichlet_me_stats(const ColumnStats& s, EstimateReport r) {
  const Index k = s.mean.size();
  VectorXd alpha(k);
  for (Index i = 0; i < k; ++i) {
    if (!(s.var(i) > 0.0)) return fail(r, FailureReason::zero_variance);
    const double m = s.mean(i);
    alpha(i) = m * (m * (1.0 - m) - s.var(i)) / s.var(i);
  }
  return accept(r, std::move(alpha));
}

EstimateReport dirichlet_same_stats(const ColumnStats& s, EstimateReport r) {
  const double denominator = s.cov_x_log.sum();
  if (!(denominator > 0.0)) return fail(r, FailureReason::nonpositive_denominator);
  const double scale = static_cast<double>(s.mean.size() - 1) / denominator;
  return accept(r, s.mean * scale);
}

// Solves (diag(d) - c 11^T) x = b.
bool solve_diag_rank_one(const VectorXd& d, double c, const VectorXd& b, VectorXd& x) {
  const VectorXd w = d.cwiseInverse();
  const VectorXd q = b.cwiseProduct(w);
  const double denominator = 1.0 - c * w.sum();
  if (!(denominator > 0.0)) return false;
  x = q + w * (c * q.sum() / denominator);
  return x.allFinite();
}

// Damped Newton for f(alpha) = 0 with Jacobian diag(d) - c 11^T.
// eval fills f and d and returns c.
template <class Eval>
MleSolution newton(VectorXd alpha, Eval eval, const SolverConfig& config) {
  config.validate();
  MleSolution out;
  const Index k = alpha.size();
  VectorXd f(k), d(k), step(k);
  double c = eval(alpha, f, d);
  double norm = f.cwiseAbs().maxCoeff();
  int it = 0;
  for (;; ++it) {
    if (!std::isfinite(norm)) {
      out.reason = FailureReason::diverged;
      break;
    }
    if (norm <= config.tolerance) {
      out.converged = true;
      // One polishing step: the score is tiny, so the undamped step is
      // quadratically accurate. Keep it only if the score does not grow.
      if (norm > 0.0 && solve_diag_rank_one(d, c, -f, step)) {
        VectorXd trial = alpha + step;
        VectorXd tf(k), td(k);
        if (all_positive_finite(trial)) {
          const double tc = eval(trial, tf, td);
          const double tn = tf.cwiseAbs().maxCoeff();
          if (tn <= norm) {
            alpha = std::move(trial);
            norm = tn;
            c = tc;
            ++it;
          }
        }
      }
      break;
    }
    if (it == config.max_iterations) {
      out.reason = FailureReason::no_convergence;
      break;
    }
    if (!solve_diag_rank_one(d, c, -f, step)) {
      out.reason = FailureReason::diverged;
      break;
    }
    double t = 1.0;
    VectorXd trial = alpha + step;
    while (!all_positive_finite(trial)) {
      t *= 0.5;
      if (t < config.step_floor) break;
      trial = alpha + t * step;
    }
    if (t < config.step_floor) {
      out.reason = FailureReason::diverged;
      break;
    }
    alpha = std::move(trial);
    c = eval(alpha, f, d);
    norm = f.cwiseAbs().maxCoeff();
  }
  out.alpha = std::move(alpha);
  out.diagnostics = {it, norm};
  return out;
}

EstimateReport from_solution(EstimateReport r, const MleSolution& sol, VectorXd theta) {
  r.diagnostics = sol.diagnostics;
  if (!sol.converged) return fail(r, sol.reason);
  return accept(r, std::move(theta));
}

struct IncrementData {
  MatrixXd z;
  MatrixXd log_z;
  VectorXd xk;
};

IncrementData increments(const SampleMatrix& sample) {
  IncrementData out;
  out.z = delta_transform(sample);
  out.log_z = out.z.array().log().matrix();
  out.xk = sample.data().col(sample.k() - 1);
  return out;
}

EstimateReport mgamma_me_stats(const ColumnStats& s, EstimateReport r) {
  const double k = static_cast<double>(s.mean.size());
  const double beta = (s.var.array() / s.mean.array()).sum() / k;
  if (!(beta > 0.0)) return fail(r, beta == 0.0 ? FailureReason::zero_variance
                                                 : FailureReason::nonpositive_estimate);
  VectorXd theta(s.mean.size() + 1);
  theta.head(s.mean.size()) = s.mean / beta;
  theta(s.mean.size()) = beta;
  return accept(r, std::move(theta));
}

EstimateReport mgamma_same_stats(const ColumnStats& s, bool unbiased, double n,
                                 EstimateReport r) {
  const double k = static_cast<double>(s.mean.size());
  const double beta = s.cov_x_log.sum() / k;
  if (!(beta > 0.0)) return fail(r, FailureReason::nonpositive_estimate);
  VectorXd theta(s.mean.size() + 1);
  theta.head(s.mean.size()) = s.mean / beta;
  theta(s.mean.size()) = beta;
  if (unbiased) {
    theta.head(s.mean.size()) *= (n - 1.0) / n;
    theta(s.mean.size()) *= n / (n - 1.0);
  }
  return accept(r, std::move(theta));
}

Method dirichlet_base(Method base) {
  switch (base) {
    case Method::me:
    case Method::dir_me:
      return Method::me;
    case Method::same:
    case Method::dir_same:
      return Method::same;
    default:
      throw ConfigError("Dirichlet-based estimators take base me or same");
  }
}

}  // namespace

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::me: return "me";
    case Method::same: return "same";
    case Method::mle: return "mle";
    case Method::dir_me: return "dir_me";
    case Method::dir_same: return "dir_same";
    case Method::same_unbiased: return "same_unbiased";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::me, Method::same, Method::mle, Method::dir_me, Method::dir_same,
                   Method::same_unbiased}) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

bool method_supports(Family family, Method method) noexcept {
  if (family == Family::mgamma) return true;
  return method == Method::me || method == Method::same || method == Method::mle;
}

std::string_view to_string(FailureReason reason) noexcept {
  switch (reason) {
    case FailureReason::none: return "none";
    case FailureReason::zero_variance: return "zero_variance";
    case FailureReason::nonpositive_estimate: return "nonpositive_estimate";
    case FailureReason::nonpositive_denominator: return "nonpositive_denominator";
    case FailureReason::no_convergence: return "no_convergence";
    case FailureReason::diverged: return "diverged";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("solver needs at least one iteration");
  if (!(step_floor > 0.0 && step_floor <= 1.0)) throw ConfigError("step floor must lie in (0, 1]");
}

EstimateReport dirichlet_me(const SampleMatrix& sample) {
  require(sample, Family::dirichlet);
  const MatrixXd log_x = sample.data().array().log().matrix();
  return dirichlet_me_stats(column_stats(sample.data(), log_x),
                            make_report(Method::me, Family::dirichlet, sample.n()));
}

EstimateReport dirichlet_same(const SampleMatrix& sample) {
  require(sample, Family::dirichlet);
  const MatrixXd log_x = sample.data().array().log().matrix();
  return dirichlet_same_stats(column_stats(sample.data(), log_x),
                              make_report(Method::same, Family::dirichlet, sample.n()));
}

EstimateReport dirichlet_mle(const SampleMatrix& sample, const SolverConfig& config) {
  require(sample, Family::dirichlet);
  config.validate();
  const MatrixXd log_x = sample.data().array().log().matrix();
  const ColumnStats s = column_stats(sample.data(), log_x);
  // A constant column pins its coordinate exactly; the likelihood then only
  // grows as alpha0 goes to infinity.
  if (!(s.var.minCoeff() > 0.0)) {
    return fail(make_report(Method::mle, Family::dirichlet, sample.n()), FailureReason::zero_variance);
  }
  VectorXd init = VectorXd::Ones(sample.k());
  if (auto same = dirichlet_same_stats(s, make_report(Method::same, Family::dirichlet, 0));
      same.exists) {
    init = *same.estimate;
  } else if (auto me = dirichlet_me_stats(s, make_report(Method::me, Family::dirichlet, 0));
             me.exists) {
    init = *me.estimate;
  }
  const MleSolution sol = solve_dirichlet_mle(s.mean_log, init, config);
  return from_solution(make_report(Method::mle, Family::dirichlet, sample.n()), sol, sol.alpha);
}

EstimateReport mgamma_me(const SampleMatrix& sample) {
  require(sample, Family::mgamma);
  const IncrementData inc = increments(sample);
  return mgamma_me_stats(column_stats(inc.z, inc.log_z),
                         make_report(Method::me, Family::mgamma, sample.n()));
}

EstimateReport mgamma_same(const SampleMatrix& sample, bool unbiased) {
  require(sample, Family::mgamma);
  const IncrementData inc = increments(sample);
  return mgamma_same_stats(
      column_stats(inc.z, inc.log_z), unbiased, static_cast<double>(sample.n()),
      make_report(unbiased ? Method::same_unbiased : Method::same, Family::mgamma, sample.n()));
}

EstimateReport mgamma_mle(const SampleMatrix& sample, const SolverConfig& config) {
  require(sample, Family::mgamma);
  config.validate();
  const IncrementData inc = increments(sample);
  const ColumnStats s = column_stats(inc.z, inc.log_z);
  // Same for a constant increment: its shape has no finite maximizer.
  if (!(s.var.minCoeff() > 0.0)) {
    return fail(make_report(Method::mle, Family::mgamma, sample.n()), FailureReason::zero_variance);
  }
  const Index k = sample.k();
  VectorXd init = VectorXd::Ones(k);
  if (auto same = mgamma_same_stats(s, false, 0.0, make_report(Method::same, Family::mgamma, 0));
      same.exists) {
    init = same.estimate->head(k);
  } else if (auto me = mgamma_me_stats(s, make_report(Method::me, Family::mgamma, 0)); me.exists) {
    init = me.estimate->head(k);
  }
  const double mean_xk = inc.xk.mean();
  const MleSolution sol = solve_mgamma_mle(s.mean_log, mean_xk, init, config);
  VectorXd theta(k + 1);
  theta.head(k) = sol.alpha;
  theta(k) = mean_xk / sol.alpha.sum();
  return from_solution(make_report(Method::mle, Family::mgamma, sample.n()), sol,
                       std::move(theta));
}

EstimateReport mgamma_dirichlet_based(const SampleMatrix& sample, Method base) {
  const Method inner = dirichlet_base(base);
  require(sample, Family::mgamma);
  const IncrementData inc = increments(sample);
  // W = Z / X_k row by row; log W from the logs, so no W entry is re-validated.
  const MatrixXd w = inc.z.array().colwise() / inc.xk.array();
  const MatrixXd log_w = inc.log_z.array().colwise() - inc.xk.array().log();
  const ColumnStats s = column_stats(w, log_w);
  const Method tag = inner == Method::me ? Method::dir_me : Method::dir_same;
  EstimateReport r = make_report(tag, Family::mgamma, sample.n());
  EstimateReport d = inner == Method::me ? dirichlet_me_stats(s, r) : dirichlet_same_stats(s, r);
  if (!d.exists) return d;
  const Index k = sample.k();
  VectorXd theta(k + 1);
  theta.head(k) = *d.estimate;
  theta(k) = inc.xk.mean() / d.estimate->sum();
  return accept(r, std::move(theta));
}

EstimateReport estimate(const SampleMatrix& sample, Method method, const SolverConfig& config) {
  if (!method_supports(sample.family(), method)) {
    throw ConfigError("estimator " + std::string(to_string(method)) + " does not apply to " +
                      std::string(to_string(sample.family())) + " samples");
  }
  if (sample.family() == Family::dirichlet) {
    switch (method) {
      case Method::me: return dirichlet_me(sample);
      case Method::same: return dirichlet_same(sample);
      default: return dirichlet_mle(sample, config);
    }
  }
  switch (method) {
    case Method::me: return mgamma_me(sample);
    case Method::same: return mgamma_same(sample, false);
    case Method::same_unbiased: return mgamma_same(sample, true);
    case Method::mle: return mgamma_mle(sample, config);
    default: return mgamma_dirichlet_based(sample, method);
  }
}

MleSolution solve_dirichlet_mle(const VectorXd& mean_log, const VectorXd& init,
                                const SolverConfig& config) {
  if (mean_log.size() < 2 || init.size() != mean_log.size()) {
    throw ConfigError("Dirichlet likelihood equations need k >= 2 matching statistics");
  }
  if (!all_positive_finite(init)) throw ConfigError("solver start must be positive");
  auto eval = [&mean_log](const VectorXd& a, VectorXd& f, VectorXd& d) {
    const double a0 = a.sum();
    for (Index i = 0; i < a.size(); ++i) {
      f(i) = specialfn::digamma_diff(a(i), a0) - mean_log(i);
      d(i) = specialfn::trigamma(a(i));
    }
    return specialfn::trigamma(a0);
  };
  return newton(init, eval, config);
}

MleSolution solve_mgamma_mle(const VectorXd& mean_log_z, double mean_xk, const VectorXd& init,
                             const SolverConfig& config) {
  if (mean_log_z.size() < 1 || init.size() != mean_log_z.size()) {
    throw ConfigError("Multivariate Gamma likelihood equations need matching statistics");
  }
  if (!(mean_xk > 0.0)) throw ConfigError("mean of the last coordinate must be positive");
  if (!all_positive_finite(init)) throw ConfigError("solver start must be positive");
  const double log_mean_xk = std::log(mean_xk);
  auto eval = [&](const VectorXd& a, VectorXd& f, VectorXd& d) {
    const double a0 = a.sum();
    const double log_a0 = std::log(a0);
    for (Index i = 0; i < a.size(); ++i) {
      f(i) = specialfn::digamma(a(i)) - log_a0 + log_mean_xk - mean_log_z(i);
      d(i) = specialfn::trigamma(a(i));
    }
    return 1.0 / a0;
  };
  return newton(init, eval, config);
}

VectorXd dirichlet_me_map(const VectorXd& y) {
  const Index k = y.size() / 2;
  VectorXd alpha(k);
  for (Index i = 0; i < k; ++i) {
    const double m1 = y(i);
    const double m2 = y(k + i);
    alpha(i) = m1 * (m1 - m2) / (m2 - m1 * m1);
  }
  return alpha;
}

VectorXd dirichlet_same_map(const VectorXd& y) {
  const Index k = y.size() / 3;
  double c = 0.0;
  for (Index j = 0; j < k; ++j) c += y(2 * k + j) - y(j) * y(k + j);
  return y.head(k) * (static_cast<double>(k - 1) / c);
}

namespace {

SolverConfig tight_config() {
  SolverConfig c;
  c.tolerance = 1e-14;
  c.max_iterations = 200;
  return c;
}

}  // namespace

VectorXd dirichlet_mle_map(const VectorXd& y, const VectorXd& init) {
  const MleSolution sol = solve_dirichlet_mle(y, init, tight_config());
  if (!sol.converged) throw NumericError("Dirichlet likelihood equations did not converge");
  return sol.alpha;
}

VectorXd mgamma_me_map(const VectorXd& y) {
  const Index k = y.size() / 2;
  double c = 0.0;
  for (Index j = 0; j < k; ++j) c += y(k + j) / y(j) - y(j);
  const double beta = c / static_cast<double>(k);
  VectorXd theta(k + 1);
  theta.head(k) = y.head(k) / beta;
  theta(k) = beta;
  return theta;
}

VectorXd mgamma_same_map(const VectorXd& y) {
  const Index k = y.size() / 3;
  double c = 0.0;
  for (Index j = 0; j < k; ++j) c += y(2 * k + j) - y(j) * y(k + j);
  const double beta = c / static_cast<double>(k);
  VectorXd theta(k + 1);
  theta.head(k) = y.head(k) / beta;
  theta(k) = beta;
  return theta;
}

VectorXd mgamma_mle_map(const VectorXd& y, const VectorXd& init_alpha) {
  const Index k = y.size() - 1;
  const MleSolution sol = solve_mgamma_mle(y.head(k), y(k), init_alpha, tight_config());
  if (!sol.converged) throw NumericError("Multivariate Gamma likelihood equations did not converge");
  VectorXd theta(k + 1);
  theta.head(k) = sol.alpha;
  theta(k) = y(k) / sol.alpha.sum();
  return theta;
}

VectorXd dirichlet_based_map(const VectorXd& y, Method base) {
  const VectorXd yd = y.head(y.size() - 1);
  const VectorXd alpha =
      dirichlet_base(base) == Method::me ? dirichlet_me_map(yd) : dirichlet_same_map(yd);
  VectorXd theta(alpha.size() + 1);
  theta.head(alpha.size()) = alpha;
  theta(alpha.size()) = y(y.size() - 1) / alpha.sum();
  return theta;
}

}  // namespace momentest
