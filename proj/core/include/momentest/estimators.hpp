#pragma once

// Point estimators for the Dirichlet and Multivariate Gamma families.
//
// Sample moments divide by N. An estimate that falls outside the parameter
// space is reported with exists = false and a reason; only invalid samples
// (wrong family, N < 2) throw.

#include <cstddef>
#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "momentest/model.hpp"

namespace momentest {

enum class Method { me, same, mle, dir_me, dir_same, same_unbiased };

std::string_view to_string(Method method) noexcept;
/// Throws ConfigError for an unknown tag.
Method parse_method(std::string_view name);
bool method_supports(Family family, Method method) noexcept;

enum class FailureReason {
  none,
  zero_variance,
  nonpositive_estimate,
  nonpositive_denominator,
  no_convergence,
  diverged,
};
std::string_view to_string(FailureReason reason) noexcept;

struct SolverConfig {
  double tolerance = 1e-10;  // on max_i |score_i|
  int max_iterations = 100;
  double step_floor = 0x1.0p-30;  // smallest step-halving factor

  /// Throws ConfigError unless tolerance > 0, max_iterations >= 1 and
  /// 0 < step_floor <= 1.
  void validate() const;
};

struct SolverDiagnostics {
  int iterations = 0;
  double score_norm = 0.0;
};

struct EstimateReport {
  Method method;
  Family family;
  /// (alpha) for Dirichlet, (alpha, beta) for Multivariate Gamma. Present
  /// iff exists.
  std::optional<Eigen::VectorXd> estimate;
  bool exists = false;
  FailureReason reason = FailureReason::none;
  std::optional<SolverDiagnostics> diagnostics;  // MLE only
  Eigen::Index n = 0;
};

EstimateReport dirichlet_me(const SampleMatrix& sample);
EstimateReport dirichlet_same(const SampleMatrix& sample);
EstimateReport dirichlet_mle(const SampleMatrix& sample, const SolverConfig& config = {});

EstimateReport mgamma_me(const SampleMatrix& sample);
/// With unbiased, beta is reported as n/(n-1) times the plain estimate and
/// each alpha as (n-1)/n times it.
EstimateReport mgamma_same(const SampleMatrix& sample, bool unbiased = false);
EstimateReport mgamma_mle(const SampleMatrix& sample, const SolverConfig& config = {});
/// base is Method::me or Method::same (dir_me / dir_same are accepted too).
EstimateReport mgamma_dirichlet_based(const SampleMatrix& sample, Method base);

/// Dispatches on the sample family. Throws ConfigError if the method does not
/// apply to the family.
EstimateReport estimate(const SampleMatrix& sample, Method method, const SolverConfig& config = {});

// Likelihood equations on sufficient statistics.

struct MleSolution {
  Eigen::VectorXd alpha;
  bool converged = false;
  FailureReason reason = FailureReason::none;
  SolverDiagnostics diagnostics;
};

/// Solves Psi(alpha_i, alpha0) = mean_log_i by damped Newton from init.
MleSolution solve_dirichlet_mle(const Eigen::VectorXd& mean_log, const Eigen::VectorXd& init,
                                const SolverConfig& config = {});
/// Solves psi(alpha_i) - log alpha0 + log mean_xk = mean_log_z_i from init;
/// the scale is then mean_xk / alpha0.
MleSolution solve_mgamma_mle(const Eigen::VectorXd& mean_log_z, double mean_xk,
                             const Eigen::VectorXd& init, const SolverConfig& config = {});

// Moment maps g: averaged moment vector -> parameter. Used by the avar
// Jacobian checks. No existence checks; the result may leave the parameter
// space.

/// y = (mean x, mean x^2).
Eigen::VectorXd dirichlet_me_map(const Eigen::VectorXd& y);
/// y = (mean x, mean log x, mean x log x).
Eigen::VectorXd dirichlet_same_map(const Eigen::VectorXd& y);
/// y = (mean log x), solved to a tight tolerance from init. Throws
/// NumericError if the solver fails.
Eigen::VectorXd dirichlet_mle_map(const Eigen::VectorXd& y, const Eigen::VectorXd& init);
/// y = (mean z, mean z^2) -> (alpha, beta).
Eigen::VectorXd mgamma_me_map(const Eigen::VectorXd& y);
/// y = (mean z, mean log z, mean z log z) -> (alpha, beta).
Eigen::VectorXd mgamma_same_map(const Eigen::VectorXd& y);
/// y = (mean log z, mean x_k) -> (alpha, beta), solved from init_alpha.
Eigen::VectorXd mgamma_mle_map(const Eigen::VectorXd& y, const Eigen::VectorXd& init_alpha);
/// y = (y_D, mean x_k) where y_D feeds the Dirichlet base map on W.
Eigen::VectorXd dirichlet_based_map(const Eigen::VectorXd& y, Method base);

}  // namespace momentest
