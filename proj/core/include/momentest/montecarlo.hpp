#pragma once

// Monte Carlo harness: bias/variance/RMSE sweeps, empirical sampling
// covariances, analytic avar sweeps, and the catalog-versus-simulation check.
//
// Replicate r of a sweep cell draws from RngSpec{cell_seed, r}, where
// cell_seed = derive_seed(master_seed, cell ordinal). Results do not depend on
// the number of worker threads.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "momentest/estimators.hpp"
#include "momentest/model.hpp"
#include "momentest/moments.hpp"

namespace momentest {

struct SweepConfig {
  Family family = Family::dirichlet;
  std::vector<double> alpha;  // fixed shapes; the swept entry is overwritten
  double beta = 1.0;          // Multivariate Gamma only
  /// Index into the parameter vector (alpha..., beta); k selects beta.
  std::size_t sweep_index = 0;
  std::vector<double> grid;
  std::vector<std::size_t> n_values;
  std::size_t replicates = 10000;
  std::vector<Method> estimators;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 picks the hardware concurrency
  SolverConfig solver;

  /// Throws ConfigError. With sampling, n_values must be non-empty, every
  /// n >= 2, and replicates >= 100.
  void validate(bool sampling = true) const;
  /// Parameter vector at one grid value.
  Eigen::VectorXd theta_at(double value) const;
};

struct MetricsRow {
  Family family;
  Method estimator;
  std::size_t param_index;
  double sweep_value;
  std::size_t n;
  std::size_t m_effective;
  std::size_t failures;
  double bias;
  double variance;  // divides by m_effective
  double rmse;
};

/// Rows ordered by grid value, then n, then estimator, then parameter index.
std::vector<MetricsRow> run_metric_sweep(const SweepConfig& config);

/// Covariance (divide by m_effective - 1) of sqrt(n)(theta_hat - theta) over
/// the replicates where the estimate exists. Throws InsufficientDataError if
/// fewer than 10 survive.
Eigen::MatrixXd empirical_sampling_covariance(Family family, const Eigen::VectorXd& theta,
                                              Method method, std::size_t n, std::size_t m,
                                              std::uint64_t seed, unsigned threads = 0,
                                              const SolverConfig& solver = {});

struct AvarRow {
  Family family;
  Method estimator;
  std::size_t param_index;
  double sweep_value;
  double avar;
};

/// Diagonal of the analytic avar at each grid value; no sampling.
std::vector<AvarRow> run_avar_sweep(const SweepConfig& config);

struct CatalogCheckRow {
  MomentId id;
  std::string name;
  double closed_form;               // raw moment, or derived covariance
  std::optional<double> printed;    // printed covariance form, where one exists
  double mc_estimate;
  double mc_se;
  double z;                         // (mc_estimate - closed_form) / mc_se
};

/// Compares every id with a simulation of `draws` observations. Covariances
/// are estimated as mean((U - mean U)(V - mean V)) with the standard error of
/// that product.
std::vector<CatalogCheckRow> catalog_mc_check(const DirichletParams& params,
                                              const std::vector<MomentId>& ids,
                                              std::size_t draws, std::uint64_t seed);
std::vector<CatalogCheckRow> catalog_mc_check(const MGammaParams& params,
                                              const std::vector<MomentId>& ids,
                                              std::size_t draws, std::uint64_t seed);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Exceptions are
/// rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn);

}  // namespace momentest

#include "momentest/detail/parallel.hpp"
