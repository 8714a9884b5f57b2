#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "momentest/rng.hpp"

namespace momentest {

enum class Family { dirichlet, mgamma };

std::string_view to_string(Family family) noexcept;
/// Parses "dirichlet" or "mgamma"; throws ConfigError otherwise.
Family parse_family(std::string_view name);

/// Tolerance on |sum(x) - 1| for a point to count as lying on the simplex.
inline constexpr double kSimplexTolerance = 1e-9;
/// Largest |sum(x) - 1| that opt-in renormalization will repair.
inline constexpr double kRenormalizeTolerance = 1e-6;

/// Shape parameters of a k-dimensional Dirichlet distribution, k >= 2.
class DirichletParams {
 public:
  explicit DirichletParams(std::vector<double> alpha);

  std::size_t k() const noexcept { return alpha_.size(); }
  std::span<const double> alpha() const noexcept { return alpha_; }
  double alpha(std::size_t i) const { return alpha_.at(i); }
  /// Left-to-right sum of the shapes.
  double alpha0() const noexcept { return alpha0_; }
  Eigen::VectorXd vector() const;

 private:
  std::vector<double> alpha_;
  double alpha0_;
};

/// Shapes and common scale of the k-variate Multivariate Gamma, k >= 1.
/// X_i is the partial sum of independent Gamma(alpha_j, beta) increments.
class MGammaParams {
 public:
  MGammaParams(std::vector<double> alpha, double beta);
  /// Builds from the stacked vector (alpha_1, ..., alpha_k, beta).
  static MGammaParams from_theta(std::span<const double> theta);

  std::size_t k() const noexcept { return alpha_.size(); }
  std::span<const double> alpha() const noexcept { return alpha_; }
  double alpha(std::size_t i) const { return alpha_.at(i); }
  double beta() const noexcept { return beta_; }
  double alpha0() const noexcept { return alpha0_; }
  /// (alpha_1, ..., alpha_k, beta).
  Eigen::VectorXd theta() const;

 private:
  std::vector<double> alpha_;
  double beta_;
  double alpha0_;
};

/// N x k observation matrix, one observation per row, validated against the
/// support of its family on construction.
class SampleMatrix {
 public:
  /// Rows must lie in the open simplex: entries in (0, 1), |sum - 1| <= 1e-9.
  /// With renormalize, rows within 1e-6 of the simplex are rescaled first.
  static SampleMatrix dirichlet(Eigen::MatrixXd data, bool renormalize = false);
  /// Rows must satisfy 0 < x_1 < ... < x_k.
  static SampleMatrix mgamma(Eigen::MatrixXd data);

  Family family() const noexcept { return family_; }
  const Eigen::MatrixXd& data() const noexcept { return data_; }
  Eigen::Index n() const noexcept { return data_.rows(); }
  Eigen::Index k() const noexcept { return data_.cols(); }

 private:
  SampleMatrix(Family family, Eigen::MatrixXd data)
      : family_(family), data_(std::move(data)) {}

  Family family_;
  Eigen::MatrixXd data_;
};

/// Throws SupportError unless x lies in the open simplex.
void validate_dirichlet_point(std::span<const double> x, double tolerance = kSimplexTolerance);
/// Throws SupportError unless 0 < x_1 < ... < x_k.
void validate_mgamma_point(std::span<const double> x);

/// Draws one Dirichlet row by normalizing Gamma variates in log space.
/// Coordinates that round to 1 are clamped to the largest double below 1.
void draw_dirichlet_row(std::span<const double> alpha, RandomStream& stream,
                        std::span<double> x, std::span<double> log_x);

SampleMatrix sample_dirichlet(const DirichletParams& params, std::size_t n, RngSpec rng);

/// Cumulative sums of Gamma(alpha_i, beta) increments. An increment that is
/// lost to rounding leaves a one-ulp step so every row stays increasing.
SampleMatrix sample_mgamma(const MGammaParams& params, std::size_t n, RngSpec rng);

double log_density_dirichlet(const DirichletParams& params, std::span<const double> x);
double log_density_mgamma(const MGammaParams& params, std::span<const double> x);

/// First differences Z_i = X_i - X_{i-1} with X_0 = 0.
Eigen::MatrixXd delta_transform(const SampleMatrix& sample);

/// W = Z / X_k, a Dirichlet(alpha) sample when X ~ MGamma(alpha, beta).
SampleMatrix dirichlet_projection(const SampleMatrix& sample);

/// Canonical sufficient statistic: log x for Dirichlet, (log z, x_k) for
/// MGamma.
Eigen::VectorXd sufficient_stats(Family family, std::span<const double> x);

/// sum log Gamma(alpha_i) - log Gamma(alpha0).
double log_partition(const DirichletParams& params);
/// sum log Gamma(alpha_i) + alpha0 log beta.
double log_partition(const MGammaParams& params);

}  // namespace momentest
