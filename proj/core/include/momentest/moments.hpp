#pragma once

// Closed-form moment catalogs for the Dirichlet and Multivariate Gamma
// families.
//
// Raw moments E(U) are the source of truth. Covariances are derived as
// E(UV) - E(U)E(V) from raw entries; the printed closed-form covariances are
// kept alongside as an independent check. For the Dirichlet covariances the
// symbol beta_i is read as alpha0 - alpha_i.
//
// Indices are zero-based throughout the API; to_string renders them 1-based.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "momentest/model.hpp"

namespace momentest {

enum class MomentKind {
  // Dirichlet raw moments.
  dir_power,        // E(X_i^m)
  dir_cross_power,  // E(X_i^mi X_j^mj)
  dir_log,          // E(log X_i)
  dir_x_log,        // E(X_i log X_i)
  dir_x_log_other,  // E(X_i log X_j)
  dir_xx_log,       // E(X_i X_j log X_j)
  dir_log_log,      // E(log X_i log X_j)
  dir_x_log_log,    // E(X_i log X_i log X_j)
  dir_xx_log_log,   // E(X_i X_j log X_i log X_j)
  dir_x2_log,       // E(X_i^2 log X_i)
  dir_x_log2,       // E(X_i log^2 X_i)
  dir_x2_log2,      // E(X_i^2 log^2 X_i)
  dir_log2,         // E(log^2 X_i), needed for V(log X_i) by derivation
  // Dirichlet covariances.
  dir_var_power,           // V(X_i^m)
  dir_var_log,             // V(log X_i)
  dir_cov_x_x,             // C(X_i, X_j)
  dir_cov_x_x2,            // C(X_i, X_i^2)
  dir_cov_x_x2_other,      // C(X_i, X_j^2)
  dir_cov_x2_x2,           // C(X_i^2, X_j^2)
  dir_cov_x_log,           // C(X_i, log X_i)
  dir_cov_x_log_other,     // C(X_i, log X_j)
  dir_cov_log_log,         // C(log X_i, log X_j)
  dir_cov_x_xlog,          // C(X_i, X_i log X_i)
  dir_cov_x_xlog_other,    // C(X_i, X_j log X_j)
  dir_cov_log_xlog,        // C(log X_i, X_i log X_i)
  dir_cov_log_xlog_other,  // C(log X_i, X_j log X_j)
  // Multivariate Gamma raw moments, Z = delta X.
  mg_z_power,       // E(Z_i^m), m >= 1
  mg_z_power_log,   // E(Z_i^m log Z_i), m >= 0
  mg_z_power_log2,  // E(Z_i^m log^2 Z_i), m >= 0
  mg_xk_mean,       // E(X_k)
  mg_xk_square,     // E(X_k^2)
  // Multivariate Gamma covariances.
  mg_var_z,             // V(Z_i)
  mg_var_z2,            // V(Z_i^2)
  mg_var_log_z,         // V(log Z_i)
  mg_var_zlog_z,        // V(Z_i log Z_i)
  mg_cov_z_z2,          // C(Z_i, Z_i^2)
  mg_cov_z_log_z,       // C(Z_i, log Z_i)
  mg_cov_z_zlog_z,      // C(Z_i, Z_i log Z_i)
  mg_cov_log_z_zlog_z,  // C(log Z_i, Z_i log Z_i)
  mg_var_xk,            // V(X_k)
};

/// Identifies one catalog entry. Which of i, j, m, mi, mj are meaningful
/// depends on the kind; the rest are ignored.
struct MomentId {
  MomentKind kind;
  std::size_t i = 0;
  std::size_t j = 0;
  unsigned m = 1;
  unsigned mi = 1;
  unsigned mj = 1;

  Family family() const noexcept;
  bool is_covariance() const noexcept;
  /// Throws CatalogError if indices or powers are invalid for dimension k.
  void validate(std::size_t k) const;

  friend bool operator==(const MomentId&, const MomentId&) = default;
};

/// Human-readable, 1-based name such as "E[X1*logX2]" or "C[Z1,Z1*logZ1]".
std::string to_string(const MomentId& id);

/// How the printed closed form of a covariance relates to the derivation.
enum class PrintedForm {
  exact,           // transcribed as printed
  interpreted,     // uses beta_i, read as alpha0 - alpha_i
  suspected_typo,  // printed form disagrees with the raw-moment derivation
};
PrintedForm printed_form_status(MomentKind kind) noexcept;

/// A product of powers of coordinates and their logarithms,
/// prod_f x_f^p (log x_f)^q, optionally times X_k^r (MGamma only). For MGamma
/// the coordinates are the increments Z.
struct Monomial {
  struct Factor {
    std::size_t index;
    unsigned power;
    unsigned log_power;
  };
  std::vector<Factor> factors;
  unsigned xk_power = 0;

  /// Value at one observation. For Dirichlet pass x and log x; for MGamma
  /// pass z, log z, and x_k.
  double evaluate(std::span<const double> x, std::span<const double> log_x,
                  double xk = 0.0) const;
};

/// The random quantity whose expectation a raw id names.
Monomial monomial_of(const MomentId& raw_id);
Monomial operator*(const Monomial& a, const Monomial& b);
/// The two raw ids (U, V) whose covariance a covariance id names.
std::pair<MomentId, MomentId> covariance_operands(const MomentId& cov_id);

struct DirichletBasicMoments {
  double mean;          // E(X_i)
  double variance;      // V(X_i)
  double mean_log;      // E(log X_i)
  double cov_x_log;     // C(X_i, log X_i)
};
DirichletBasicMoments dirichlet_basic_moments(const DirichletParams& params, std::size_t i);

struct MGammaBasicMoments {
  double mean_xk;       // E(X_k)
  double var_xk;        // V(X_k)
  double mean_z;        // E(Z_i)
  double var_z;         // V(Z_i)
  double mean_log_z;    // E(log Z_i)
  double cov_z_log_z;   // C(Z_i, log Z_i)
};
MGammaBasicMoments mgamma_basic_moments(const MGammaParams& params, std::size_t i);

double dirichlet_raw_moment(const DirichletParams& params, const MomentId& id);
/// Covariance entry by the raw-moment derivation.
double dirichlet_covariance(const DirichletParams& params, const MomentId& id);
/// Covariance entry by the printed closed form.
double dirichlet_covariance_printed(const DirichletParams& params, const MomentId& id);

double mgamma_raw_moment(const MGammaParams& params, const MomentId& id);
double mgamma_covariance(const MGammaParams& params, const MomentId& id);
double mgamma_covariance_printed(const MGammaParams& params, const MomentId& id);

/// E(M) for a monomial whose expectation is in the catalog. MGamma products
/// over distinct increments factor by independence, and X_k expands as a sum
/// of increments. Throws CatalogError when no entry covers the product.
double expectation(const DirichletParams& params, const Monomial& m);
double expectation(const MGammaParams& params, const Monomial& m);

/// Cov(U, V) = E(UV) - E(U)E(V) for raw ids u and v.
double covariance_from_raw(const DirichletParams& params, const MomentId& u, const MomentId& v);
double covariance_from_raw(const MGammaParams& params, const MomentId& u, const MomentId& v);

/// Every catalog entry for dimension k (all index pairs, powers m <= 4 for
/// raw powers, m <= 2 for variances of powers).
std::vector<MomentId> dirichlet_catalog(std::size_t k);
std::vector<MomentId> mgamma_catalog(std::size_t k);
/// Every formula family instantiated at one coordinate i and, where a second
/// index is needed, one partner j != i.
std::vector<MomentId> dirichlet_catalog_at(std::size_t k, std::size_t i, std::size_t j);
std::vector<MomentId> mgamma_catalog_at(std::size_t k, std::size_t i);

/// Rising factorial a (a+1) ... (a+m-1).
double rising_factorial(double a, unsigned m);

}  // namespace momentest
