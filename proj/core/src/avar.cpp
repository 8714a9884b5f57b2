#include "momentest/avar.hpp"

#include <cmath>
#include <string>
#include <type_traits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "momentest/error.hpp"
#include "momentest/moments.hpp"
#include "momentest/specialfn.hpp"

namespace momentest {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kConditionWarning = 1e12;

MomentId raw(MomentKind kind, Index i = 0, unsigned m = 1) {
  return MomentId{kind, static_cast<std::size_t>(i), 0, m};
}

// Index of the coordinate a Multivariate Gamma raw id refers to, or -1 for
// moments of X_k.
Index coordinate_of(const MomentId& id) {
  if (id.kind == MomentKind::mg_xk_mean || id.kind == MomentKind::mg_xk_square) return -1;
  return static_cast<Index>(id.i);
}

MatrixXd covariance_matrix(const DirichletParams& params, const std::vector<MomentId>& h) {
  const auto p = static_cast<Index>(h.size());
  MatrixXd v(p, p);
  for (Index a = 0; a < p; ++a) {
    for (Index b = a; b < p; ++b) {
      v(a, b) = covariance_from_raw(params, h[a], h[b]);
      v(b, a) = v(a, b);
    }
  }
  return v;
}

// Moments of distinct increments are independent, so those blocks are set to
// exactly zero instead of being assembled.
MatrixXd covariance_matrix(const MGammaParams& params, const std::vector<MomentId>& h) {
  const auto p = static_cast<Index>(h.size());
  MatrixXd v = MatrixXd::Zero(p, p);
  for (Index a = 0; a < p; ++a) {
    for (Index b = a; b < p; ++b) {
      const Index ca = coordinate_of(h[a]);
      const Index cb = coordinate_of(h[b]);
      if (ca >= 0 && cb >= 0 && ca != cb) continue;
      v(a, b) = covariance_from_raw(params, h[a], h[b]);
      v(b, a) = v(a, b);
    }
  }
  return v;
}

std::vector<MomentId> dirichlet_me_h(Index k) {
  std::vector<MomentId> h;
  for (Index i = 0; i < k; ++i) h.push_back(raw(MomentKind::dir_power, i, 1));
  for (Index i = 0; i < k; ++i) h.push_back(raw(MomentKind::dir_power, i, 2));
  return h;
}

std::vector<MomentId> dirichlet_same_h(Index k) {
  std::vector<MomentId> h;
  for (Index i = 0; i < k; ++i) h.push_back(raw(MomentKind::dir_power, i, 1));
  for (Index i = 0; i < k; ++i) h.push_back(raw(MomentKind::dir_log, i));
  for (Index i = 0; i < k; ++i) h.push_back(raw(MomentKind::dir_x_log, i));
  return h;
}

std::vector<MomentId> mgamma_me_h(Index k) {
  std::vector<MomentId> h;
  for (Index i = 0; i < k; ++i) h.push_back(raw(MomentKind::mg_z_power, i, 1));
  for (Index i = 0; i < k; ++i) h.push_back(raw(MomentKind::mg_z_power, i, 2));
  return h;
}

std::vector<MomentId> mgamma_same_h(Index k) {
  std::vector<MomentId> h;
  for (Index i = 0; i < k; ++i) h.push_back(raw(MomentKind::mg_z_power, i, 1));
  for (Index i = 0; i < k; ++i) h.push_back(raw(MomentKind::mg_z_power_log, i, 0));
  for (Index i = 0; i < k; ++i) h.push_back(raw(MomentKind::mg_z_power_log, i, 1));
  return h;
}

std::vector<MomentId> mgamma_mle_h(Index k) {
  std::vector<MomentId> h;
  for (Index i = 0; i < k; ++i) h.push_back(raw(MomentKind::mg_z_power_log, i, 0));
  h.push_back(raw(MomentKind::mg_xk_mean));
  return h;
}

template <class Params>
VectorXd mean_vector(const Params& params, const std::vector<MomentId>& h) {
  VectorXd mu(static_cast<Index>(h.size()));
  for (Index a = 0; a < mu.size(); ++a) {
    if constexpr (std::is_same_v<Params, DirichletParams>) {
      mu(a) = dirichlet_raw_moment(params, h[a]);
    } else {
      mu(a) = mgamma_raw_moment(params, h[a]);
    }
  }
  return mu;
}

AvarMatrix finish(MatrixXd m, Method method, Family family, VectorXd theta,
                  std::string provenance, std::vector<std::string> warnings = {}) {
  check_avar_contract(m);
  m = 0.5 * (m + m.transpose()).eval();
  return AvarMatrix{std::move(m), method, family, std::move(theta), std::move(provenance),
                    std::move(warnings)};
}

AvarMatrix sandwich(GVParts parts, Method method, Family family, VectorXd theta,
                    std::string provenance) {
  MatrixXd m = parts.G * parts.V * parts.G.transpose();
  return finish(std::move(m), method, family, std::move(theta), std::move(provenance),
                std::move(parts.warnings));
}

// General inverse with a conditioning check, for matrices without the
// structure the closed forms rely on.
MatrixXd checked_inverse(const MatrixXd& a, std::vector<std::string>& warnings) {
  Eigen::JacobiSVD<MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond <= kConditionWarning)) {
    warnings.push_back("condition number " + std::to_string(cond) + " exceeds 1e12");
  }
  Eigen::FullPivLU<MatrixXd> lu(a);
  if (!lu.isInvertible()) throw NumericError("singular matrix in asymptotic variance");
  return lu.inverse();
}

Method dirichlet_base(Method base) {
  if (base == Method::me || base == Method::dir_me) return Method::me;
  if (base == Method::same || base == Method::dir_same) return Method::same;
  throw ConfigError("Dirichlet-based estimators take base me or same");
}

DirichletParams shapes_of(const MGammaParams& params) {
  return DirichletParams(std::vector<double>(params.alpha().begin(), params.alpha().end()));
}

}  // namespace

void check_avar_contract(const MatrixXd& m) {
  if (m.rows() != m.cols() || !m.allFinite()) {
    throw NumericError("asymptotic variance is not a finite square matrix");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw NumericError("asymptotic variance is not symmetric");
  }
  const MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-8 * sym.trace()) {
    throw NumericError("asymptotic variance is not positive semidefinite");
  }
}

// Moment vectors.

VectorXd dirichlet_me_mu(const DirichletParams& params) {
  return mean_vector(params, dirichlet_me_h(static_cast<Index>(params.k())));
}

VectorXd dirichlet_same_mu(const DirichletParams& params) {
  return mean_vector(params, dirichlet_same_h(static_cast<Index>(params.k())));
}

VectorXd dirichlet_mle_mu(const DirichletParams& params) {
  std::vector<MomentId> h;
  for (Index i = 0; i < static_cast<Index>(params.k()); ++i) h.push_back(raw(MomentKind::dir_log, i));
  return mean_vector(params, h);
}

VectorXd mgamma_me_mu(const MGammaParams& params) {
  return mean_vector(params, mgamma_me_h(static_cast<Index>(params.k())));
}

VectorXd mgamma_same_mu(const MGammaParams& params) {
  return mean_vector(params, mgamma_same_h(static_cast<Index>(params.k())));
}

VectorXd mgamma_mle_mu(const MGammaParams& params) {
  return mean_vector(params, mgamma_mle_h(static_cast<Index>(params.k())));
}

VectorXd dirichlet_based_mu(const MGammaParams& params, Method base) {
  const DirichletParams d = shapes_of(params);
  const VectorXd yd = dirichlet_base(base) == Method::me ? dirichlet_me_mu(d) : dirichlet_same_mu(d);
  VectorXd y(yd.size() + 1);
  y.head(yd.size()) = yd;
  y(yd.size()) = mgamma_raw_moment(params, raw(MomentKind::mg_xk_mean));
  return y;
}

// Parts.

GVParts dirichlet_me_parts(const DirichletParams& params) {
  const auto k = static_cast<Index>(params.k());
  const double a0 = params.alpha0();
  MatrixXd g = MatrixXd::Zero(k, 2 * k);
  for (Index i = 0; i < k; ++i) {
    const double ai = params.alpha(static_cast<std::size_t>(i));
    const double lead = a0 / (a0 - ai);
    g(i, i) = lead * (2.0 * a0 + 1.0) * (ai + 1.0);
    g(i, k + i) = -lead * (a0 + 1.0) * (a0 + 1.0);
  }
  return {std::move(g), covariance_matrix(params, dirichlet_me_h(k)), {}};
}

GVParts dirichlet_same_parts(const DirichletParams& params) {
  const auto k = static_cast<Index>(params.k());
  const double a0 = params.alpha0();
  const double km1 = static_cast<double>(k - 1);
  MatrixXd g(k, 3 * k);
  for (Index i = 0; i < k; ++i) {
    const double ai = params.alpha(static_cast<std::size_t>(i));
    for (Index j = 0; j < k; ++j) {
      const double aj = params.alpha(static_cast<std::size_t>(j));
      g(i, j) = a0 * ai / km1 * specialfn::digamma_diff(aj, a0) + (i == j ? a0 : 0.0);
      g(i, k + j) = ai * aj / km1;
      g(i, 2 * k + j) = -a0 * ai / km1;
    }
  }
  return {std::move(g), covariance_matrix(params, dirichlet_same_h(k)), {}};
}

MatrixXd mgamma_mle_information(const MGammaParams& params) {
  const auto k = static_cast<Index>(params.k());
  const double b = params.beta();
  MatrixXd m(k + 1, k + 1);
  m.setZero();
  for (Index i = 0; i < k; ++i) {
    m(i, i) = specialfn::trigamma(params.alpha(static_cast<std::size_t>(i)));
    m(i, k) = m(k, i) = 1.0 / b;
  }
  m(k, k) = params.alpha0() / (b * b);
  return m;
}

GVParts mgamma_mle_parts(const MGammaParams& params) {
  const auto k = static_cast<Index>(params.k());
  const double b = params.beta();
  // Jacobian of (alpha, beta) -> (E log z, E x_k).
  MatrixXd je = MatrixXd::Zero(k + 1, k + 1);
  for (Index i = 0; i < k; ++i) {
    je(i, i) = specialfn::trigamma(params.alpha(static_cast<std::size_t>(i)));
    je(i, k) = 1.0 / b;
    je(k, i) = b;
  }
  je(k, k) = params.alpha0();
  std::vector<std::string> warnings;
  MatrixXd g = checked_inverse(je, warnings);
  return {std::move(g), covariance_matrix(params, mgamma_mle_h(k)), std::move(warnings)};
}

GVParts mgamma_me_parts(const MGammaParams& params) {
  const auto k = static_cast<Index>(params.k());
  const double b = params.beta();
  const double kd = static_cast<double>(k);
  MatrixXd g(k + 1, 2 * k);
  for (Index j = 0; j < k; ++j) {
    const double aj = params.alpha(static_cast<std::size_t>(j));
    for (Index i = 0; i < k; ++i) {
      const double ai = params.alpha(static_cast<std::size_t>(i));
      g(i, j) = ai / (kd * b) * (2.0 + 1.0 / aj) + (i == j ? 1.0 / b : 0.0);
      g(i, k + j) = -ai / (kd * aj * b * b);
    }
    g(k, j) = -(2.0 + 1.0 / aj) / kd;
    g(k, k + j) = 1.0 / (kd * aj * b);
  }
  return {std::move(g), covariance_matrix(params, mgamma_me_h(k)), {}};
}

GVParts mgamma_same_parts(const MGammaParams& params) {
  const auto k = static_cast<Index>(params.k());
  const double b = params.beta();
  const double log_b = std::log(b);
  const double kd = static_cast<double>(k);
  MatrixXd g(k + 1, 3 * k);
  for (Index j = 0; j < k; ++j) {
    const double aj = params.alpha(static_cast<std::size_t>(j));
    const double lj = specialfn::digamma(aj) + log_b;
    for (Index i = 0; i < k; ++i) {
      const double ai = params.alpha(static_cast<std::size_t>(i));
      g(i, j) = ai / (kd * b) * lj + (i == j ? 1.0 / b : 0.0);
      g(i, k + j) = ai * aj / kd;
      g(i, 2 * k + j) = -ai / (kd * b);
    }
    g(k, j) = -lj / kd;
    g(k, k + j) = -aj * b / kd;
    g(k, 2 * k + j) = 1.0 / kd;
  }
  return {std::move(g), covariance_matrix(params, mgamma_same_h(k)), {}};
}

GVParts dirichlet_based_parts(const MGammaParams& params, Method base) {
  const DirichletParams d = shapes_of(params);
  const GVParts inner =
      dirichlet_base(base) == Method::me ? dirichlet_me_parts(d) : dirichlet_same_parts(d);
  const Index k = inner.G.rows();
  const Index m = inner.G.cols();
  const double a0 = params.alpha0();
  const double b = params.beta();
  MatrixXd g = MatrixXd::Zero(k + 1, m + 1);
  g.topLeftCorner(k, m) = inner.G;
  g.block(k, 0, 1, m) = -(b / a0) * inner.G.colwise().sum();
  g(k, m) = 1.0 / a0;
  MatrixXd v = MatrixXd::Zero(m + 1, m + 1);
  v.topLeftCorner(m, m) = inner.V;
  v(m, m) = mgamma_covariance(params, MomentId{MomentKind::mg_var_xk});
  return {std::move(g), std::move(v), inner.warnings};
}

MatrixXd dirichlet_log_covariance(const DirichletParams& params) {
  std::vector<MomentId> h;
  for (Index i = 0; i < static_cast<Index>(params.k()); ++i) h.push_back(raw(MomentKind::dir_log, i));
  return covariance_matrix(params, h);
}

// Matrices.

AvarMatrix avar_dirichlet_mle(const DirichletParams& params) {
  const auto k = static_cast<Index>(params.k());
  // V(log X) = diag(psi1(alpha_i)) - psi1(alpha0) 11^T, inverted by the
  // rank-one identity.
  VectorXd w(k);
  for (Index i = 0; i < k; ++i) w(i) = 1.0 / specialfn::trigamma(params.alpha(static_cast<std::size_t>(i)));
  const double c = specialfn::trigamma(params.alpha0());
  const double denominator = 1.0 - c * w.sum();
  if (!(denominator > 0.0)) throw NumericError("Dirichlet information matrix is not invertible");
  MatrixXd m = (c / denominator) * w * w.transpose();
  m.diagonal() += w;
  return finish(std::move(m), Method::mle, Family::dirichlet, params.vector(),
                "inverse of V(log X), rank-one identity");
}

AvarMatrix avar_dirichlet_me(const DirichletParams& params) {
  return sandwich(dirichlet_me_parts(params), Method::me, Family::dirichlet, params.vector(),
                  "G from the closed-form ME Jacobian; V over (x, x^2) from raw moments");
}

AvarMatrix avar_dirichlet_same(const DirichletParams& params) {
  return sandwich(dirichlet_same_parts(params), Method::same, Family::dirichlet, params.vector(),
                  "G from the closed-form SAME Jacobian; V over (x, log x, x log x) from raw moments");
}

AvarMatrix avar_mgamma_mle(const MGammaParams& params) {
  const auto k = static_cast<Index>(params.k());
  const double b = params.beta();
  VectorXd w(k);
  for (Index i = 0; i < k; ++i) w(i) = 1.0 / specialfn::trigamma(params.alpha(static_cast<std::size_t>(i)));
  // Schur complement of the diagonal block, scaled by beta^2.
  const double s = (params.alpha0() - w.sum()) / (b * b);
  if (!(s > 0.0)) throw NumericError("Multivariate Gamma information matrix is not invertible");
  MatrixXd m(k + 1, k + 1);
  const VectorXd u = w / b;
  m.topLeftCorner(k, k) = u * u.transpose() / s;
  m.topLeftCorner(k, k).diagonal() += w;
  m.block(0, k, k, 1) = -u / s;
  m.block(k, 0, 1, k) = (-u / s).transpose();
  m(k, k) = 1.0 / s;
  return finish(std::move(m), Method::mle, Family::mgamma, params.theta(),
                "inverse of the information matrix, Schur complement on the scale corner");
}

AvarMatrix avar_mgamma_me(const MGammaParams& params) {
  return sandwich(mgamma_me_parts(params), Method::me, Family::mgamma, params.theta(),
                  "G from the closed-form ME Jacobian; V over (z, z^2) from raw moments");
}

AvarMatrix avar_mgamma_same(const MGammaParams& params) {
  return sandwich(mgamma_same_parts(params), Method::same, Family::mgamma, params.theta(),
                  "G from the closed-form SAME Jacobian; V over (z, log z, z log z) from raw moments");
}

AvarMatrix avar_dirichlet_based(const MGammaParams& params, Method base) {
  const Method inner = dirichlet_base(base);
  return sandwich(dirichlet_based_parts(params, inner),
                  inner == Method::me ? Method::dir_me : Method::dir_same, Family::mgamma,
                  params.theta(),
                  "block G over the Dirichlet Jacobian of W and x_k; V = diag(V_W, V(x_k))");
}

AvarMatrix avar(const DirichletParams& params, Method method) {
  switch (method) {
    case Method::me: return avar_dirichlet_me(params);
    case Method::same: return avar_dirichlet_same(params);
    case Method::mle: return avar_dirichlet_mle(params);
    default:
      throw ConfigError("estimator " + std::string(to_string(method)) +
                        " does not apply to the Dirichlet family");
  }
}

AvarMatrix avar(const MGammaParams& params, Method method) {
  switch (method) {
    case Method::me: return avar_mgamma_me(params);
    case Method::same: return avar_mgamma_same(params);
    case Method::same_unbiased: {
      AvarMatrix a = avar_mgamma_same(params);
      a.method = Method::same_unbiased;
      return a;
    }
    case Method::mle: return avar_mgamma_mle(params);
    case Method::dir_me:
    case Method::dir_same: return avar_dirichlet_based(params, method);
  }
  throw ConfigError("unknown estimator");
}

}  // namespace momentest
