#pragma once

// Asymptotic variance-covariance matrices G V G^T of sqrt(n)(theta_hat - theta).
//
// V is built from the raw-moment derivation path of the moments module. G is
// the Jacobian of the estimator's moment map at the exact moment vector mu,
// written out in closed form. Two closed forms differ from the printed ones
// and follow the derivative instead: the Dirichlet SAME block for mean log x
// is alpha_i alpha_j / (k - 1), and the scale row of a Dirichlet-based
// estimator is -(beta / alpha0) 1^T G_D.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "momentest/estimators.hpp"
#include "momentest/model.hpp"

namespace momentest {

struct GVParts {
  Eigen::MatrixXd G;  // d x p
  Eigen::MatrixXd V;  // p x p
  std::vector<std::string> warnings;
};

struct AvarMatrix {
  Eigen::MatrixXd matrix;
  Method method;
  Family family;
  Eigen::VectorXd params;
  std::string provenance;  // which G and V produced the matrix
  std::vector<std::string> warnings;
};

AvarMatrix avar_dirichlet_mle(const DirichletParams& params);
AvarMatrix avar_dirichlet_me(const DirichletParams& params);
AvarMatrix avar_dirichlet_same(const DirichletParams& params);

AvarMatrix avar_mgamma_mle(const MGammaParams& params);
AvarMatrix avar_mgamma_me(const MGammaParams& params);
/// Also serves same_unbiased, whose correction factors tend to 1.
AvarMatrix avar_mgamma_same(const MGammaParams& params);
/// base is me/dir_me or same/dir_same.
AvarMatrix avar_dirichlet_based(const MGammaParams& params, Method base);

/// Dispatch by family and method.
AvarMatrix avar(const DirichletParams& params, Method method);
AvarMatrix avar(const MGammaParams& params, Method method);

// Building blocks, exposed for the Jacobian cross-checks.

/// Exact moment vectors mu = E h(X) in the layout of the matching *_map.
Eigen::VectorXd dirichlet_me_mu(const DirichletParams& params);
Eigen::VectorXd dirichlet_same_mu(const DirichletParams& params);
Eigen::VectorXd dirichlet_mle_mu(const DirichletParams& params);
Eigen::VectorXd mgamma_me_mu(const MGammaParams& params);
Eigen::VectorXd mgamma_same_mu(const MGammaParams& params);
Eigen::VectorXd mgamma_mle_mu(const MGammaParams& params);
Eigen::VectorXd dirichlet_based_mu(const MGammaParams& params, Method base);

GVParts dirichlet_me_parts(const DirichletParams& params);
GVParts dirichlet_same_parts(const DirichletParams& params);
/// G is the inverse of the Jacobian of the moment map of (log z, x_k).
GVParts mgamma_mle_parts(const MGammaParams& params);
GVParts mgamma_me_parts(const MGammaParams& params);
GVParts mgamma_same_parts(const MGammaParams& params);
GVParts dirichlet_based_parts(const MGammaParams& params, Method base);

/// The information matrices whose inverses are the MLE avars.
Eigen::MatrixXd dirichlet_log_covariance(const DirichletParams& params);
Eigen::MatrixXd mgamma_mle_information(const MGammaParams& params);

/// Throws NumericError unless m is symmetric to 1e-10 relative and its
/// smallest eigenvalue is at least -1e-8 trace(m).
void check_avar_contract(const Eigen::MatrixXd& m);

}  // namespace momentest
