#include "momentest/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "momentest/error.hpp"
#include "momentest/specialfn.hpp"

namespace momentest {
namespace {

constexpr double kBelowOne = 1.0 - 0x1.0p-53;

void check_positive_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw ParameterError(std::string(what) + "[" + std::to_string(i + 1) +
                           "] must be positive and finite");
    }
  }
}

double left_sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

std::string row_label(Eigen::Index row) { return "row " + std::to_string(row + 1); }

}  // namespace

std::string_view to_string(Family family) noexcept {
  return family == Family::dirichlet ? "dirichlet" : "mgamma";
}

Family parse_family(std::string_view name) {
  if (name == "dirichlet") return Family::dirichlet;
  if (name == "mgamma") return Family::mgamma;
  throw ConfigError("unknown family '" + std::string(name) + "'");
}

DirichletParams::DirichletParams(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.size() < 2) throw ParameterError("Dirichlet requires k >= 2 shape parameters");
  check_positive_finite(alpha_, "alpha");
  alpha0_ = left_sum(alpha_);
}

Eigen::VectorXd DirichletParams::vector() const {
  return Eigen::Map<const Eigen::VectorXd>(alpha_.data(), static_cast<Eigen::Index>(k()));
}

MGammaParams::MGammaParams(std::vector<double> alpha, double beta)
    : alpha_(std::move(alpha)), beta_(beta) {
  if (alpha_.empty()) throw ParameterError("Multivariate Gamma requires k >= 1 shape parameters");
  check_positive_finite(alpha_, "alpha");
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) {
    throw ParameterError("beta must be positive and finite");
  }
  alpha0_ = left_sum(alpha_);
}

MGammaParams MGammaParams::from_theta(std::span<const double> theta) {
  if (theta.size() < 2) throw ParameterError("theta must hold k >= 1 shapes and a scale");
  return MGammaParams(std::vector<double>(theta.begin(), theta.end() - 1), theta.back());
}

Eigen::VectorXd MGammaParams::theta() const {
  Eigen::VectorXd t(static_cast<Eigen::Index>(k() + 1));
  for (std::size_t i = 0; i < k(); ++i) t(static_cast<Eigen::Index>(i)) = alpha_[i];
  t(static_cast<Eigen::Index>(k())) = beta_;
  return t;
}

void validate_dirichlet_point(std::span<const double> x, double tolerance) {
  if (x.size() < 2) throw SupportError("Dirichlet point needs at least 2 coordinates");
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] > 0.0 && x[j] < 1.0)) {
      throw SupportError("column x" + std::to_string(j + 1) + " = " + std::to_string(x[j]) +
                         " is outside (0, 1)");
    }
    sum += x[j];
  }
  if (!(std::abs(sum - 1.0) <= tolerance)) {
    throw SupportError("coordinates sum to " + std::to_string(sum) + ", not 1");
  }
}

void validate_mgamma_point(std::span<const double> x) {
  if (x.empty()) throw SupportError("Multivariate Gamma point needs at least 1 coordinate");
  double prev = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!std::isfinite(x[j]) || !(x[j] > prev)) {
      throw SupportError("column x" + std::to_string(j + 1) + " = " + std::to_string(x[j]) +
                         (j == 0 ? " is not positive" : " does not exceed the previous column"));
    }
    prev = x[j];
  }
}

SampleMatrix SampleMatrix::dirichlet(Eigen::MatrixXd data, bool renormalize) {
  if (data.rows() < 1) throw SampleError("sample has no observations");
  if (data.cols() < 2) throw SampleError("Dirichlet sample needs at least 2 columns");
  std::vector<double> row(static_cast<std::size_t>(data.cols()));
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    if (renormalize) {
      const double s = data.row(r).sum();
      if (std::abs(s - 1.0) <= kRenormalizeTolerance) data.row(r) /= s;
    }
    for (Eigen::Index c = 0; c < data.cols(); ++c) row[static_cast<std::size_t>(c)] = data(r, c);
    try {
      validate_dirichlet_point(row);
    } catch (const SupportError& e) {
      throw SupportError(row_label(r) + ": " + e.what());
    }
  }
  return SampleMatrix(Family::dirichlet, std::move(data));
}

SampleMatrix SampleMatrix::mgamma(Eigen::MatrixXd data) {
  if (data.rows() < 1) throw SampleError("sample has no observations");
  if (data.cols() < 1) throw SampleError("Multivariate Gamma sample needs at least 1 column");
  std::vector<double> row(static_cast<std::size_t>(data.cols()));
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) row[static_cast<std::size_t>(c)] = data(r, c);
    try {
      validate_mgamma_point(row);
    } catch (const SupportError& e) {
      throw SupportError(row_label(r) + ": " + e.what());
    }
  }
  return SampleMatrix(Family::mgamma, std::move(data));
}

void draw_dirichlet_row(std::span<const double> alpha, RandomStream& stream,
                        std::span<double> x, std::span<double> log_x) {
  const std::size_t k = alpha.size();
  for (;;) {
    std::size_t top = 0;
    for (std::size_t i = 0; i < k; ++i) {
      log_x[i] = stream.log_gamma(alpha[i]);
      if (log_x[i] > log_x[top]) top = i;
    }
    const double peak = log_x[top];
    double rest = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (i != top) rest += std::exp(log_x[i] - peak);
    }
    const double log_norm = peak + std::log1p(rest);
    bool underflow = false;
    for (std::size_t i = 0; i < k; ++i) {
      log_x[i] -= log_norm;
      x[i] = std::min(std::exp(log_x[i]), kBelowOne);
      underflow = underflow || !(x[i] > 0.0);
    }
    // Only reachable for shapes far below those the estimators target.
    if (!underflow) return;
  }
}

SampleMatrix sample_dirichlet(const DirichletParams& params, std::size_t n, RngSpec rng) {
  if (n < 1) throw SampleError("sample size must be at least 1");
  const auto k = static_cast<Eigen::Index>(params.k());
  Eigen::MatrixXd data(static_cast<Eigen::Index>(n), k);
  RandomStream stream(rng);
  std::vector<double> x(params.k());
  std::vector<double> log_x(params.k());
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    draw_dirichlet_row(params.alpha(), stream, x, log_x);
    for (Eigen::Index c = 0; c < k; ++c) data(r, c) = x[static_cast<std::size_t>(c)];
  }
  return SampleMatrix::dirichlet(std::move(data));
}

SampleMatrix sample_mgamma(const MGammaParams& params, std::size_t n, RngSpec rng) {
  if (n < 1) throw SampleError("sample size must be at least 1");
  const auto k = static_cast<Eigen::Index>(params.k());
  Eigen::MatrixXd data(static_cast<Eigen::Index>(n), k);
  RandomStream stream(rng);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    double prev = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double z = params.beta() * stream.gamma(params.alpha(static_cast<std::size_t>(c)));
      double next = prev + z;
      if (!(next > prev)) next = std::nextafter(prev, kInf);
      data(r, c) = next;
      prev = next;
    }
  }
  return SampleMatrix::mgamma(std::move(data));
}

double log_density_dirichlet(const DirichletParams& params, std::span<const double> x) {
  if (x.size() != params.k()) throw SupportError("point dimension does not match k");
  validate_dirichlet_point(x);
  double value = specialfn::ln_gamma(params.alpha0());
  for (std::size_t i = 0; i < x.size(); ++i) {
    value += (params.alpha(i) - 1.0) * std::log(x[i]) - specialfn::ln_gamma(params.alpha(i));
  }
  return value;
}

double log_density_mgamma(const MGammaParams& params, std::span<const double> x) {
  if (x.size() != params.k()) throw SupportError("point dimension does not match k");
  validate_mgamma_point(x);
  double value = -params.alpha0() * std::log(params.beta()) - x.back() / params.beta();
  double prev = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    value += (params.alpha(i) - 1.0) * std::log(x[i] - prev) - specialfn::ln_gamma(params.alpha(i));
    prev = x[i];
  }
  return value;
}

Eigen::MatrixXd delta_transform(const SampleMatrix& sample) {
  if (sample.family() != Family::mgamma) {
    throw SampleError("delta transform requires a Multivariate Gamma sample");
  }
  const Eigen::MatrixXd& x = sample.data();
  Eigen::MatrixXd z(x.rows(), x.cols());
  z.col(0) = x.col(0);
  for (Eigen::Index c = 1; c < x.cols(); ++c) z.col(c) = x.col(c) - x.col(c - 1);
  return z;
}

SampleMatrix dirichlet_projection(const SampleMatrix& sample) {
  if (sample.k() < 2) throw SampleError("Dirichlet projection needs k >= 2");
  Eigen::MatrixXd w = delta_transform(sample);
  const Eigen::VectorXd total = sample.data().col(sample.k() - 1);
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    w.col(c) = (w.col(c).array() / total.array()).min(kBelowOne).matrix();
  }
  return SampleMatrix::dirichlet(std::move(w));
}

Eigen::VectorXd sufficient_stats(Family family, std::span<const double> x) {
  if (family == Family::dirichlet) {
    validate_dirichlet_point(x);
    Eigen::VectorXd t(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) t(static_cast<Eigen::Index>(i)) = std::log(x[i]);
    return t;
  }
  validate_mgamma_point(x);
  Eigen::VectorXd t(static_cast<Eigen::Index>(x.size() + 1));
  double prev = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    t(static_cast<Eigen::Index>(i)) = std::log(x[i] - prev);
    prev = x[i];
  }
  t(static_cast<Eigen::Index>(x.size())) = x.back();
  return t;
}

double log_partition(const DirichletParams& params) {
  double value = -specialfn::ln_gamma(params.alpha0());
  for (double a : params.alpha()) value += specialfn::ln_gamma(a);
  return value;
}

double log_partition(const MGammaParams& params) {
  double value = params.alpha0() * std::log(params.beta());
  for (double a : params.alpha()) value += specialfn::ln_gamma(a);
  return value;
}

}  // namespace momentest
