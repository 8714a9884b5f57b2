#include "momentest/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "momentest/avar.hpp"
#include "momentest/error.hpp"

namespace momentest {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr std::size_t kMinReplicates = 100;
constexpr std::size_t kMinSurvivors = 10;

SampleMatrix draw(Family family, const VectorXd& theta, std::size_t n, RngSpec rng) {
  if (family == Family::dirichlet) {
    return sample_dirichlet(DirichletParams(std::vector<double>(theta.begin(), theta.end())), n,
                            rng);
  }
  return sample_mgamma(MGammaParams::from_theta({theta.data(), static_cast<std::size_t>(theta.size())}), n, rng);
}

std::size_t parameter_count(Family family, std::size_t k) {
  return family == Family::dirichlet ? k : k + 1;
}

// Row-major copy so each observation is one contiguous span.
struct Observations {
  std::size_t k = 0;
  std::vector<double> x;
  std::vector<double> log_x;
  std::vector<double> xk;

  std::span<const double> row(const std::vector<double>& v, std::size_t r) const {
    return {v.data() + r * k, k};
  }
};

Observations observations(const MatrixXd& x, const MatrixXd* last) {
  Observations o;
  o.k = static_cast<std::size_t>(x.cols());
  const auto n = static_cast<std::size_t>(x.rows());
  o.x.resize(n * o.k);
  o.log_x.resize(n * o.k);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < o.k; ++c) {
      const double v = x(static_cast<Index>(r), static_cast<Index>(c));
      o.x[r * o.k + c] = v;
      o.log_x[r * o.k + c] = std::log(v);
    }
  }
  if (last != nullptr) {
    o.xk.resize(n);
    for (std::size_t r = 0; r < n; ++r) o.xk[r] = (*last)(static_cast<Index>(r), last->cols() - 1);
  }
  return o;
}

template <class Params, class Closed, class Printed>
std::vector<CatalogCheckRow> mc_check(const Params& params, const std::vector<MomentId>& ids,
                                      const Observations& obs, std::size_t draws, Closed closed,
                                      Printed printed) {
  const double n = static_cast<double>(draws);
  auto value = [&obs](const Monomial& m, std::size_t r) {
    return m.evaluate(obs.row(obs.x, r), obs.row(obs.log_x, r), obs.xk.empty() ? 0.0 : obs.xk[r]);
  };
  std::vector<CatalogCheckRow> rows;
  rows.reserve(ids.size());
  for (const MomentId& id : ids) {
    id.validate(params.k());
    CatalogCheckRow row{id, to_string(id), closed(id), std::nullopt, 0.0, 0.0, 0.0};
    std::vector<double> d(draws);
    if (!id.is_covariance()) {
      const Monomial m = monomial_of(id);
      for (std::size_t r = 0; r < draws; ++r) d[r] = value(m, r);
    } else {
      row.printed = printed(id);
      const auto [u, v] = covariance_operands(id);
      const Monomial mu = monomial_of(u);
      const Monomial mv = monomial_of(v);
      std::vector<double> uu(draws), vv(draws);
      double su = 0.0, sv = 0.0;
      for (std::size_t r = 0; r < draws; ++r) {
        uu[r] = value(mu, r);
        vv[r] = value(mv, r);
        su += uu[r];
        sv += vv[r];
      }
      su /= n;
      sv /= n;
      for (std::size_t r = 0; r < draws; ++r) d[r] = (uu[r] - su) * (vv[r] - sv);
    }
    double mean = 0.0;
    for (double x : d) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : d) ss += (x - mean) * (x - mean);
    row.mc_estimate = mean;
    row.mc_se = std::sqrt(ss / (n - 1.0) / n);
    const double diff = row.mc_estimate - row.closed_form;
    row.z = row.mc_se > 0.0 ? diff / row.mc_se
                            : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void SweepConfig::validate(bool sampling) const {
  const std::size_t k = alpha.size();
  if (family == Family::dirichlet) {
    if (k < 2) throw ConfigError("Dirichlet sweep needs k >= 2 shapes");
  } else if (k < 1) {
    throw ConfigError("Multivariate Gamma sweep needs k >= 1 shapes");
  }
  if (sweep_index >= parameter_count(family, k)) throw ConfigError("sweep index out of range");
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  for (double g : grid) {
    if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("sweep grid values must be positive");
  }
  if (estimators.empty()) throw ConfigError("no estimators selected");
  for (Method m : estimators) {
    if (!method_supports(family, m)) {
      throw ConfigError("estimator " + std::string(to_string(m)) + " does not apply to " +
                        std::string(to_string(family)));
    }
  }
  // Builds the parameter objects once so invalid fixed values surface here.
  try {
    const VectorXd theta = theta_at(grid.front());
    if (family == Family::dirichlet) {
      DirichletParams(std::vector<double>(theta.begin(), theta.end()));
    } else {
      MGammaParams::from_theta({theta.data(), static_cast<std::size_t>(theta.size())});
    }
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (!sampling) return;
  if (n_values.empty()) throw ConfigError("no sample sizes given");
  for (std::size_t n : n_values) {
    if (n < 2) throw ConfigError("sample sizes must be at least 2");
  }
  if (replicates < kMinReplicates) throw ConfigError("at least 100 replicates are required");
  solver.validate();
}

VectorXd SweepConfig::theta_at(double value) const {
  VectorXd theta(static_cast<Index>(parameter_count(family, alpha.size())));
  for (std::size_t i = 0; i < alpha.size(); ++i) theta(static_cast<Index>(i)) = alpha[i];
  if (family == Family::mgamma) theta(static_cast<Index>(alpha.size())) = beta;
  theta(static_cast<Index>(sweep_index)) = value;
  return theta;
}

std::vector<MetricsRow> run_metric_sweep(const SweepConfig& config) {
  config.validate(true);
  const std::size_t m = config.replicates;
  const std::size_t n_est = config.estimators.size();
  const auto d = static_cast<Index>(parameter_count(config.family, config.alpha.size()));
  std::vector<MetricsRow> rows;
  std::uint64_t cell = 0;
  for (double value : config.grid) {
    const VectorXd theta = config.theta_at(value);
    for (std::size_t n : config.n_values) {
      const std::uint64_t cell_seed = derive_seed(config.seed, cell++);
      // results[r * n_est + e]: estimate of replicate r by estimator e.
      std::vector<std::optional<VectorXd>> results(m * n_est);
      parallel_for(m, config.threads, [&](std::size_t r) {
        const SampleMatrix sample = draw(config.family, theta, n, RngSpec{cell_seed, r});
        for (std::size_t e = 0; e < n_est; ++e) {
          EstimateReport rep = estimate(sample, config.estimators[e], config.solver);
          if (rep.exists) results[r * n_est + e] = std::move(*rep.estimate);
        }
      });
      for (std::size_t e = 0; e < n_est; ++e) {
        std::size_t ok = 0;
        VectorXd sum = VectorXd::Zero(d);
        for (std::size_t r = 0; r < m; ++r) {
          if (const auto& est = results[r * n_est + e]) {
            sum += *est;
            ++ok;
          }
        }
        const VectorXd mean = sum / static_cast<double>(ok);
        VectorXd ss = VectorXd::Zero(d);
        VectorXd se = VectorXd::Zero(d);
        for (std::size_t r = 0; r < m; ++r) {
          if (const auto& est = results[r * n_est + e]) {
            ss += (*est - mean).cwiseAbs2();
            se += (*est - theta).cwiseAbs2();
          }
        }
        const double okd = static_cast<double>(ok);
        for (Index p = 0; p < d; ++p) {
          const double nan = std::numeric_limits<double>::quiet_NaN();
          rows.push_back(MetricsRow{config.family, config.estimators[e], static_cast<std::size_t>(p),
                                    value, n, ok, m - ok, ok ? mean(p) - theta(p) : nan,
                                    ok ? ss(p) / okd : nan, ok ? std::sqrt(se(p) / okd) : nan});
        }
      }
    }
  }
  return rows;
}

MatrixXd empirical_sampling_covariance(Family family, const VectorXd& theta, Method method,
                                       std::size_t n, std::size_t m, std::uint64_t seed,
                                       unsigned threads, const SolverConfig& solver) {
  if (!method_supports(family, method)) throw ConfigError("estimator does not apply to family");
  if (n < 2) throw ConfigError("sample size must be at least 2");
  std::vector<std::optional<VectorXd>> results(m);
  parallel_for(m, threads, [&](std::size_t r) {
    const SampleMatrix sample = draw(family, theta, n, RngSpec{seed, r});
    EstimateReport rep = estimate(sample, method, solver);
    if (rep.exists) results[r] = std::move(*rep.estimate);
  });
  const double root_n = std::sqrt(static_cast<double>(n));
  std::vector<VectorXd> scaled;
  for (const auto& est : results) {
    if (est) scaled.push_back(root_n * (*est - theta));
  }
  if (scaled.size() < kMinSurvivors) {
    throw InsufficientDataError("only " + std::to_string(scaled.size()) +
                                " replicates produced an estimate; need at least 10");
  }
  VectorXd mean = VectorXd::Zero(theta.size());
  for (const auto& s : scaled) mean += s;
  mean /= static_cast<double>(scaled.size());
  MatrixXd cov = MatrixXd::Zero(theta.size(), theta.size());
  for (const auto& s : scaled) {
    const VectorXd c = s - mean;
    cov.noalias() += c * c.transpose();
  }
  cov /= static_cast<double>(scaled.size() - 1);
  return 0.5 * (cov + cov.transpose());
}

std::vector<AvarRow> run_avar_sweep(const SweepConfig& config) {
  config.validate(false);
  std::vector<AvarRow> rows;
  for (double value : config.grid) {
    const VectorXd theta = config.theta_at(value);
    for (Method method : config.estimators) {
      const AvarMatrix a =
          config.family == Family::dirichlet
              ? avar(DirichletParams(std::vector<double>(theta.begin(), theta.end())), method)
              : avar(MGammaParams::from_theta({theta.data(), static_cast<std::size_t>(theta.size())}), method);
      for (Index p = 0; p < a.matrix.rows(); ++p) {
        rows.push_back(AvarRow{config.family, method, static_cast<std::size_t>(p), value,
                               a.matrix(p, p)});
      }
    }
  }
  return rows;
}

std::vector<CatalogCheckRow> catalog_mc_check(const DirichletParams& params,
                                              const std::vector<MomentId>& ids, std::size_t draws,
                                              std::uint64_t seed) {
  if (draws < 2) throw ConfigError("need at least 2 draws");
  const SampleMatrix sample = sample_dirichlet(params, draws, RngSpec{seed, 0});
  const Observations obs = observations(sample.data(), nullptr);
  return mc_check(
      params, ids, obs, draws,
      [&](const MomentId& id) {
        return id.is_covariance() ? dirichlet_covariance(params, id)
                                  : dirichlet_raw_moment(params, id);
      },
      [&](const MomentId& id) { return dirichlet_covariance_printed(params, id); });
}

std::vector<CatalogCheckRow> catalog_mc_check(const MGammaParams& params,
                                              const std::vector<MomentId>& ids, std::size_t draws,
                                              std::uint64_t seed) {
  if (draws < 2) throw ConfigError("need at least 2 draws");
  const SampleMatrix sample = sample_mgamma(params, draws, RngSpec{seed, 0});
  const MatrixXd z = delta_transform(sample);
  const Observations obs = observations(z, &sample.data());
  return mc_check(
      params, ids, obs, draws,
      [&](const MomentId& id) {
        return id.is_covariance() ? mgamma_covariance(params, id) : mgamma_raw_moment(params, id);
      },
      [&](const MomentId& id) { return mgamma_covariance_printed(params, id); });
}

}  // namespace momentest
