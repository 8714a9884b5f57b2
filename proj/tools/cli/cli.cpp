#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "csv.hpp"
#include "momentest/avar.hpp"
#include "momentest/error.hpp"
#include "momentest/estimators.hpp"
#include "momentest/model.hpp"
#include "momentest/moments.hpp"
#include "momentest/montecarlo.hpp"

namespace momentest::cli {
namespace {

constexpr double kZLimit = 4.0;

struct ParamFlags {
  std::string family;
  std::string alpha;
  double beta = 1.0;
};

struct SweepFlags {
  ParamFlags params;
  std::string recipe;
  std::size_t sweep_index = 1;  // 1-based; k + 1 selects beta
  std::string grid;
  std::string n_values = "20,50";
  std::size_t replicates = 10000;
  std::string estimators;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string output;
};

struct Panel {
  std::string label;
  SweepConfig config;
};

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

// "lo:hi:count" or a comma list.
std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_list(text, "--grid");
  std::string spec = text;
  for (char& c : spec) {
    if (c == ':') c = ',';
  }
  const auto parts = parse_list(spec, "--grid");
  if (parts.size() != 3 || !(parts[2] >= 1.0) || parts[2] != std::floor(parts[2])) {
    throw ConfigError("--grid expects lo:hi:count or a comma list");
  }
  return linspace(parts[0], parts[1], static_cast<std::size_t>(parts[2]));
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_list(text, "--n")) {
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("--n values must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  std::istringstream ss(text);
  std::string tag;
  while (std::getline(ss, tag, ',')) out.push_back(parse_method(tag));
  if (out.empty()) throw ConfigError("--estimators is empty");
  return out;
}

std::vector<Method> default_methods(Family family) {
  if (family == Family::dirichlet) return {Method::me, Method::same, Method::mle};
  return {Method::me, Method::same, Method::mle, Method::dir_me, Method::dir_same};
}

DirichletParams dirichlet_params(const ParamFlags& f) {
  return DirichletParams(parse_list(f.alpha, "--alpha"));
}

MGammaParams mgamma_params(const ParamFlags& f) {
  return MGammaParams(parse_list(f.alpha, "--alpha"), f.beta);
}

SweepConfig recipe_config(Family family, std::vector<double> alpha, double beta,
                          std::size_t sweep_index, std::vector<double> grid) {
  SweepConfig c;
  c.family = family;
  c.alpha = std::move(alpha);
  c.beta = beta;
  c.sweep_index = sweep_index;
  c.grid = std::move(grid);
  c.n_values = {20, 50};
  c.estimators = default_methods(family);
  return c;
}

// Parameter settings of the published figures. The swept entry of alpha is a
// placeholder.
std::vector<Panel> recipe_panels(const std::string& name) {
  const auto metric_grid = linspace(0.2, 5.0, 8);
  const auto avar_grid = linspace(0.2, 5.0, 25);
  const auto D = Family::dirichlet;
  const auto G = Family::mgamma;
  if (name == "fig1") return {{"alpha1", recipe_config(D, {1, 0.2, 1, 2, 5}, 1.0, 0, metric_grid)}};
  if (name == "fig3") return {{"alpha1", recipe_config(G, {1, 1, 2, 5}, 1.0, 0, metric_grid)}};
  if (name == "fig4") return {{"beta", recipe_config(G, {0.2, 1, 2, 5}, 1.0, 4, metric_grid)}};
  if (name == "fig2") {
    return {{"k3", recipe_config(D, {1, 1, 5}, 1.0, 0, avar_grid)},
            {"k5", recipe_config(D, {1, 0.2, 1, 2, 5}, 1.0, 0, avar_grid)}};
  }
  if (name == "fig5") {
    return {{"alpha1_k2", recipe_config(G, {1, 5}, 1.0, 0, avar_grid)},
            {"alpha1_k4", recipe_config(G, {1, 1, 2, 5}, 1.0, 0, avar_grid)},
            {"beta_k2", recipe_config(G, {1, 5}, 1.0, 2, avar_grid)},
            {"beta_k4", recipe_config(G, {0.2, 1, 2, 5}, 1.0, 4, avar_grid)}};
  }
  throw ConfigError("unknown recipe '" + name + "'");
}

std::vector<Panel> sweep_panels(const SweepFlags& f, bool sampling) {
  std::vector<Panel> panels;
  if (!f.recipe.empty()) {
    const bool metric_recipe = f.recipe == "fig1" || f.recipe == "fig3" || f.recipe == "fig4";
    if (metric_recipe != sampling) {
      throw ConfigError("recipe " + f.recipe + " belongs to the " +
                        (sampling ? "avar" : "sweep") + " command");
    }
    panels = recipe_panels(f.recipe);
  } else {
    if (f.params.family.empty() || f.params.alpha.empty() || f.grid.empty()) {
      throw ConfigError("give --recipe, or --family, --alpha and --grid");
    }
    SweepConfig c;
    c.family = parse_family(f.params.family);
    c.alpha = parse_list(f.params.alpha, "--alpha");
    c.beta = f.params.beta;
    if (f.sweep_index < 1) throw ConfigError("--sweep-index is 1-based");
    c.sweep_index = f.sweep_index - 1;
    c.grid = parse_grid(f.grid);
    c.estimators = default_methods(c.family);
    panels.push_back({"", std::move(c)});
  }
  for (auto& p : panels) {
    if (!f.estimators.empty()) p.config.estimators = parse_methods(f.estimators);
    p.config.n_values = parse_sizes(f.n_values);
    p.config.replicates = f.replicates;
    p.config.seed = f.seed;
    p.config.threads = f.threads;
    p.config.validate(sampling);
  }
  return panels;
}

// Single panels go to --output (or stdout). Several panels go to
// <stem>.<label>.csv, or to stdout as blocks opened by "# panel <label>".
template <class WritePanel>
void emit_panels(const std::vector<Panel>& panels, const std::string& output, std::ostream& out,
                 WritePanel write) {
  if (panels.size() == 1) {
    if (output.empty()) return write(panels.front(), out);
    std::ofstream file(output);
    if (!file) throw ConfigError("cannot write " + output);
    return write(panels.front(), file);
  }
  for (const auto& p : panels) {
    if (output.empty()) {
      out << "# panel " << p.label << '\n';
      write(p, out);
      continue;
    }
    std::string stem = output;
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv") stem.resize(stem.size() - 4);
    const std::string path = stem + "." + p.label + ".csv";
    std::ofstream file(path);
    if (!file) throw ConfigError("cannot write " + path);
    write(p, file);
  }
}

int cmd_fit(const ParamFlags& pf, const std::string& method_tag, const std::string& input,
            bool unbiased, bool renormalize, const SolverConfig& solver, std::ostream& out) {
  const Family family = parse_family(pf.family);
  Method method = parse_method(method_tag);
  if (unbiased) {
    if (family != Family::mgamma || method != Method::same) {
      throw ConfigError("--unbiased applies to the mgamma same estimator only");
    }
    method = Method::same_unbiased;
  }
  if (!method_supports(family, method)) {
    throw ConfigError("estimator " + method_tag + " does not apply to " + pf.family);
  }
  if (renormalize && family != Family::dirichlet) {
    throw ConfigError("--renormalize applies to dirichlet samples only");
  }
  Eigen::MatrixXd data;
  if (input == "-") {
    data = read_observations(std::cin);
  } else {
    std::ifstream file(input);
    if (!file) throw SampleError("cannot read " + input);
    data = read_observations(file);
  }
  const SampleMatrix sample = family == Family::dirichlet
                                  ? SampleMatrix::dirichlet(std::move(data), renormalize)
                                  : SampleMatrix::mgamma(std::move(data));
  const EstimateReport r = estimate(sample, method, solver);

  nlohmann::ordered_json j;
  j["family"] = to_string(r.family);
  j["method"] = to_string(r.method);
  if (r.estimate) {
    j["estimate"] = std::vector<double>(r.estimate->begin(), r.estimate->end());
  } else {
    j["estimate"] = nullptr;
  }
  j["exists"] = r.exists;
  if (!r.exists) j["reason"] = to_string(r.reason);
  if (r.diagnostics) {
    j["diagnostics"] = {{"iterations", r.diagnostics->iterations},
                        {"score_norm", r.diagnostics->score_norm}};
  } else {
    j["diagnostics"] = nullptr;
  }
  j["n"] = r.n;
  out << j.dump(2) << '\n';
  return r.exists ? kOk : kNoEstimate;
}

int cmd_sample(const ParamFlags& pf, std::size_t n, std::uint64_t seed, std::uint64_t stream,
               const std::string& output, std::ostream& out) {
  const Family family = parse_family(pf.family);
  if (n < 1) throw ConfigError("--n must be at least 1");
  const RngSpec rng{seed, stream};
  const SampleMatrix s = family == Family::dirichlet ? sample_dirichlet(dirichlet_params(pf), n, rng)
                                                     : sample_mgamma(mgamma_params(pf), n, rng);
  if (output.empty()) {
    write_observations(out, s.data());
  } else {
    std::ofstream file(output);
    if (!file) throw ConfigError("cannot write " + output);
    write_observations(file, s.data());
  }
  return kOk;
}

int cmd_moments_check(const ParamFlags& pf, std::size_t draws, std::uint64_t seed,
                      const std::string& output, bool corrupt, std::ostream& out,
                      std::ostream& err) {
  const Family family = parse_family(pf.family);
  std::vector<CatalogCheckRow> rows;
  if (family == Family::dirichlet) {
    const auto p = dirichlet_params(pf);
    rows = catalog_mc_check(p, dirichlet_catalog(p.k()), draws, seed);
  } else {
    const auto p = mgamma_params(pf);
    rows = catalog_mc_check(p, mgamma_catalog(p.k()), draws, seed);
  }
  if (corrupt && !rows.empty()) {
    // Test hook: a catalog value off by 10% must be caught.
    auto& r = rows.front();
    r.closed_form *= 1.1;
    r.z = (r.mc_estimate - r.closed_form) / r.mc_se;
  }
  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) throw ConfigError("cannot write " + output);
  }
  std::ostream& dst = output.empty() ? out : file;
  dst << "moment,catalog,printed,printed_status,mc_estimate,mc_se,z,pass\n";
  std::size_t failures = 0;
  for (const auto& r : rows) {
    const bool pass = std::abs(r.z) <= kZLimit;
    failures += pass ? 0 : 1;
    std::string status;
    if (r.printed) {
      switch (printed_form_status(r.id.kind)) {
        case PrintedForm::exact: status = "exact"; break;
        case PrintedForm::interpreted: status = "interpreted"; break;
        case PrintedForm::suspected_typo: status = "suspected_typo"; break;
      }
    }
    dst << '"' << r.name << "\"," << format_double(r.closed_form) << ','
        << (r.printed ? format_double(*r.printed) : "") << ',' << status << ','
        << format_double(r.mc_estimate) << ',' << format_double(r.mc_se) << ','
        << format_double(r.z) << ',' << (pass ? "true" : "false") << '\n';
  }
  if (failures > 0) {
    err << failures << " of " << rows.size() << " catalog entries deviate by more than "
        << kZLimit << " standard errors\n";
    return kVerificationFailed;
  }
  return kOk;
}

int cmd_sweep(const SweepFlags& f, std::ostream& out) {
  const auto panels = sweep_panels(f, true);
  emit_panels(panels, f.output, out, [](const Panel& p, std::ostream& dst) {
    dst << "family,estimator,param_index,sweep_value,n,m_effective,failures,bias,variance,rmse\n";
    for (const auto& r : run_metric_sweep(p.config)) {
      dst << to_string(r.family) << ',' << to_string(r.estimator) << ',' << r.param_index + 1
          << ',' << format_double(r.sweep_value) << ',' << r.n << ',' << r.m_effective << ','
          << r.failures << ',' << format_double(r.bias) << ',' << format_double(r.variance)
          << ',' << format_double(r.rmse) << '\n';
    }
  });
  return kOk;
}

int cmd_avar(const SweepFlags& f, std::ostream& out) {
  const auto panels = sweep_panels(f, false);
  emit_panels(panels, f.output, out, [](const Panel& p, std::ostream& dst) {
    dst << "family,estimator,param_index,sweep_value,avar\n";
    for (const auto& r : run_avar_sweep(p.config)) {
      dst << to_string(r.family) << ',' << to_string(r.estimator) << ',' << r.param_index + 1
          << ',' << format_double(r.sweep_value) << ',' << format_double(r.avar) << '\n';
    }
  });
  return kOk;
}

void add_param_flags(CLI::App* cmd, ParamFlags& f, bool family_required = true) {
  auto* fam = cmd->add_option("--family", f.family, "dirichlet or mgamma")
                  ->check(CLI::IsMember({"dirichlet", "mgamma"}));
  if (family_required) fam->required();
  cmd->add_option("--alpha", f.alpha, "shape parameters, comma separated");
  cmd->add_option("--beta", f.beta, "scale (mgamma)");
}

void add_sweep_flags(CLI::App* cmd, SweepFlags& f, bool sampling) {
  add_param_flags(cmd, f.params, false);
  cmd->add_option("--recipe", f.recipe,
                  sampling ? "fig1, fig3 or fig4" : "fig2 or fig5");
  cmd->add_option("--sweep-index", f.sweep_index, "swept parameter, 1-based; k+1 is beta");
  cmd->add_option("--grid", f.grid, "lo:hi:count or a comma list");
  cmd->add_option("--estimators", f.estimators, "comma separated estimator tags");
  cmd->add_option("--output,-o", f.output, "output CSV (default: stdout)");
  if (sampling) {
    cmd->add_option("--n", f.n_values, "sample sizes, comma separated");
    cmd->add_option("--m", f.replicates, "Monte Carlo replicates per cell");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--threads", f.threads, "worker threads (0: all cores)");
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moment-type estimators for the Dirichlet and Multivariate Gamma families"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "momentest 0.1.0");

  ParamFlags fit_params;
  std::string fit_method, fit_input;
  bool fit_unbiased = false, fit_renormalize = false;
  SolverConfig solver;
  auto* fit = app.add_subcommand("fit", "estimate parameters from a CSV sample; JSON on stdout");
  add_param_flags(fit, fit_params);
  fit->add_option("--method", fit_method, "me, same, mle, dir_me, dir_same, same_unbiased")
      ->required();
  fit->add_option("--input,-i", fit_input, "CSV with header x1..xk ('-' for stdin)")->required();
  fit->add_flag("--unbiased", fit_unbiased, "n/(n-1) correction of the mgamma SAME");
  fit->add_flag("--renormalize", fit_renormalize, "rescale rows within 1e-6 of the simplex");
  fit->add_option("--tol", solver.tolerance, "MLE score tolerance");
  fit->add_option("--max-iter", solver.max_iterations, "MLE iteration limit");

  ParamFlags sample_params;
  std::size_t sample_n = 0;
  std::uint64_t sample_seed = 1, sample_stream = 0;
  std::string sample_output;
  auto* sample = app.add_subcommand("sample", "draw a sample and write it as CSV");
  add_param_flags(sample, sample_params);
  sample->get_option("--alpha")->required();
  sample->add_option("--n", sample_n, "number of observations")->required();
  sample->add_option("--seed", sample_seed, "generator seed");
  sample->add_option("--stream", sample_stream, "substream index");
  sample->add_option("--output,-o", sample_output, "output CSV (default: stdout)");

  ParamFlags check_params;
  std::size_t check_draws = 1000000;
  std::uint64_t check_seed = 1;
  std::string check_output;
  bool check_corrupt = false;
  auto* check = app.add_subcommand("moments-check", "compare the moment catalog with simulation");
  add_param_flags(check, check_params);
  check->get_option("--alpha")->required();
  check->add_option("--draws", check_draws, "simulated observations");
  check->add_option("--seed", check_seed, "generator seed");
  check->add_option("--output,-o", check_output, "report CSV (default: stdout)");
  check->add_flag("--corrupt", check_corrupt)->group("");

  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "bias, variance and RMSE over a parameter grid");
  add_sweep_flags(sweep, sweep_flags, true);

  SweepFlags avar_flags;
  auto* avar_cmd = app.add_subcommand("avar", "analytic asymptotic variances over a grid");
  add_sweep_flags(avar_cmd, avar_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*fit) {
      return cmd_fit(fit_params, fit_method, fit_input, fit_unbiased, fit_renormalize, solver, out);
    }
    if (*sample) return cmd_sample(sample_params, sample_n, sample_seed, sample_stream, sample_output, out);
    if (*check) {
      return cmd_moments_check(check_params, check_draws, check_seed, check_output, check_corrupt,
                               out, err);
    }
    if (*sweep) return cmd_sweep(sweep_flags, out);
    if (*avar_cmd) return cmd_avar(avar_flags, out);
  } catch (const std::invalid_argument& e) {
    // SampleError, ParameterError, ConfigError, CatalogError.
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInputError;
}

}  // namespace momentest::cli
