#include "momentest/moments.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "momentest/error.hpp"
#include "momentest/specialfn.hpp"

namespace momentest {
namespace {

using specialfn::PolyOrder;

double Psi(double a, double b) { return specialfn::digamma_diff(a, b); }
double Psi1(double a, double b) { return specialfn::polygamma_diff(PolyOrder{1}, a, b); }
double psi(double x) { return specialfn::digamma(x); }
double psi1(double x) { return specialfn::trigamma(x); }

constexpr double kLogSpaceThreshold = 30.0;

// prod_r (a + r) over the numerator terms divided by the same over the
// denominator, in log space once the denominator grows past the threshold.
double rising_ratio(std::initializer_list<std::pair<double, unsigned>> numerator,
                    double denominator, unsigned denominator_power) {
  if (denominator + denominator_power > kLogSpaceThreshold) {
    double log_value = 0.0;
    for (auto [a, m] : numerator) {
      for (unsigned r = 0; r < m; ++r) log_value += std::log(a + r);
    }
    for (unsigned r = 0; r < denominator_power; ++r) log_value -= std::log(denominator + r);
    return std::exp(log_value);
  }
  double value = 1.0;
  for (auto [a, m] : numerator) value *= rising_factorial(a, m);
  return value / rising_factorial(denominator, denominator_power);
}

MomentId make(MomentKind kind, std::size_t i = 0, std::size_t j = 0, unsigned m = 1,
              unsigned mi = 1, unsigned mj = 1) {
  return MomentId{kind, i, j, m, mi, mj};
}

bool two_index(MomentKind kind) {
  switch (kind) {
    case MomentKind::dir_cross_power:
    case MomentKind::dir_x_log_other:
    case MomentKind::dir_xx_log:
    case MomentKind::dir_log_log:
    case MomentKind::dir_x_log_log:
    case MomentKind::dir_xx_log_log:
    case MomentKind::dir_cov_x_x:
    case MomentKind::dir_cov_x_x2_other:
    case MomentKind::dir_cov_x2_x2:
    case MomentKind::dir_cov_x_log_other:
    case MomentKind::dir_cov_log_log:
    case MomentKind::dir_cov_x_xlog_other:
    case MomentKind::dir_cov_log_xlog_other:
      return true;
    default:
      return false;
  }
}

bool has_index(MomentKind kind) {
  return kind != MomentKind::mg_xk_mean && kind != MomentKind::mg_xk_square &&
         kind != MomentKind::mg_var_xk;
}

Monomial single(std::size_t i, unsigned p, unsigned q) { return Monomial{{{i, p, q}}, 0}; }

Monomial normalized(Monomial m) {
  std::sort(m.factors.begin(), m.factors.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  std::vector<Monomial::Factor> merged;
  for (const auto& f : m.factors) {
    if (!merged.empty() && merged.back().index == f.index) {
      merged.back().power += f.power;
      merged.back().log_power += f.log_power;
    } else {
      merged.push_back(f);
    }
  }
  std::erase_if(merged, [](const auto& f) { return f.power == 0 && f.log_power == 0; });
  m.factors = std::move(merged);
  return m;
}

std::optional<MomentId> dirichlet_single_id(const Monomial::Factor& f) {
  const std::size_t i = f.index;
  const auto shape = std::pair{f.power, f.log_power};
  if (f.log_power == 0 && f.power >= 1) return make(MomentKind::dir_power, i, 0, f.power);
  if (shape == std::pair{0u, 1u}) return make(MomentKind::dir_log, i);
  if (shape == std::pair{1u, 1u}) return make(MomentKind::dir_x_log, i);
  if (shape == std::pair{2u, 1u}) return make(MomentKind::dir_x2_log, i);
  if (shape == std::pair{1u, 2u}) return make(MomentKind::dir_x_log2, i);
  if (shape == std::pair{2u, 2u}) return make(MomentKind::dir_x2_log2, i);
  if (shape == std::pair{0u, 2u}) return make(MomentKind::dir_log2, i);
  return std::nullopt;
}

std::optional<MomentId> dirichlet_pair_id(const Monomial::Factor& a, const Monomial::Factor& b) {
  using P = std::pair<unsigned, unsigned>;
  const P pa{a.power, a.log_power};
  const P pb{b.power, b.log_power};
  if (a.log_power == 0 && b.log_power == 0 && a.power >= 1 && b.power >= 1) {
    return make(MomentKind::dir_cross_power, a.index, b.index, 1, a.power, b.power);
  }
  if (pa == P{1, 0} && pb == P{0, 1}) return make(MomentKind::dir_x_log_other, a.index, b.index);
  if (pa == P{1, 0} && pb == P{1, 1}) return make(MomentKind::dir_xx_log, a.index, b.index);
  if (pa == P{0, 1} && pb == P{0, 1}) return make(MomentKind::dir_log_log, a.index, b.index);
  if (pa == P{1, 1} && pb == P{0, 1}) return make(MomentKind::dir_x_log_log, a.index, b.index);
  if (pa == P{1, 1} && pb == P{1, 1}) return make(MomentKind::dir_xx_log_log, a.index, b.index);
  return std::nullopt;
}

std::optional<MomentId> dirichlet_id_of(const Monomial& raw) {
  const Monomial m = normalized(raw);
  if (m.xk_power != 0) return std::nullopt;
  if (m.factors.size() == 1) return dirichlet_single_id(m.factors[0]);
  if (m.factors.size() == 2) {
    if (auto id = dirichlet_pair_id(m.factors[0], m.factors[1])) return id;
    return dirichlet_pair_id(m.factors[1], m.factors[0]);
  }
  return std::nullopt;
}

std::optional<MomentId> mgamma_single_id(const Monomial::Factor& f) {
  switch (f.log_power) {
    case 0:
      if (f.power >= 1) return make(MomentKind::mg_z_power, f.index, 0, f.power);
      return std::nullopt;
    case 1:
      return make(MomentKind::mg_z_power_log, f.index, 0, f.power);
    case 2:
      return make(MomentKind::mg_z_power_log2, f.index, 0, f.power);
    default:
      return std::nullopt;
  }
}

std::string monomial_name(const Monomial& raw, char letter) {
  const Monomial m = normalized(raw);
  std::string out;
  auto append = [&out](const std::string& part) {
    if (!out.empty()) out += '*';
    out += part;
  };
  for (const auto& f : m.factors) {
    const std::string coord = std::string(1, letter) + std::to_string(f.index + 1);
    if (f.power > 0) append(coord + (f.power > 1 ? "^" + std::to_string(f.power) : ""));
    if (f.log_power > 0) {
      append("log" + coord + (f.log_power > 1 ? "^" + std::to_string(f.log_power) : ""));
    }
  }
  if (m.xk_power > 0) append("Xk" + (m.xk_power > 1 ? "^" + std::to_string(m.xk_power) : ""));
  return out.empty() ? "1" : out;
}

void require_family(const MomentId& id, Family family, bool covariance) {
  if (id.family() != family) {
    throw CatalogError(to_string(id) + " does not belong to the " +
                       std::string(to_string(family)) + " catalog");
  }
  if (id.is_covariance() != covariance) {
    throw CatalogError(to_string(id) + (covariance ? " is not a covariance entry"
                                                   : " is not a raw moment entry"));
  }
}

}  // namespace

double rising_factorial(double a, unsigned m) {
  double value = 1.0;
  for (unsigned r = 0; r < m; ++r) value *= a + r;
  return value;
}

Family MomentId::family() const noexcept {
  return kind < MomentKind::mg_z_power ? Family::dirichlet : Family::mgamma;
}

bool MomentId::is_covariance() const noexcept {
  return (kind >= MomentKind::dir_var_power && kind < MomentKind::mg_z_power) ||
         kind >= MomentKind::mg_var_z;
}

void MomentId::validate(std::size_t k) const {
  if (family() == Family::dirichlet && k < 2) {
    throw CatalogError("Dirichlet catalog requires k >= 2");
  }
  if (has_index(kind) && i >= k) throw CatalogError(to_string(*this) + ": index out of range");
  if (two_index(kind)) {
    if (j >= k) throw CatalogError(to_string(*this) + ": index out of range");
    if (i == j) throw CatalogError(to_string(*this) + ": requires i != j");
  }
  switch (kind) {
    case MomentKind::dir_power:
    case MomentKind::dir_var_power:
    case MomentKind::mg_z_power:
      if (m < 1) throw CatalogError(to_string(*this) + ": power must be at least 1");
      break;
    case MomentKind::dir_cross_power:
      if (mi < 1 || mj < 1) throw CatalogError(to_string(*this) + ": powers must be at least 1");
      break;
    default:
      break;
  }
}

std::string to_string(const MomentId& id) {
  const char letter = id.family() == Family::dirichlet ? 'X' : 'Z';
  if (!id.is_covariance()) return "E[" + monomial_name(monomial_of(id), letter) + "]";
  const auto [u, v] = covariance_operands(id);
  const std::string nu = monomial_name(monomial_of(u), letter);
  if (u == v) return "V[" + nu + "]";
  return "C[" + nu + "," + monomial_name(monomial_of(v), letter) + "]";
}

PrintedForm printed_form_status(MomentKind kind) noexcept {
  switch (kind) {
    case MomentKind::dir_cov_x_x2:
    case MomentKind::dir_cov_x_log:
    case MomentKind::dir_cov_x_xlog:
    case MomentKind::dir_cov_log_xlog:
      return PrintedForm::interpreted;
    case MomentKind::mg_cov_z_zlog_z:
      return PrintedForm::suspected_typo;
    default:
      return PrintedForm::exact;
  }
}

double Monomial::evaluate(std::span<const double> x, std::span<const double> log_x,
                          double xk) const {
  double value = 1.0;
  for (const auto& f : factors) {
    for (unsigned p = 0; p < f.power; ++p) value *= x[f.index];
    for (unsigned q = 0; q < f.log_power; ++q) value *= log_x[f.index];
  }
  for (unsigned p = 0; p < xk_power; ++p) value *= xk;
  return value;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial out = a;
  out.factors.insert(out.factors.end(), b.factors.begin(), b.factors.end());
  out.xk_power += b.xk_power;
  return normalized(std::move(out));
}

Monomial monomial_of(const MomentId& id) {
  const std::size_t i = id.i;
  const std::size_t j = id.j;
  switch (id.kind) {
    case MomentKind::dir_power: return single(i, id.m, 0);
    case MomentKind::dir_cross_power: return Monomial{{{i, id.mi, 0}, {j, id.mj, 0}}, 0};
    case MomentKind::dir_log: return single(i, 0, 1);
    case MomentKind::dir_x_log: return single(i, 1, 1);
    case MomentKind::dir_x_log_other: return Monomial{{{i, 1, 0}, {j, 0, 1}}, 0};
    case MomentKind::dir_xx_log: return Monomial{{{i, 1, 0}, {j, 1, 1}}, 0};
    case MomentKind::dir_log_log: return Monomial{{{i, 0, 1}, {j, 0, 1}}, 0};
    case MomentKind::dir_x_log_log: return Monomial{{{i, 1, 1}, {j, 0, 1}}, 0};
    case MomentKind::dir_xx_log_log: return Monomial{{{i, 1, 1}, {j, 1, 1}}, 0};
    case MomentKind::dir_x2_log: return single(i, 2, 1);
    case MomentKind::dir_x_log2: return single(i, 1, 2);
    case MomentKind::dir_x2_log2: return single(i, 2, 2);
    case MomentKind::dir_log2: return single(i, 0, 2);
    case MomentKind::mg_z_power: return single(i, id.m, 0);
    case MomentKind::mg_z_power_log: return single(i, id.m, 1);
    case MomentKind::mg_z_power_log2: return single(i, id.m, 2);
    case MomentKind::mg_xk_mean: return Monomial{{}, 1};
    case MomentKind::mg_xk_square: return Monomial{{}, 2};
    default:
      throw CatalogError("covariance entries have no single monomial");
  }
}

std::pair<MomentId, MomentId> covariance_operands(const MomentId& id) {
  using K = MomentKind;
  const std::size_t i = id.i;
  const std::size_t j = id.j;
  switch (id.kind) {
    case K::dir_var_power: return {make(K::dir_power, i, 0, id.m), make(K::dir_power, i, 0, id.m)};
    case K::dir_var_log: return {make(K::dir_log, i), make(K::dir_log, i)};
    case K::dir_cov_x_x: return {make(K::dir_power, i), make(K::dir_power, j)};
    case K::dir_cov_x_x2: return {make(K::dir_power, i), make(K::dir_power, i, 0, 2)};
    case K::dir_cov_x_x2_other: return {make(K::dir_power, i), make(K::dir_power, j, 0, 2)};
    case K::dir_cov_x2_x2: return {make(K::dir_power, i, 0, 2), make(K::dir_power, j, 0, 2)};
    case K::dir_cov_x_log: return {make(K::dir_power, i), make(K::dir_log, i)};
    case K::dir_cov_x_log_other: return {make(K::dir_power, i), make(K::dir_log, j)};
    case K::dir_cov_log_log: return {make(K::dir_log, i), make(K::dir_log, j)};
    case K::dir_cov_x_xlog: return {make(K::dir_power, i), make(K::dir_x_log, i)};
    case K::dir_cov_x_xlog_other: return {make(K::dir_power, i), make(K::dir_x_log, j)};
    case K::dir_cov_log_xlog: return {make(K::dir_log, i), make(K::dir_x_log, i)};
    case K::dir_cov_log_xlog_other: return {make(K::dir_log, i), make(K::dir_x_log, j)};
    case K::mg_var_z: return {make(K::mg_z_power, i), make(K::mg_z_power, i)};
    case K::mg_var_z2: return {make(K::mg_z_power, i, 0, 2), make(K::mg_z_power, i, 0, 2)};
    case K::mg_var_log_z:
      return {make(K::mg_z_power_log, i, 0, 0), make(K::mg_z_power_log, i, 0, 0)};
    case K::mg_var_zlog_z: return {make(K::mg_z_power_log, i), make(K::mg_z_power_log, i)};
    case K::mg_cov_z_z2: return {make(K::mg_z_power, i), make(K::mg_z_power, i, 0, 2)};
    case K::mg_cov_z_log_z: return {make(K::mg_z_power, i), make(K::mg_z_power_log, i, 0, 0)};
    case K::mg_cov_z_zlog_z: return {make(K::mg_z_power, i), make(K::mg_z_power_log, i)};
    case K::mg_cov_log_z_zlog_z:
      return {make(K::mg_z_power_log, i, 0, 0), make(K::mg_z_power_log, i)};
    case K::mg_var_xk: return {make(K::mg_xk_mean), make(K::mg_xk_mean)};
    default:
      throw CatalogError("raw moment entries have no covariance operands");
  }
}

// ---------------------------------------------------------------------------
// Dirichlet

DirichletBasicMoments dirichlet_basic_moments(const DirichletParams& params, std::size_t i) {
  if (i >= params.k()) throw CatalogError("index out of range");
  const double a = params.alpha(i);
  const double a0 = params.alpha0();
  return {
      a / a0,
      a * (a0 - a) / (a0 * a0 * (a0 + 1.0)),
      Psi(a, a0),
      (a0 - a) / (a0 * a0),
  };
}

double dirichlet_raw_moment(const DirichletParams& params, const MomentId& id) {
  require_family(id, Family::dirichlet, false);
  id.validate(params.k());
  const double a0 = params.alpha0();
  const double ai = params.alpha(id.i);
  const double aj = two_index(id.kind) ? params.alpha(id.j) : 0.0;
  const double pair = ai * aj / (a0 * (a0 + 1.0));
  const double sq = ai * (ai + 1.0) / (a0 * (a0 + 1.0));
  switch (id.kind) {
    case MomentKind::dir_power:
      return rising_ratio({{ai, id.m}}, a0, id.m);
    case MomentKind::dir_cross_power:
      return rising_ratio({{ai, id.mi}, {aj, id.mj}}, a0, id.mi + id.mj);
    case MomentKind::dir_log:
      return Psi(ai, a0);
    case MomentKind::dir_x_log:
      return ai / a0 * Psi(ai + 1.0, a0 + 1.0);
    case MomentKind::dir_x_log_other:
      return ai / a0 * Psi(aj, a0 + 1.0);
    case MomentKind::dir_xx_log:
      return pair * Psi(aj + 1.0, a0 + 2.0);
    case MomentKind::dir_log_log:
      return Psi(ai, a0) * Psi(aj, a0) - psi1(a0);
    case MomentKind::dir_x_log_log:
      return ai / a0 * (Psi(ai + 1.0, a0 + 1.0) * Psi(aj, a0 + 1.0) - psi1(a0 + 1.0));
    case MomentKind::dir_xx_log_log:
      return pair * (Psi(ai + 1.0, a0 + 2.0) * Psi(aj + 1.0, a0 + 2.0) - psi1(a0 + 2.0));
    case MomentKind::dir_x2_log:
      return sq * Psi(ai + 2.0, a0 + 2.0);
    case MomentKind::dir_x_log2: {
      const double d = Psi(ai + 1.0, a0 + 1.0);
      return ai / a0 * (d * d + Psi1(ai + 1.0, a0 + 1.0));
    }
    case MomentKind::dir_x2_log2: {
      const double d = Psi(ai + 2.0, a0 + 2.0);
      return sq * (d * d + Psi1(ai + 2.0, a0 + 2.0));
    }
    case MomentKind::dir_log2: {
      const double d = Psi(ai, a0);
      return d * d + Psi1(ai, a0);
    }
    default:
      throw CatalogError("unsupported Dirichlet raw moment " + to_string(id));
  }
}

double dirichlet_covariance_printed(const DirichletParams& params, const MomentId& id) {
  require_family(id, Family::dirichlet, true);
  id.validate(params.k());
  const double a0 = params.alpha0();
  const double ai = params.alpha(id.i);
  const double aj = two_index(id.kind) ? params.alpha(id.j) : 0.0;
  const double bi = a0 - ai;
  const double a02 = a0 * a0;
  switch (id.kind) {
    case MomentKind::dir_var_power: {
      const double first = rising_ratio({{ai, 2 * id.m}}, a0, 2 * id.m);
      const double second = rising_ratio({{ai, id.m}}, a0, id.m);
      return first - second * second;
    }
    case MomentKind::dir_var_log:
      return Psi1(ai, a0);
    case MomentKind::dir_cov_x_x:
      return -ai * aj / (a02 * (a0 + 1.0));
    case MomentKind::dir_cov_x_x2:
      return 2.0 * ai * bi * (ai + 1.0) / (a02 * (a0 + 1.0) * (a0 + 2.0));
    case MomentKind::dir_cov_x_x2_other:
      return -2.0 * ai * aj * (aj + 1.0) / (a02 * (a0 + 1.0) * (a0 + 2.0));
    case MomentKind::dir_cov_x2_x2:
      return -2.0 * ai * (ai + 1.0) * aj * (aj + 1.0) * (2.0 * a0 + 3.0) /
             (a02 * (a0 + 1.0) * (a0 + 1.0) * (a0 + 2.0) * (a0 + 3.0));
    case MomentKind::dir_cov_x_log:
      return bi / a02;
    case MomentKind::dir_cov_x_log_other:
      return -ai / a02;
    case MomentKind::dir_cov_log_log:
      return -psi1(a0);
    case MomentKind::dir_cov_x_xlog:
      return ai * bi / (a02 * (a0 + 1.0)) * (Psi(ai + 1.0, a0 + 2.0) + 1.0);
    case MomentKind::dir_cov_x_xlog_other:
      return -ai * aj / (a02 * (a0 + 1.0)) * (Psi(aj + 1.0, a0 + 2.0) + 1.0);
    case MomentKind::dir_cov_log_xlog:
      return bi / a02 * Psi(ai + 1.0, a0 + 1.0) + ai / a0 * Psi1(ai + 1.0, a0 + 1.0);
    case MomentKind::dir_cov_log_xlog_other:
      return -aj / a02 * Psi(aj + 1.0, a0 + 1.0) - aj / a0 * psi1(a0 + 1.0);
    default:
      throw CatalogError("unsupported Dirichlet covariance " + to_string(id));
  }
}

double expectation(const DirichletParams& params, const Monomial& m) {
  const auto id = dirichlet_id_of(m);
  if (!id) {
    throw CatalogError("E[" + monomial_name(m, 'X') + "] is not in the Dirichlet catalog");
  }
  return dirichlet_raw_moment(params, *id);
}

double covariance_from_raw(const DirichletParams& params, const MomentId& u, const MomentId& v) {
  require_family(u, Family::dirichlet, false);
  require_family(v, Family::dirichlet, false);
  const Monomial mu = monomial_of(u);
  const Monomial mv = monomial_of(v);
  return expectation(params, mu * mv) - dirichlet_raw_moment(params, u) * dirichlet_raw_moment(params, v);
}

double dirichlet_covariance(const DirichletParams& params, const MomentId& id) {
  require_family(id, Family::dirichlet, true);
  id.validate(params.k());
  const auto [u, v] = covariance_operands(id);
  return covariance_from_raw(params, u, v);
}

// ---------------------------------------------------------------------------
// Multivariate Gamma

MGammaBasicMoments mgamma_basic_moments(const MGammaParams& params, std::size_t i) {
  if (i >= params.k()) throw CatalogError("index out of range");
  const double a = params.alpha(i);
  const double b = params.beta();
  return {
      params.alpha0() * b,
      params.alpha0() * b * b,
      a * b,
      a * b * b,
      psi(a) + std::log(b),
      b,
  };
}

double mgamma_raw_moment(const MGammaParams& params, const MomentId& id) {
  require_family(id, Family::mgamma, false);
  id.validate(params.k());
  const double b = params.beta();
  const double log_b = std::log(b);
  if (id.kind == MomentKind::mg_xk_mean) return params.alpha0() * b;
  if (id.kind == MomentKind::mg_xk_square) {
    return params.alpha0() * (params.alpha0() + 1.0) * b * b;
  }
  const double a = params.alpha(id.i);
  const double scale = std::pow(b, static_cast<double>(id.m)) * rising_factorial(a, id.m);
  switch (id.kind) {
    case MomentKind::mg_z_power:
      return scale;
    case MomentKind::mg_z_power_log:
      return scale * (psi(a + id.m) + log_b);
    case MomentKind::mg_z_power_log2: {
      const double d = psi(a + id.m) + log_b;
      return scale * (psi1(a + id.m) + d * d);
    }
    default:
      throw CatalogError("unsupported Multivariate Gamma raw moment " + to_string(id));
  }
}

double mgamma_covariance_printed(const MGammaParams& params, const MomentId& id) {
  require_family(id, Family::mgamma, true);
  id.validate(params.k());
  const double b = params.beta();
  const double log_b = std::log(b);
  if (id.kind == MomentKind::mg_var_xk) return params.alpha0() * b * b;
  const double a = params.alpha(id.i);
  const double b2 = b * b;
  const double l0 = psi(a) + log_b;
  const double l1 = psi(a + 1.0) + log_b;
  const double l2 = psi(a + 2.0) + log_b;
  switch (id.kind) {
    case MomentKind::mg_var_z:
      return a * b2;
    case MomentKind::mg_var_z2:
      return 2.0 * a * (a + 1.0) * (2.0 * a + 3.0) * b2 * b2;
    case MomentKind::mg_var_log_z:
      return psi1(a);
    case MomentKind::mg_var_zlog_z:
      return a * (a + 1.0) * b2 * (psi1(a + 2.0) + l2 * l2) - a * a * b2 * l1 * l1;
    case MomentKind::mg_cov_z_z2:
      return 2.0 * a * (a + 1.0) * b2 * b;
    case MomentKind::mg_cov_z_log_z:
      return b;
    case MomentKind::mg_cov_z_zlog_z:
      // As printed, including the squared first bracket.
      return a * (a + 1.0) * b2 * l2 * l2 - a * a * b2 * l1;
    case MomentKind::mg_cov_log_z_zlog_z:
      return a * b * (psi1(a + 1.0) + l1 * l1) - a * b * l0 * l1;
    default:
      throw CatalogError("unsupported Multivariate Gamma covariance " + to_string(id));
  }
}

double expectation(const MGammaParams& params, const Monomial& raw) {
  const Monomial m = normalized(raw);
  if (m.xk_power == 0) {
    double value = 1.0;
    for (const auto& f : m.factors) {
      const auto id = mgamma_single_id(f);
      if (!id) {
        throw CatalogError("E[" + monomial_name(single(f.index, f.power, f.log_power), 'Z') +
                           "] is not in the Multivariate Gamma catalog");
      }
      value *= mgamma_raw_moment(params, *id);
    }
    return value;
  }
  if (m.factors.empty() && m.xk_power <= 2) {
    return mgamma_raw_moment(
        params, make(m.xk_power == 1 ? MomentKind::mg_xk_mean : MomentKind::mg_xk_square));
  }
  if (m.xk_power == 1) {
    Monomial rest = m;
    rest.xk_power = 0;
    double value = 0.0;
    for (std::size_t j = 0; j < params.k(); ++j) value += expectation(params, rest * single(j, 1, 0));
    return value;
  }
  throw CatalogError("E[" + monomial_name(m, 'Z') + "] is not in the Multivariate Gamma catalog");
}

double covariance_from_raw(const MGammaParams& params, const MomentId& u, const MomentId& v) {
  require_family(u, Family::mgamma, false);
  require_family(v, Family::mgamma, false);
  return expectation(params, monomial_of(u) * monomial_of(v)) -
         mgamma_raw_moment(params, u) * mgamma_raw_moment(params, v);
}

double mgamma_covariance(const MGammaParams& params, const MomentId& id) {
  require_family(id, Family::mgamma, true);
  id.validate(params.k());
  const auto [u, v] = covariance_operands(id);
  return covariance_from_raw(params, u, v);
}

// ---------------------------------------------------------------------------
// Enumeration

std::vector<MomentId> dirichlet_catalog_at(std::size_t k, std::size_t i, std::size_t j) {
  using K = MomentKind;
  if (k < 2 || i >= k || j >= k || i == j) throw CatalogError("invalid catalog coordinates");
  std::vector<MomentId> ids;
  for (unsigned m = 1; m <= 4; ++m) ids.push_back(make(K::dir_power, i, 0, m));
  for (unsigned mi = 1; mi <= 2; ++mi) {
    for (unsigned mj = 1; mj <= 2; ++mj) ids.push_back(make(K::dir_cross_power, i, j, 1, mi, mj));
  }
  for (K kind : {K::dir_log, K::dir_x_log, K::dir_x2_log, K::dir_x_log2, K::dir_x2_log2, K::dir_log2}) {
    ids.push_back(make(kind, i));
  }
  for (K kind : {K::dir_x_log_other, K::dir_xx_log, K::dir_log_log, K::dir_x_log_log,
                 K::dir_xx_log_log}) {
    ids.push_back(make(kind, i, j));
  }
  for (unsigned m = 1; m <= 2; ++m) ids.push_back(make(K::dir_var_power, i, 0, m));
  for (K kind : {K::dir_var_log, K::dir_cov_x_x2, K::dir_cov_x_log, K::dir_cov_x_xlog,
                 K::dir_cov_log_xlog}) {
    ids.push_back(make(kind, i));
  }
  for (K kind : {K::dir_cov_x_x, K::dir_cov_x_x2_other, K::dir_cov_x2_x2, K::dir_cov_x_log_other,
                 K::dir_cov_log_log, K::dir_cov_x_xlog_other, K::dir_cov_log_xlog_other}) {
    ids.push_back(make(kind, i, j));
  }
  return ids;
}

std::vector<MomentId> dirichlet_catalog(std::size_t k) {
  using K = MomentKind;
  if (k < 2) throw CatalogError("Dirichlet catalog requires k >= 2");
  auto symmetric = [](K kind) {
    return kind == K::dir_log_log || kind == K::dir_xx_log_log || kind == K::dir_cov_x_x ||
           kind == K::dir_cov_x2_x2 || kind == K::dir_cov_log_log;
  };
  std::vector<MomentId> ids;
  for (std::size_t i = 0; i < k; ++i) {
    for (const MomentId& id : dirichlet_catalog_at(k, i, (i + 1) % k)) {
      if (!two_index(id.kind)) ids.push_back(id);
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      for (const MomentId& id : dirichlet_catalog_at(k, i, j)) {
        if (!two_index(id.kind)) continue;
        if (id.kind == K::dir_cross_power) {
          if (i < j) ids.push_back(id);
          continue;
        }
        if (symmetric(id.kind) && i > j) continue;
        ids.push_back(id);
      }
    }
  }
  return ids;
}

std::vector<MomentId> mgamma_catalog_at(std::size_t k, std::size_t i) {
  using K = MomentKind;
  if (k < 1 || i >= k) throw CatalogError("invalid catalog coordinates");
  std::vector<MomentId> ids;
  for (unsigned m = 1; m <= 4; ++m) ids.push_back(make(K::mg_z_power, i, 0, m));
  for (unsigned m = 0; m <= 2; ++m) ids.push_back(make(K::mg_z_power_log, i, 0, m));
  for (unsigned m = 0; m <= 2; ++m) ids.push_back(make(K::mg_z_power_log2, i, 0, m));
  for (K kind : {K::mg_var_z, K::mg_var_z2, K::mg_var_log_z, K::mg_var_zlog_z, K::mg_cov_z_z2,
                 K::mg_cov_z_log_z, K::mg_cov_z_zlog_z, K::mg_cov_log_z_zlog_z}) {
    ids.push_back(make(kind, i));
  }
  return ids;
}

std::vector<MomentId> mgamma_catalog(std::size_t k) {
  std::vector<MomentId> ids;
  for (std::size_t i = 0; i < k; ++i) {
    auto at = mgamma_catalog_at(k, i);
    ids.insert(ids.end(), at.begin(), at.end());
  }
  ids.push_back(make(MomentKind::mg_xk_mean));
  ids.push_back(make(MomentKind::mg_xk_square));
  ids.push_back(make(MomentKind::mg_var_xk));
  return ids;
}

}  // namespace momentest
