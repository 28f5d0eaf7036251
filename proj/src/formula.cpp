#include "nslog/formula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nslog/error.hpp"

namespace nslog::formula {

namespace {

constexpr double kE = std::numbers::e;

void require_s_open(double s, const char* who) {
  if (!(s > 0.5 && s < 1.0)) {
    std::ostringstream os;
    os << who << ": s must lie in (1/2, 1), got " << s;
    throw DomainError(os.str());
  }
}

void require_q(double q, const char* who) {
  if (!(q > 3.0) || !std::isfinite(q)) {
    std::ostringstream os;
    os << who << ": q must exceed 3, got " << q;
    throw DomainError(os.str());
  }
}

double factorial(std::size_t j) {
  double f = 1.0;
  for (std::size_t i = 2; i <= j; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace

LogLadderParams LogLadderParams::with_deltas(std::vector<double> deltas) {
  LogLadderParams p;
  p.cs.assign(deltas.size(), 1.0);
  p.deltas = std::move(deltas);
  return p;
}

LogLadderParams LogLadderParams::prefix(std::size_t n) const {
  LogLadderParams p = *this;
  n = std::min(n, deltas.size());
  p.deltas.resize(n);
  p.cs.resize(std::min(n, cs.size()));
  return p;
}

void LogLadderParams::validate() const {
  if (deltas.size() != cs.size())
    throw DomainError("ladder: deltas and cs must have the same length");
  for (double d : deltas)
    if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("ladder: every delta_j must be >= 0");
  for (double c : cs)
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("ladder: every c_j must be > 0");
  if (!(c0 > 0.0)) throw DomainError("ladder: c0 must be > 0");
  if (!(c3 > 0.0)) throw DomainError("ladder: c3 must be > 0");
}

double nested_log(int j, double x) {
  if (j < 0) throw DomainError("nested_log: level must be non-negative");
  if (j == 0) return x;
  if (!(x >= 0.0)) throw DomainError("nested_log: x must be non-negative for j >= 1");
  double v = x;
  for (int i = 0; i < j; ++i) v = std::log(kE + v);
  return v;
}

double log_weight(double x, const LogLadderParams& params) {
  if (!(x >= 0.0)) throw DomainError("log_weight: x must be non-negative");
  double w = 1.0;
  double level = x;
  for (double delta : params.deltas) {
    level = std::log(kE + level);
    if (delta != 0.0) w *= std::pow(1.0 + level, delta);
  }
  return w;
}

CommutatorFactors commutator_factors(double z, const LogLadderParams& params) {
  if (params.n() < 1) throw DomainError("commutator_factors: ladder needs n >= 1");
  if (!(z >= 0.0)) throw DomainError("commutator_factors: z must be non-negative");
  const double l1 = std::log(kE + z);
  double prod = 1.0;
  double level = l1;
  for (std::size_t j = 1; j < params.n(); ++j) {
    level = std::log(kE + level);
    prod *= std::pow(1.0 + level, params.deltas[j]);
  }
  return {l1 / prod, prod / l1};
}

double scaling_exponent(double s, double q) {
  const double rhs = 2.0 * s - 1.0 - 3.0 / q;
  if (std::abs(rhs) <= 1e-14) return std::numeric_limits<double>::infinity();
  return 2.0 / rhs;
}

ExponentPack exponent_pack(double s, double q, double eta) {
  require_s_open(s, "exponent_pack");
  require_q(q, "exponent_pack");
  if (!(eta >= 0.0)) throw DomainError("exponent_pack: eta must be >= 0");
  ExponentPack e;
  e.s = s;
  e.q = q;
  e.eta = eta;
  e.theta = 1.5 * q / (3.0 * q - 2.0);
  e.alpha_gn = 1.5 * (0.5 - 1.0 / q);
  e.beta_ode = e.theta * (1.0 - e.alpha_gn) / (2.0 - e.theta * e.alpha_gn);
  e.mu = e.beta_ode + eta;
  e.gamma_decay = 1.0 / (2.0 * e.mu);
  e.p_scaling = scaling_exponent(s, q);
  e.p_admissible = e.p_scaling > 0.0;
  e.delta01 = std::min((q - 3.0) / (6.0 * q), (2.0 * s - 1.0) / (4.0 * s));
  return e;
}

double alpha_threshold(const LogLadderParams& params) {
  double sum = 0.0;
  for (std::size_t j = 0; j < params.n(); ++j) {
    const double c = j < params.cs.size() ? params.cs[j] : 1.0;
    sum += c * params.deltas[j] / factorial(j + 1);
  }
  return 1.0 / (1.0 + sum);
}

double threshold_asymptote(double s, double cq, const LogLadderParams& params) {
  if (!(s > 0.5)) throw DomainError("threshold_asymptote: s must exceed 1/2");
  if (!(s < 1.0)) throw DomainError("threshold_asymptote: s must be below 1");
  return cq * std::pow(s - 0.5, alpha_threshold(params));
}

std::optional<std::size_t> pathway_level(double s, const LogLadderParams& params) {
  require_s_open(s, "pathway_level");
  const double log_inv = std::log(1.0 / (s - 0.5));
  if (!(log_inv > 0.0)) throw DomainError("pathway_level: 1/ln(1/(s-1/2)) is not positive");
  const double target = 1.0 / log_inv;
  double sum = 0.0;
  for (std::size_t j = 0; j < params.n(); ++j) {
    const double c = j < params.cs.size() ? params.cs[j] : 1.0;
    sum += c * params.deltas[j] / factorial(j + 1);
    if (1.0 / (1.0 + sum) < target) return j + 1;
  }
  return std::nullopt;
}

BlowupExponents blowup_exponents(double s, double q, const LogLadderParams& params) {
  const ExponentPack pack = exponent_pack(s, q, 0.0);
  const double theta = pack.theta;
  const double alpha = pack.alpha_gn;
  const double beta = pack.beta_ode;
  BlowupExponents b{};
  b.grad_exp_beta_form = (1.0 + beta) / (2.0 * beta);
  b.grad_exp_explicit_form = (2.0 - theta * alpha) / (2.0 * theta * (1.0 - alpha));
  double vel = 0.0, fil = 0.0, align = 0.0, dim = 0.0;
  for (std::size_t j = 0; j < params.n(); ++j) {
    const double d = params.deltas[j];
    vel += d / ((1.0 + d) * (2.0 + d));
    fil += d / (1.0 + d);
    align += d / (2.0 * (1.0 + d));
    dim += (d / (1.0 + d)) / static_cast<double>(j + 2);
  }
  b.velocity_exp = 0.5 - vel;
  b.filament_exp = 0.5 + fil;
  b.alignment_exp = align;
  b.singular_dim = std::max(0.0, 1.0 - dim);
  return b;
}

ExceptionalGeometry exceptional_geometry(double eps, const LogLadderParams& params) {
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("exceptional_geometry: eps must lie in (0, 1]");
  const double x = 1.0 / eps;
  double sum = 0.0;
  double log_theta = 0.0;
  double prev = x;  // L_{j-1}(1/eps), starting from L_0 = identity
  for (std::size_t j = 0; j < params.n(); ++j) {
    const double level = std::log(kE + prev);  // L_j
    const double d = params.deltas[j];
    const double frac = d / (1.0 + d);
    const double jj = static_cast<double>(j + 1);
    sum += frac * prev / (1.0 + level);
    log_theta += frac / (1.0 + jj) * std::log(eps) - frac * jj / (1.0 + jj) * std::log1p(level);
    prev = level;
  }
  ExceptionalGeometry g{};
  g.dim_bound_raw = 3.0 - sum;
  g.dim_bound = std::clamp(g.dim_bound_raw, 0.0, 3.0);
  g.clamped = g.dim_bound != g.dim_bound_raw;
  g.theta_eps = std::exp(log_theta);
  return g;
}

MultifractalModel::MultifractalModel(double s, const LogLadderParams& params) {
  require_s_open(s, "multifractal_model");
  h0_ = 2.0 * s - 1.0;
  sigma2_ = (3.0 - 2.0 * s) / (2.0 * s - 1.0);
  factor_ = 1.0;
  for (double d : params.deltas) factor_ *= 1.0 / (1.0 + d);
}

double MultifractalModel::spectrum(double h) const {
  const double dh = h - h0_;
  return 3.0 - dh * dh / (2.0 * sigma2_) * factor_;
}

double MultifractalModel::zeta(double p) const { return p / 3.0 - intermittency(p); }

double MultifractalModel::intermittency(double p) const {
  return p * (p - 3.0) / 3.0 * sigma2_ * factor_;
}

double MultifractalModel::zeta_legendre(double p) const {
  return p * h0_ - p * p * sigma2_ / (2.0 * factor_);
}

double MultifractalModel::zeta_product_quadratic(double p) const {
  return p * h0_ - p * p * sigma2_ / 2.0 * factor_;
}

double MultifractalModel::zeta_legendre_numeric(double p) const {
  auto objective = [&](double h) { return p * h + 3.0 - spectrum(h); };

  // Downhill bracket search from h0 with doubling steps.
  const double dir = p >= 0.0 ? -1.0 : 1.0;
  double step = 1.0;
  double a = h0_ - dir * step;
  double b = h0_;
  double fb = objective(b);
  double c = b + dir * step;
  double fc = objective(c);
  while (fc < fb) {
    a = b;
    b = c;
    fb = fc;
    step *= 2.0;
    c = b + dir * step;
    fc = objective(c);
  }
  double lo = std::min(a, c);
  double hi = std::max(a, c);

  // Dense scan of the bracket.
  constexpr int kScan = 4000;
  double best_h = lo;
  double best = objective(lo);
  for (int i = 1; i <= kScan; ++i) {
    const double h = lo + (hi - lo) * i / kScan;
    const double v = objective(h);
    if (v < best) {
      best = v;
      best_h = h;
    }
  }
  const double cell = (hi - lo) / kScan;
  lo = best_h - cell;
  hi = best_h + cell;

  // Golden-section polish.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, std::abs(best_h)); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = objective(x2);
    }
  }
  return std::min({f1, f2, best});
}

SpectralModels::SpectralModels(SpectralModelParams model, LogLadderParams params, double s,
                               double gamma_decay)
    : model_(std::move(model)), params_(std::move(params)), s_(s), gamma_(gamma_decay) {
  if (!(s_ > 0.5)) throw DomainError("spectral_models: s must exceed 1/2");
  if (!(model_.k0 > 0.0)) throw DomainError("spectral_models: k0 must be positive");
  if (!(model_.nu > 0.0)) throw DomainError("spectral_models: nu must be positive");
}

double SpectralModels::rho(std::size_t j) const {
  if (j == 1) return (2.0 * s_ - 1.0) / (2.0 * s_);
  return 1.0 / static_cast<double>(j);
}

void SpectralModels::require_inertial(double k) const {
  if (!(k >= model_.k0)) {
    std::ostringstream os;
    os << "spectral model: k = " << k << " lies below k0 = " << model_.k0;
    throw DomainError(os.str());
  }
}

double SpectralModels::flux_weight(double k) const {
  require_inertial(k);
  double level = k / model_.k0;
  double w = 1.0;
  for (std::size_t j = 1; j <= params_.n(); ++j) {
    level = std::log(kE + level);
    w *= std::pow(1.0 + level, params_.deltas[j - 1] * rho(j));
  }
  return w;
}

double SpectralModels::flux_bound(double k) const {
  return model_.flux_c * model_.eps_rate / flux_weight(k);
}

double SpectralModels::beta_exponent(std::size_t j) const {
  const double jj = static_cast<double>(j);
  return 2.0 * gamma_ / 3.0 * jj / (jj + 1.0);
}

double SpectralModels::beta_decay(std::size_t j, double t) const {
  if (j < 1 || j > model_.beta0.size()) throw DomainError("beta_decay: level out of range");
  return model_.beta0[j - 1] / std::pow(1.0 + gamma_ * t, beta_exponent(j));
}

double SpectralModels::correction_basis(std::size_t j, double k) const {
  require_inertial(k);
  if (j < 1 || j > params_.n()) throw DomainError("correction_basis: level out of range");
  double level = k / model_.k0;
  double denom = 1.0;
  for (std::size_t i = 1; i <= j; ++i) {
    level = std::log(kE + level);
    denom *= std::pow(1.0 + level, 1.0 + params_.deltas[i - 1]);
  }
  return level / denom;
}

double SpectralModels::model_spectrum(double k, double t) const {
  require_inertial(k);
  double corr = 1.0;
  const std::size_t n = std::min(params_.n(), model_.beta0.size());
  for (std::size_t j = 1; j <= n; ++j) corr += beta_decay(j, t) * correction_basis(j, k);
  return model_.kolmogorov_c * std::pow(model_.eps_rate, 2.0 / 3.0) * std::pow(k, -5.0 / 3.0) *
         corr;
}

double SpectralModels::limiting_spectrum(double k, double t) const {
  if (!(k > 0.0)) throw DomainError("limiting_spectrum: k must be positive");
  if (!(t >= 0.0)) throw DomainError("limiting_spectrum: t must be non-negative");
  return model_.kolmogorov_c * std::pow(model_.eps_rate, 2.0 / 3.0) * std::pow(k, -5.0 / 3.0) *
         std::exp(-model_.small_c * std::sqrt(model_.nu * t) * k);
}

double SpectralModels::psi_ratio(double t) const {
  if (!(t > 0.0)) throw DomainError("psi_ratio: t must be positive");
  return std::pow(model_.nu * t, -0.25);
}

std::string to_string(DichotomyBranch b) {
  switch (b) {
    case DichotomyBranch::growth_risk:
      return "growth-risk";
    case DichotomyBranch::contracting:
      return "contracting";
    case DichotomyBranch::marginal:
      return "marginal";
  }
  return "unknown";
}

double dichotomy_phi(double lambda) {
  if (!(lambda >= 1.0)) throw DomainError("dichotomy: lambda must be >= 1");
  return 1.0 / std::sqrt(1.0 + std::log(lambda));
}

DichotomyOmega dichotomy_omega(double lambda, double s, double q, const LogLadderParams& params) {
  require_s_open(s, "dichotomy_omega");
  require_q(q, "dichotomy_omega");
  const double phi = dichotomy_phi(lambda);
  const double gamma_tilde = std::pow(s - 0.5, alpha_threshold(params));
  const double omega = params.c3 * gamma_tilde / (phi * log_weight(lambda, params));
  DichotomyBranch branch = DichotomyBranch::marginal;
  if (std::abs(omega - 1.0) > 1e-12)
    branch = omega < 1.0 ? DichotomyBranch::growth_risk : DichotomyBranch::contracting;
  return {omega, branch};
}

}  // namespace nslog::formula
