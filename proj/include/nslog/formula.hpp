#pragma once

// Closed-form evaluators for the nested-logarithm regularity theory:
// the logarithm ladder, exponent packs, thresholds, blow-up exponents,
// exceptional-set geometry, multifractal and spectral model curves.
//
// Everything here is a pure function of its arguments. Natural logarithms
// throughout.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace nslog::formula {

/// Parameters of the nested-logarithm ladder and the unnamed constants that
/// accompany it. All constants default to 1.
struct LogLadderParams {
  std::vector<double> deltas;  ///< delta_j >= 0, j = 1..n
  std::vector<double> cs;      ///< c_j > 0 (alpha-threshold constants)
  double c0 = 1.0;             ///< admissibility constant
  double c3 = 1.0;             ///< dichotomy constant

  std::size_t n() const { return deltas.size(); }

  /// Ladder with the given deltas and all c_j = 1.
  static LogLadderParams with_deltas(std::vector<double> deltas);
  /// First `n` levels of this ladder.
  LogLadderParams prefix(std::size_t n) const;
  /// Throws DomainError when the invariants are violated.
  void validate() const;

  bool operator==(const LogLadderParams&) const = default;
};

/// L_0(x) = x, L_j(x) = ln(e + L_{j-1}(x)).
double nested_log(int j, double x);

/// prod_{j=1}^n (1 + L_j(x))^{delta_j}
double log_weight(double x, const LogLadderParams& params);

struct CommutatorFactors {
  double f1;
  double f2;
};

/// F1(z) = L1(z) prod_{j>=2} (1+L_j(z))^{-delta_j}, F2(z) = 1/F1(z) in closed form.
CommutatorFactors commutator_factors(double z, const LogLadderParams& params);

struct ExponentPack {
  double s = 0;
  double q = 0;
  double theta = 0;        ///< (3/2) q/(3q-2)
  double alpha_gn = 0;     ///< (3/2)(1/2 - 1/q)
  double eta = 0;
  double mu = 0;           ///< theta(1-alpha)/(2-theta alpha) + eta
  double gamma_decay = 0;  ///< 1/(2 mu)
  double p_scaling = 0;    ///< 2/p + 3/q = 2s-1; +infinity when 3/q = 2s-1
  bool p_admissible = false;  ///< p_scaling is positive (possibly infinite)
  double delta01 = 0;      ///< min{(q-3)/(6q), (2s-1)/(4s)}
  double beta_ode = 0;     ///< theta(1-alpha)/(2-theta alpha)
};

inline constexpr double kDefaultEta = 0.01;

ExponentPack exponent_pack(double s, double q, double eta = kDefaultEta);

/// Scaling exponent p with 2/p + 3/q = 2s - 1, +infinity on the critical line.
double scaling_exponent(double s, double q);

/// alpha({delta_j}) = 1 / (1 + sum c_j delta_j / j!)
double alpha_threshold(const LogLadderParams& params);

/// cq (s - 1/2)^alpha
double threshold_asymptote(double s, double cq, const LogLadderParams& params);

/// Smallest prefix length N with alpha(prefix) < 1/ln(1/(s - 1/2)); nullopt when unreachable.
std::optional<std::size_t> pathway_level(double s, const LogLadderParams& params);

struct BlowupExponents {
  double grad_exp_beta_form;      ///< (1+beta)/(2 beta)
  double grad_exp_explicit_form;  ///< (2-theta alpha)/(2 theta (1-alpha))
  double velocity_exp;
  double filament_exp;
  double alignment_exp;
  double singular_dim;
};

BlowupExponents blowup_exponents(double s, double q, const LogLadderParams& params);

struct ExceptionalGeometry {
  double dim_bound;      ///< raw bound clamped to [0, 3]
  double dim_bound_raw;
  bool clamped;
  double theta_eps;
};

ExceptionalGeometry exceptional_geometry(double eps, const LogLadderParams& params);

/// Multifractal spectrum D(h) and structure-function exponents.
class MultifractalModel {
 public:
  MultifractalModel(double s, const LogLadderParams& params);

  double h0() const { return h0_; }
  double sigma2() const { return sigma2_; }
  /// prod (1 - delta_j/(1+delta_j)) = prod 1/(1+delta_j)
  double ladder_factor() const { return factor_; }

  double spectrum(double h) const;
  /// zeta_p = p/3 - (p(p-3)/3) sigma^2 prod 1/(1+delta_j)
  double zeta(double p) const;
  /// p/3 - zeta_p
  double intermittency(double p) const;
  /// Closed-form Legendre dual of D: min_h [p h + 3 - D(h)] = p h0 - p^2 sigma^2 / (2 factor).
  double zeta_legendre(double p) const;
  /// The quadratic p h0 - (p^2 sigma^2 / 2) factor, kept for comparison with zeta_legendre.
  double zeta_product_quadratic(double p) const;
  /// Numerical min over h of p h + 3 - D(h): dense scan then golden-section polish.
  double zeta_legendre_numeric(double p) const;

 private:
  double h0_;
  double sigma2_;
  double factor_;
};

struct SpectralModelParams {
  double k0 = 1.0;
  double k_nu = 10.0;
  double eps_rate = 1.0;
  double nu = 1.0;
  double kolmogorov_c = 1.0;
  double flux_c = 1.0;  ///< constant C in the flux bound
  std::vector<double> beta0;
  double small_c = 1.0;

  bool operator==(const SpectralModelParams&) const = default;
};

/// Flux bound, log-corrected spectrum, limiting spectrum and the Psi ratio.
class SpectralModels {
 public:
  SpectralModels(SpectralModelParams model, LogLadderParams params, double s, double gamma_decay);

  /// rho_1 = (2s-1)/(2s), rho_j = 1/j for j >= 2.
  double rho(std::size_t j) const;
  /// prod (1 + L_j(k/k0))^{delta_j rho_j}
  double flux_weight(double k) const;
  double flux_bound(double k) const;
  /// alpha_j = (2 gamma/3) j/(j+1)
  double beta_exponent(std::size_t j) const;
  double beta_decay(std::size_t j, double t) const;
  /// L_j(x) / prod_{i<=j} (1 + L_i(x))^{1+delta_i}, x = k/k0
  double correction_basis(std::size_t j, double k) const;
  double model_spectrum(double k, double t) const;
  double limiting_spectrum(double k, double t) const;
  double psi_ratio(double t) const;

  const SpectralModelParams& model() const { return model_; }
  const LogLadderParams& ladder() const { return params_; }

 private:
  void require_inertial(double k) const;

  SpectralModelParams model_;
  LogLadderParams params_;
  double s_;
  double gamma_;
};

enum class DichotomyBranch { growth_risk, contracting, marginal };

std::string to_string(DichotomyBranch b);

struct DichotomyOmega {
  double omega;
  DichotomyBranch branch;
};

/// phi(lambda) = (1 + ln lambda)^{-1/2}
double dichotomy_phi(double lambda);

/// omega = c3 (s-1/2)^alpha / (phi(lambda) log_weight(lambda))
DichotomyOmega dichotomy_omega(double lambda, double s, double q, const LogLadderParams& params);

}  // namespace nslog::formula
