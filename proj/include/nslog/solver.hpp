#pragma once

// Pseudo-spectral Navier-Stokes with fractional dissipation nu (-Delta)^s on
// the periodic box. Time stepping is integrating-factor RK4 (Lawson form):
// the linear part is exact per mode, the nonlinear part is classical RK4.

#include <cstddef>
#include <vector>

#include "nslog/field.hpp"
#include "nslog/formula.hpp"

namespace nslog {

enum class DtPolicy { fixed, cfl };

struct ForcingConfig {
  bool enabled = false;
  double k_lo = 1;          ///< forced band, in units of the smallest wavenumber
  double k_hi = 2;
  double injection = 0.1;   ///< box-integrated energy injection rate
  bool operator==(const ForcingConfig&) const = default;
};

struct SolverConfig {
  double nu = 0.1;
  double s = 1.0;           ///< in (1/2, 1]
  DtPolicy dt_policy = DtPolicy::fixed;
  double dt = 1e-3;         ///< fixed step, or the upper cap under CFL
  double cfl = 0.5;
  double t_end = 1.0;
  bool dealias = true;
  ForcingConfig forcing;
  double record_every = 0.01;
  double q = 12;            ///< Lebesgue exponent of the criterion norms
  formula::LogLadderParams params;

  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

struct SolverState {
  double t = 0;
  SpecField u;
  double criterion_accum = 0;  ///< running int ||(-Delta)^s u||_q^p / weight dt
  double grad2_accum = 0;      ///< running int ||grad u||_inf^2 dt
  std::size_t steps = 0;
  // Accumulator integrands at time t; refreshed by every step.
  double criterion_integrand = 0;
  double grad2_integrand = 0;
  bool primed = false;
};

struct DiagnosticsRecord {
  double t = 0;
  double energy = 0;        ///< (1/2) int |u|^2 over the box
  double hs_semi = 0;       ///< ||(-Delta)^{s/2} u||_2
  double frac_lq_half = 0;  ///< ||(-Delta)^{s/2} u||_q
  double frac_lq_full = 0;  ///< ||(-Delta)^s u||_q
  double grad_linf = 0;
  double eps_rate = 0;      ///< nu ||(-Delta)^{s/2} u||_2^2, the true dissipation rate
  double criterion_accum = 0;
  double grad2_accum = 0;
  double eps_rate_s1 = 0;   ///< nu ||grad u||_2^2, the classical rate
  double amplitude = 0;     ///< sqrt(2/V) ||u||_2 (single-mode amplitude)
  double lq_root = 0;       ///< ||(-Delta)^{1/2} u||_q
  double divergence = 0;    ///< ||div u|| / ||grad u||
};

/// Names of the record columns in CSV order.
std::vector<const char*> record_columns();
std::vector<double> record_values(const DiagnosticsRecord& r);

/// Scaling exponent used by the criterion integrand; 0 when the criterion is
/// disabled (p not finite and positive for this (s, q)).
double criterion_exponent(const SolverConfig& cfg);

/// Divergence check, dealiasing and projection of the initial field.
SolverState make_state(const PhysField& u0, const SolverConfig& cfg);

/// CFL or fixed step size for the current state.
double choose_dt(const SolverState& state, const SolverConfig& cfg);

/// Transform of -P(u . grad)u plus forcing.
SpecField rhs_nonlinear(const SpecField& u, const SolverConfig& cfg);

SolverState step(const SolverState& state, const SolverConfig& cfg, double dt);
SolverState step(const SolverState& state, const SolverConfig& cfg);

DiagnosticsRecord diagnose(const SolverState& state, const SolverConfig& cfg);

struct RunResult {
  SolverState final_state;
  std::vector<DiagnosticsRecord> records;
};

/// Integrates to t_end, recording at t = 0 and every record_every.
RunResult run(const PhysField& u0, const SolverConfig& cfg);
RunResult run(SolverState state, const SolverConfig& cfg);

struct DecayAudit {
  std::size_t violations = 0;
  double margin = 0;  ///< min over records of envelope / hs_semi
};

/// Envelope c_env hs_semi(0) / (1 + beta_env t)^gamma_decay against each record.
DecayAudit decay_audit(const std::vector<DiagnosticsRecord>& records, const formula::ExponentPack& pack,
                       double c_env, double beta_env);

}  // namespace nslog
