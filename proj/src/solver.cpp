#include "nslog/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nslog/commutator.hpp"
#include "nslog/error.hpp"
#include "nslog/fft.hpp"
#include "nslog/parallel.hpp"
#include "nslog/spectral.hpp"

namespace nslog {

namespace {

constexpr double kMinDt = 1e-12;

void check_finite(const SpecField& u, double t) {
  const double bad = par::max(u.data.size(), [&](std::size_t i) {
    return std::isfinite(u.data[i].real()) && std::isfinite(u.data[i].imag()) ? 0.0 : 1.0;
  });
  if (bad > 0.0) {
    std::ostringstream os;
    os << "solver: non-finite velocity at t = " << t;
    throw DivergenceError(os.str(), t);
  }
}

void project(SpecField& u, bool truncate) {
  if (truncate) dealias_inplace(u);
  u = leray_project(u);
}

struct Integrands {
  double criterion;
  double grad2;
};

Integrands integrands(const SpecField& u, const SolverConfig& cfg, double p) {
  Integrands out{0.0, 0.0};
  const double g = grad_linf(u);
  out.grad2 = g * g;
  if (p > 0.0) {
    const double x = lq_norm(inverse(fractional_laplacian(u, cfg.s)), cfg.q);
    out.criterion = std::pow(x, p) / formula::log_weight(x, cfg.params);
  }
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(nu > 0.0)) throw ConfigError("solver: nu must be positive");
  if (!(s > 0.5 && s <= 1.0)) throw ConfigError("solver: s must lie in (1/2, 1]");
  if (!(dt > 0.0)) throw ConfigError("solver: dt must be positive");
  if (dt_policy == DtPolicy::cfl && !(cfl > 0.0 && cfl < 1.0)) throw ConfigError("solver: cfl must lie in (0, 1)");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("solver: t_end must be finite and >= 0");
  if (!(record_every > 0.0)) throw ConfigError("solver: record_every must be positive");
  if (!(q >= 1.0)) throw ConfigError("solver: q must be >= 1");
  if (forcing.enabled) {
    if (!(forcing.k_lo > 0.0 && forcing.k_hi >= forcing.k_lo)) throw ConfigError("solver: bad forcing band");
    if (!(forcing.injection >= 0.0)) throw ConfigError("solver: forcing injection must be >= 0");
  }
  params.validate();
}

std::vector<const char*> record_columns() {
  return {"t",           "energy",          "hs_semi",     "frac_lq_half", "frac_lq_full",
          "grad_linf",   "eps_rate",        "criterion_accum", "grad2_accum", "eps_rate_s1",
          "amplitude",   "lq_root",         "divergence"};
}

std::vector<double> record_values(const DiagnosticsRecord& r) {
  return {r.t,         r.energy,   r.hs_semi,         r.frac_lq_half, r.frac_lq_full,
          r.grad_linf, r.eps_rate, r.criterion_accum, r.grad2_accum,  r.eps_rate_s1,
          r.amplitude, r.lq_root,  r.divergence};
}

double criterion_exponent(const SolverConfig& cfg) {
  const double p = formula::scaling_exponent(cfg.s, cfg.q);
  return std::isfinite(p) && p > 0.0 ? p : 0.0;
}

SolverState make_state(const PhysField& u0, const SolverConfig& cfg) {
  cfg.validate();
  if (u0.ncomp != u0.grid.rank()) throw ConfigError("solver: velocity must have one component per axis");
  SolverState st;
  st.u = forward(u0);
  if (divergence_ratio(st.u) > kDivergenceTolerance)
    throw PreconditionError("solver: initial velocity is not divergence-free");
  project(st.u, cfg.dealias);
  const auto in = integrands(st.u, cfg, criterion_exponent(cfg));
  st.criterion_integrand = in.criterion;
  st.grad2_integrand = in.grad2;
  st.primed = true;
  return st;
}

double choose_dt(const SolverState& state, const SolverConfig& cfg) {
  if (cfg.dt_policy == DtPolicy::fixed) return cfg.dt;
  const Grid& g = state.u.grid;
  const PhysField u = inverse(state.u);
  const std::size_t np = g.npoints();
  const double umax = std::sqrt(par::max(np, [&](std::size_t i) {
    double a = 0.0;
    for (int c = 0; c < u.ncomp; ++c) a += u.comp(c)[i] * u.comp(c)[i];
    return a;
  }));
  double dxmin = std::numeric_limits<double>::infinity();
  for (int a = 0; a < g.rank(); ++a) dxmin = std::min(dxmin, g.dx(a));
  const double dt = umax > 0.0 ? std::min(cfg.dt, cfg.cfl * dxmin / umax) : cfg.dt;
  if (!(dt >= kMinDt)) {
    std::ostringstream os;
    os << "solver: CFL step " << dt << " underflows at t = " << state.t;
    throw NumericalError(os.str());
  }
  return dt;
}

SpecField rhs_nonlinear(const SpecField& u, const SolverConfig& cfg) {
  SpecField n = nonlinear_conservative(u, cfg.dealias);
  n = leray_project(n);
  for (auto& v : n.data) v = -v;
  if (!cfg.forcing.enabled || cfg.forcing.injection == 0.0) return n;

  const Grid& g = u.grid;
  const auto& md = g.modes();
  const double kmin = g.kmin();
  auto in_band = [&](std::size_t i) {
    const double k = std::sqrt(md.k2[i]) / kmin;
    return md.k2[i] > 0.0 && k >= cfg.forcing.k_lo && k <= cfg.forcing.k_hi;
  };
  const double e_band = 0.5 * g.volume() * par::sum(g.nmodes(), [&](std::size_t i) {
    if (!in_band(i)) return 0.0;
    double e = 0.0;
    for (int c = 0; c < u.ncomp; ++c) e += std::norm(u.comp(c)[i]);
    return md.weight[i] * e;
  });
  if (e_band <= 0.0) return n;
  const double f = cfg.forcing.injection / (2.0 * e_band);
  for (int c = 0; c < u.ncomp; ++c) {
    const cplx* uc = u.comp(c);
    cplx* nc = n.comp(c);
    par::for_each(g.nmodes(), [&](std::size_t i) {
      if (in_band(i)) nc[i] += f * uc[i];
    });
  }
  return n;
}

SolverState step(const SolverState& state, const SolverConfig& cfg, double dt) {
  if (!(dt >= kMinDt)) {
    std::ostringstream os;
    os << "solver: step " << dt << " underflows at t = " << state.t;
    throw NumericalError(os.str());
  }
  const SpecField& u = state.u;
  const Grid& g = u.grid;
  const std::size_t nm = g.nmodes();
  const auto& k2 = g.modes().k2;
  std::vector<double> eh(nm), ef(nm);
  par::for_each(nm, [&](std::size_t i) {
    const double rate = k2[i] > 0.0 ? cfg.nu * std::pow(k2[i], cfg.s) : 0.0;
    eh[i] = std::exp(-rate * 0.5 * dt);
    ef[i] = eh[i] * eh[i];
  });
  const std::size_t total = u.data.size();
  auto factor = [&](const std::vector<double>& e, std::size_t j) { return e[j % nm]; };

  // Non-finite samples surface as DataError from the transforms; report them as divergence.
  auto stage = [&](const SpecField& x) {
    try {
      return rhs_nonlinear(x, cfg);
    } catch (const DataError&) {
      std::ostringstream os;
      os << "solver: non-finite velocity during the step from t = " << state.t;
      throw DivergenceError(os.str(), state.t + dt);
    }
  };
  check_finite(u, state.t);
  const SpecField a = stage(u);
  SpecField tmp(g, u.ncomp);
  par::for_each(total, [&](std::size_t j) { tmp.data[j] = factor(eh, j) * (u.data[j] + 0.5 * dt * a.data[j]); });
  const SpecField b = stage(tmp);
  par::for_each(total, [&](std::size_t j) { tmp.data[j] = factor(eh, j) * u.data[j] + 0.5 * dt * b.data[j]; });
  const SpecField c = stage(tmp);
  par::for_each(total, [&](std::size_t j) {
    tmp.data[j] = factor(ef, j) * u.data[j] + dt * factor(eh, j) * c.data[j];
  });
  const SpecField d = stage(tmp);

  SolverState out;
  out.u = SpecField(g, u.ncomp);
  par::for_each(total, [&](std::size_t j) {
    const double e1 = factor(eh, j), e2 = factor(ef, j);
    out.u.data[j] = e2 * u.data[j] + dt / 6.0 * (e2 * a.data[j] + 2.0 * e1 * (b.data[j] + c.data[j]) + d.data[j]);
  });
  out.t = state.t + dt;
  check_finite(out.u, out.t);
  project(out.u, cfg.dealias);
  out.steps = state.steps + 1;

  const double p = criterion_exponent(cfg);
  Integrands before{state.criterion_integrand, state.grad2_integrand};
  if (!state.primed) before = integrands(u, cfg, p);
  const auto after = integrands(out.u, cfg, p);
  if (!std::isfinite(after.criterion) || !std::isfinite(after.grad2)) {
    std::ostringstream os;
    os << "solver: non-finite criterion integrand at t = " << out.t;
    throw DivergenceError(os.str(), out.t);
  }
  out.criterion_accum = state.criterion_accum + 0.5 * dt * (before.criterion + after.criterion);
  out.grad2_accum = state.grad2_accum + 0.5 * dt * (before.grad2 + after.grad2);
  out.criterion_integrand = after.criterion;
  out.grad2_integrand = after.grad2;
  out.primed = true;
  return out;
}

SolverState step(const SolverState& state, const SolverConfig& cfg) { return step(state, cfg, choose_dt(state, cfg)); }

DiagnosticsRecord diagnose(const SolverState& state, const SolverConfig& cfg) {
  const SpecField& u = state.u;
  const Norms nm = norms(u, cfg.s, cfg.q);
  DiagnosticsRecord r;
  r.t = state.t;
  r.energy = 0.5 * nm.l2 * nm.l2;
  r.hs_semi = nm.hs_semi;
  r.frac_lq_half = nm.frac_lq_half;
  r.frac_lq_full = nm.frac_lq_full;
  r.grad_linf = nm.grad_linf;
  r.eps_rate = cfg.nu * nm.hs_semi * nm.hs_semi;
  r.criterion_accum = state.criterion_accum;
  r.grad2_accum = state.grad2_accum;
  const double h1 = hs_seminorm(u, 1.0);
  r.eps_rate_s1 = cfg.nu * h1 * h1;
  r.amplitude = std::sqrt(2.0 / u.grid.volume()) * nm.l2;
  r.lq_root = lq_norm(inverse(fractional_laplacian(u, 0.5)), cfg.q);
  r.divergence = divergence_ratio(u);
  return r;
}

RunResult run(const PhysField& u0, const SolverConfig& cfg) { return run(make_state(u0, cfg), cfg); }

RunResult run(SolverState state, const SolverConfig& cfg) {
  cfg.validate();
  RunResult res;
  res.records.push_back(diagnose(state, cfg));
  const double t0 = state.t;
  std::size_t next = 1;
  auto record_time = [&](std::size_t k) { return std::min(t0 + static_cast<double>(k) * cfg.record_every, cfg.t_end); };
  while (state.t < cfg.t_end) {
    const double target = record_time(next);
    double dt = choose_dt(state, cfg);
    const bool lands = state.t + dt * (1.0 + 1e-6) >= target;
    if (lands) dt = target - state.t;
    state = step(state, cfg, dt);
    if (lands) {
      state.t = target;
      res.records.push_back(diagnose(state, cfg));
      ++next;
    }
  }
  res.final_state = std::move(state);
  return res;
}

DecayAudit decay_audit(const std::vector<DiagnosticsRecord>& records, const formula::ExponentPack& pack,
                       double c_env, double beta_env) {
  if (records.empty()) throw PreconditionError("decay_audit: no records");
  DecayAudit out;
  out.margin = std::numeric_limits<double>::infinity();
  const double h0 = records.front().hs_semi;
  for (const auto& r : records) {
    const double env = c_env * h0 / std::pow(1.0 + beta_env * (r.t - records.front().t), pack.gamma_decay);
    if (r.hs_semi > env) ++out.violations;
    if (r.hs_semi > 0.0) out.margin = std::min(out.margin, env / r.hs_semi);
  }
  return out;
}

}  // namespace nslog
