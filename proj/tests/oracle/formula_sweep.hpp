#pragma once

// Random-draw comparison of every formula evaluator against the 50-digit
// oracle. Returns the worst relative error per quantity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "formula_oracle.hpp"
#include "nslog/formula.hpp"
#include "support/gen.hpp"

namespace oracle {

struct SweepResult {
  std::map<std::string, double> worst;  // quantity -> max relative error
  std::map<std::string, int> count;
  int integer_mismatches = 0;            // pathway_level disagreements
};

inline double rel_err(double got, const Real& want) {
  const double w = want.convert_to<double>();
  if (w == 0.0) return std::abs(got);
  return std::abs(got - w) / std::abs(w);
}

inline SweepResult formula_sweep(int draws, std::uint64_t seed) {
  namespace f = nslog::formula;
  testgen::Gen g(seed);
  SweepResult out;
  auto note = [&](const std::string& name, double got, const Real& want) {
    double& w = out.worst[name];
    w = std::max(w, rel_err(got, want));
    ++out.count[name];
  };

  for (int i = 0; i < draws; ++i) {
    const std::size_t n = static_cast<std::size_t>(g.integer(1, 4));
    f::LogLadderParams lp;
    lp.deltas = g.vec(n, 0.0, 3.0);
    lp.cs = g.vec(n, 0.1, 3.0);
    lp.c3 = g.log_uniform(0.1, 10.0);
    const double s = g.uniform(0.505, 0.995);
    const double q = g.uniform(3.05, 60.0);
    const double x = g.integer(0, 9) == 0 ? 0.0 : g.log_uniform(1e-6, 1e8);
    const int j = g.integer(0, 6);

    note("nested_log", f::nested_log(j, x), L(j, Real(x)));
    note("log_weight", f::log_weight(x, lp), weight(Real(x), lp.deltas));

    const auto cf = f::commutator_factors(x, lp);
    note("commutator_f1", cf.f1, F1(Real(x), lp.deltas));
    note("commutator_f2", cf.f2, F2(Real(x), lp.deltas));

    const double eta = g.integer(0, 3) == 0 ? 0.0 : g.uniform(0.0, 0.05);
    const auto ep = f::exponent_pack(s, q, eta);
    const Pack op = pack(Real(s), Real(q), Real(eta));
    note("theta", ep.theta, op.theta);
    note("alpha_gn", ep.alpha_gn, op.alpha);
    note("beta_ode", ep.beta_ode, op.beta);
    note("mu", ep.mu, op.mu);
    note("gamma_decay", ep.gamma_decay, op.gamma);
    note("p_scaling", ep.p_scaling, op.p);
    note("delta01", ep.delta01, op.delta01);

    note("alpha_threshold", f::alpha_threshold(lp), alpha_threshold(lp.deltas, lp.cs));
    const double cq = g.log_uniform(0.1, 10.0);
    note("threshold_asymptote", f::threshold_asymptote(s, cq, lp),
         threshold(Real(s), Real(cq), lp.deltas, lp.cs));

    {
      // Smallest prefix below the target, recomputed at 50 digits.
      const Real target = 1 / log(1 / (Real(s) - Real(1) / 2));
      std::size_t want = 0;
      for (std::size_t m = 1; m <= n && want == 0; ++m) {
        std::vector<double> d(lp.deltas.begin(), lp.deltas.begin() + m);
        std::vector<double> c(lp.cs.begin(), lp.cs.begin() + m);
        if (alpha_threshold(d, c) < target) want = m;
      }
      const auto got = f::pathway_level(s, lp);
      if ((got ? *got : 0) != want) ++out.integer_mismatches;
      ++out.count["pathway_level"];
    }

    const auto be = f::blowup_exponents(s, q, lp);
    const Blowup ob = blowup(Real(s), Real(q), lp.deltas);
    note("grad_exp_beta_form", be.grad_exp_beta_form, ob.grad_beta);
    note("grad_exp_explicit_form", be.grad_exp_explicit_form, ob.grad_explicit);
    note("velocity_exp", be.velocity_exp, ob.velocity);
    note("filament_exp", be.filament_exp, ob.filament);
    note("alignment_exp", be.alignment_exp, ob.alignment);
    note("singular_dim", be.singular_dim, ob.dim);

    const double eps = g.log_uniform(1e-6, 1.0);
    const auto eg = f::exceptional_geometry(eps, lp);
    note("dim_bound_raw", eg.dim_bound_raw, dim_bound_raw(Real(eps), lp.deltas));
    note("theta_eps", eg.theta_eps, theta_eps(Real(eps), lp.deltas));

    const f::MultifractalModel mm(s, lp);
    const double h = g.uniform(-1.0, 2.0);
    const double p = g.uniform(0.0, 10.0);
    note("spectrum_D", mm.spectrum(h), spectrum_D(Real(h), Real(s), lp.deltas));
    note("zeta", mm.zeta(p), zeta(Real(p), Real(s), lp.deltas));
    note("intermittency", mm.intermittency(p), Real(p) / 3 - zeta(Real(p), Real(s), lp.deltas));

    f::SpectralModelParams sp;
    sp.k0 = g.log_uniform(0.5, 4.0);
    sp.eps_rate = g.log_uniform(0.01, 10.0);
    sp.nu = g.log_uniform(1e-4, 1.0);
    sp.kolmogorov_c = g.log_uniform(0.5, 2.0);
    sp.flux_c = g.log_uniform(0.5, 2.0);
    sp.small_c = g.log_uniform(0.1, 2.0);
    sp.beta0 = g.vec(n, 0.1, 2.0);
    const double gamma = ep.gamma_decay;
    const f::SpectralModels sm(sp, lp, s, gamma);
    const double k = sp.k0 * g.log_uniform(1.0, 1e4);
    const double t = g.log_uniform(1e-3, 100.0);
    note("flux_bound", sm.flux_bound(k),
         flux_bound(Real(k), Real(sp.k0), Real(sp.flux_c), Real(sp.eps_rate), Real(s), lp.deltas));
    note("model_spectrum", sm.model_spectrum(k, t),
         model_spectrum(Real(k), Real(t), Real(sp.k0), Real(sp.kolmogorov_c), Real(sp.eps_rate),
                        Real(gamma), lp.deltas, sp.beta0));
    note("limiting_spectrum", sm.limiting_spectrum(k, t),
         limiting_spectrum(Real(k), Real(t), Real(sp.kolmogorov_c), Real(sp.eps_rate),
                           Real(sp.nu), Real(sp.small_c)));
    note("psi_ratio", sm.psi_ratio(t), pow(Real(sp.nu) * Real(t), Real(-1) / 4));

    const double lambda = g.log_uniform(1.0, 1e6);
    note("dichotomy_omega", f::dichotomy_omega(lambda, s, q, lp).omega,
         omega(Real(lambda), Real(s), lp.deltas, lp.cs, Real(lp.c3)));
  }
  return out;
}

}  // namespace oracle
