#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "nslog/error.hpp"
#include "nslog/fft.hpp"
#include "nslog/initial_data.hpp"
#include "nslog/parallel.hpp"
#include "nslog/solver.hpp"
#include "nslog/spectral.hpp"
#include "support/fields.hpp"
#include "support/solver_checks.hpp"

using namespace nslog;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double nested_log_oracle(int j, double x) {
  for (int i = 0; i < j; ++i) x = std::log(std::exp(1.0) + x);
  return x;
}

double weight_oracle(double x, const std::vector<double>& deltas) {
  double w = 1;
  for (std::size_t j = 0; j < deltas.size(); ++j)
    w *= std::pow(1 + nested_log_oracle(static_cast<int>(j) + 1, x), deltas[j]);
  return w;
}

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// (int_{box} |sin y|^q)^{1/q} for even q on the 2 pi cube.
double sin_lq(int q) { return std::pow(std::pow(2 * kPi, 3) * binom(q, q / 2) / std::pow(2.0, q), 1.0 / q); }

}  // namespace

TEST_CASE("shear fixture") {
  const Grid g({16, 16, 16});
  const PhysField u = make_shear(g, 1, 1.0);
  CHECK(grad_linf(forward(u)) == Approx(1.0).epsilon(1e-13));
  CHECK(testfields::max_abs(nonlinear_conservative(forward(u)).data) <= 1e-13);
  CHECK(divergence_ratio(forward(u)) <= 1e-13);
  CHECK_THROWS_AS(make_shear(g, 6, 1.0), ConfigError);
  CHECK_NOTHROW(make_shear(g, 5, 1.0));
}

TEST_CASE("shear amplitude under fractional dissipation is exact") {
  const Grid g({16, 16, 16});
  CHECK(solverchecks::shear_error(g, 1, 1.0, 0.1, 0.75, 1.0, 1e-2) <= 1e-10);
  CHECK(solverchecks::shear_error(g, 3, 0.5, 0.1, 0.6, 1.0, 0.1) <= 1e-10);
  const Grid g2({32, 32});
  CHECK(solverchecks::shear_error(g2, 2, 1.0, 0.05, 1.0, 1.0, 0.05) <= 1e-10);
}

TEST_CASE("zero field stays zero and t_end = 0 is a no-op") {
  const Grid g({16, 16, 16});
  SolverConfig cfg;
  const SolverState z = make_state(PhysField(g, 3), cfg);
  const SolverState z1 = step(z, cfg);
  CHECK(testfields::max_abs(z1.u.data) == 0.0);
  CHECK(z1.t == Approx(cfg.dt));

  cfg.t_end = 0;
  const PhysField u0 = make_shear(g, 1, 1.0);
  const auto res = run(u0, cfg);
  CHECK(res.records.size() == 1);
  CHECK(res.final_state.t == 0.0);
  CHECK(res.final_state.u.data == make_state(u0, cfg).u.data);
}

TEST_CASE("Taylor-Green") {
  const Grid g({64, 64});
  const PhysField u = make_taylor_green_2d(g, 1.0);
  const SpecField uh = forward(u);
  CHECK(divergence_ratio(uh) <= 1e-13);
  CHECK(0.5 * l2_norm(uh) * l2_norm(uh) == Approx(std::pow(2 * kPi, 2) / 4).epsilon(1e-13));
  CHECK(solverchecks::taylor_green_error(64, 0.1, 1.0, 1e-2) <= 1e-6);
  CHECK_THROWS_AS(make_taylor_green_2d(Grid({16, 16, 16}), 1.0), ConfigError);
}

TEST_CASE("fourth-order self-convergence") {
  const auto r = solverchecks::rk4_order();
  INFO("e_coarse = " << r.e_coarse << ", e_fine = " << r.e_fine);
  CHECK(r.e_fine > 0.0);
  CHECK(r.order >= 3.9);
}

TEST_CASE("unforced energy budget and divergence") {
  const auto b = solverchecks::energy_balance(Grid({16, 16, 16}), 0.05, 1.0, 0.2, 3);
  CHECK(b.records == 21);
  CHECK(b.worst_balance <= 1e-5);
  CHECK(b.worst_divergence <= 1e-10);
  CHECK(b.energy_monotone);
  const auto f = solverchecks::energy_balance(Grid({32, 32}), 0.02, 0.7, 0.2, 4);
  CHECK(f.worst_balance <= 1e-5);
  CHECK(f.energy_monotone);
}

TEST_CASE("forcing injects at the configured rate") {
  const Grid g({16, 16, 16});
  RandomFieldSpec spec;
  spec.k_hi = 4;
  const SpecField u = forward(make_random_divfree(g, spec));
  SolverConfig cfg;
  cfg.forcing.enabled = true;
  cfg.forcing.injection = 0.3;
  const SpecField n = rhs_nonlinear(u, cfg);
  const auto& md = g.modes();
  double rate = 0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < g.nmodes(); ++i)
      rate += md.weight[i] * std::real(std::conj(u.comp(c)[i]) * n.comp(c)[i]);
  rate *= g.volume();
  CHECK(rate == Approx(0.3).epsilon(1e-10));
}

TEST_CASE("criterion accumulator against a quadrature oracle") {
  const Grid g({32, 32, 32});
  SolverConfig cfg;
  cfg.nu = 0.1;
  cfg.s = 0.75;
  cfg.q = 12;
  cfg.dt = 1e-2;
  cfg.t_end = 1.0;
  cfg.params = formula::LogLadderParams::with_deltas({0.5, 0.25});
  const double amp = 0.3;
  const auto res = run(make_shear(g, 1, amp), cfg);
  const double p = criterion_exponent(cfg);
  CHECK(p == Approx(8.0).epsilon(1e-14));
  const double lq = sin_lq(12);
  const double want = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double t) {
        const double x = amp * std::exp(-cfg.nu * t) * lq;
        return std::pow(x, p) / weight_oracle(x, cfg.params.deltas);
      },
      0.0, 1.0);
  CHECK(res.final_state.criterion_accum == Approx(want).epsilon(1e-4));
  const double want_g = amp * amp * (1 - std::exp(-2 * cfg.nu)) / (2 * cfg.nu);
  CHECK(res.final_state.grad2_accum == Approx(want_g).epsilon(1e-4));
  for (std::size_t i = 1; i < res.records.size(); ++i)
    CHECK(res.records[i].criterion_accum >= res.records[i - 1].criterion_accum);

  // Off the admissible region the criterion is switched off.
  cfg.q = 4;
  cfg.s = 0.6;
  CHECK(criterion_exponent(cfg) == 0.0);
  CHECK(run(make_shear(Grid({16, 16, 16}), 1, amp), cfg).final_state.criterion_accum == 0.0);
}

TEST_CASE("records are deterministic across runs and thread counts") {
  const Grid g({16, 16, 16});
  RandomFieldSpec spec;
  spec.seed = 11;
  SolverConfig cfg;
  cfg.dt_policy = DtPolicy::cfl;
  cfg.cfl = 0.3;
  cfg.t_end = 0.05;
  const PhysField u0 = make_random_divfree(g, spec);
  const auto a = run(u0, cfg);
  const int before = par::thread_limit();
  par::set_thread_limit(1);
  const auto b = run(u0, cfg);
  par::set_thread_limit(before);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i)
    CHECK(record_values(a.records[i]) == record_values(b.records[i]));
  CHECK(a.final_state.u.data == b.final_state.u.data);
}

TEST_CASE("step failures") {
  const Grid g({16, 16, 16});
  SolverConfig cfg;
  SolverState st = make_state(make_shear(g, 1, 1.0), cfg);
  CHECK_THROWS_AS(step(st, cfg, 1e-14), NumericalError);
  st.u.data[5] = std::numeric_limits<double>::quiet_NaN();
  st.t = 0.25;
  try {
    step(st, cfg, 1e-3);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.time() == 0.25);
  }
  PhysField bad(g, 3);
  for (std::size_t i = 0; i < g.npoints(); ++i) bad.comp(0)[i] = std::sin(bad.coord(i, 0));
  CHECK_THROWS_AS(make_state(bad, cfg), PreconditionError);
  cfg.s = 0.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.s = 1;
  cfg.dt_policy = DtPolicy::cfl;
  cfg.cfl = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("CFL step respects the limit") {
  const Grid g({32, 32});
  const PhysField u0 = make_taylor_green_2d(g, 2.0);
  SolverConfig cfg;
  cfg.dt_policy = DtPolicy::cfl;
  cfg.cfl = 0.5;
  cfg.dt = 1.0;
  const SolverState st = make_state(u0, cfg);
  CHECK(choose_dt(st, cfg) == Approx(0.5 * (2 * kPi / 32) / 2.0).epsilon(1e-12));
}

TEST_CASE("decay audit") {
  const Grid g({16, 16, 16});
  SolverConfig cfg;
  cfg.s = 0.75;
  cfg.t_end = 0.5;
  cfg.record_every = 0.05;
  const auto res = run(make_shear(g, 1, 1.0), cfg);
  const auto pack = formula::exponent_pack(0.75, 12);
  const auto loose = decay_audit(res.records, pack, 1e6, 1.0);
  CHECK(loose.violations == 0);
  CHECK(loose.margin > 1e5);
  const auto tight = decay_audit(res.records, pack, 1e-6, 1.0);
  CHECK(tight.violations == res.records.size());
  CHECK(tight.margin < 1e-5);
  CHECK_THROWS_AS(decay_audit({}, pack, 1, 1), PreconditionError);
}

TEST_CASE("random divergence-free data") {
  const Grid g({32, 32, 32});
  RandomFieldSpec spec;
  spec.k_lo = 1;
  spec.k_hi = 8;
  spec.seed = 5;
  const PhysField a = make_random_divfree(g, spec);
  const PhysField b = make_random_divfree(g, spec);
  CHECK(a.data == b.data);
  const SpecField ah = forward(a);
  CHECK(divergence_ratio(ah) <= 1e-12);
  CHECK(0.5 * l2_norm(ah) * l2_norm(ah) / g.volume() == Approx(spec.energy).epsilon(1e-12));

  // Regression of log shell energy against log k over the populated band.
  const auto& md = g.modes();
  std::vector<double> shell(9, 0.0);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < g.nmodes(); ++i) {
      const auto bin = static_cast<std::size_t>(std::lround(std::sqrt(md.k2[i])));
      if (bin >= 1 && bin <= 8) shell[bin] += 0.5 * md.weight[i] * std::norm(ah.comp(c)[i]);
    }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 1; k <= 8; ++k) {
    const double x = std::log(k), y = std::log(shell[k]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double slope = (8 * sxy - sx * sy) / (8 * sxx - sx * sx);
  CHECK(std::abs(slope - spec.slope) <= 0.2);

  spec.seed = 6;
  CHECK(make_random_divfree(g, spec).data != a.data);
  spec.k_lo = 5;
  spec.k_hi = 4;
  CHECK_THROWS_AS(make_random_divfree(g, spec), ConfigError);
  spec.k_lo = 1;
  spec.k_hi = 12;
  CHECK_THROWS_AS(make_random_divfree(g, spec), ConfigError);
}

TEST_CASE("shell datum") {
  const double s = 0.75;
  std::vector<double> ratio;
  for (double r : {2.0, 4.0, 8.0}) {
    const std::size_t n = r < 8 ? 64 : 128;
    const Grid g({n, n, n});
    const SpecField w = forward(make_shell_datum(g, r));
    CHECK(divergence_ratio(w) <= 1e-12);
    const auto& md = g.modes();
    double outside = 0;
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < g.nmodes(); ++i) {
        const double k = std::sqrt(md.k2[i]);
        if (k <= r / 2 || k >= 3 * r) outside = std::max(outside, std::abs(w.comp(c)[i]));
      }
    CHECK(outside <= 1e-14);
    ratio.push_back(hs_seminorm(w, s) / std::pow(r, s - 0.5));
  }
  INFO("ratios " << ratio[0] << " " << ratio[1] << " " << ratio[2]);
  CHECK(std::abs(ratio[0] / ratio[2] - 1) <= 0.1);
  CHECK(std::abs(ratio[1] / ratio[2] - 1) <= 0.1);
  CHECK_THROWS_AS(make_shell_datum(Grid({32, 32, 32}), 4.0), ConfigError);
  CHECK(shell_cutoff(1.75) == Approx(1.0).epsilon(1e-15));
  CHECK(shell_cutoff(0.5) == 0.0);
  CHECK(shell_cutoff(3.0) == 0.0);
}

TEST_CASE("scaled family") {
  const Grid g({16, 16, 16});
  const PhysField base = testfields::abc(g);
  const auto params = formula::LogLadderParams::with_deltas({0.2});
  const double s = 0.75, q = 4;
  const SpecField bh = forward(base);
  const double hs = hs_seminorm(bh, s);
  const double lq = lq_norm(inverse(fractional_laplacian(bh, s / 2)), q);
  const auto id = make_scaled_family(base, hs, s, q, params, lq);
  CHECK(testfields::max_diff(id.field.data, base.data) <= 1e-14);
  CHECK(id.hs_achieved == Approx(hs).epsilon(1e-14));
  const auto twice = make_scaled_family(base, 2 * hs, s, q, params, 2 * lq);
  for (std::size_t i = 0; i < base.data.size(); ++i) CHECK(twice.field.data[i] == Approx(2 * base.data[i]));
  CHECK(twice.log_weight == Approx(weight_oracle(2 * hs, {0.2})).epsilon(1e-14));
  CHECK_THROWS_AS(make_scaled_family(base, hs, s, q, params, 1.5 * lq), ConfigError);
  CHECK_THROWS_AS(make_scaled_family(PhysField(g, 3), 1.0, s, q, params, 0.0), ConfigError);
}

TEST_CASE("admissibility") {
  const Grid g({16, 16, 16});
  const auto params = formula::LogLadderParams::with_deltas({0.1});
  const auto zero = admissibility_check(PhysField(g, 3), 0.75, 4, params);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == Approx(1.0 / std::pow(1 + std::log(std::exp(1.0)), 0.1)));
  CHECK(zero.admissible);

  // Shear amp 0.01, s = 0.75, q = 4: unit wavenumber leaves the multiplier at 1.
  const auto sh = admissibility_check(make_shear(g, 1, 0.01), 0.75, 4, params);
  const double hs = 0.01 * std::sqrt(std::pow(2 * kPi, 3) / 2);
  CHECK(sh.hs == Approx(hs).epsilon(1e-13));
  CHECK(sh.lhs == Approx(0.01 * sin_lq(4)).epsilon(1e-13));
  CHECK(sh.rhs == Approx(1.0 / weight_oracle(hs, {0.1})).epsilon(1e-13));
  CHECK(sh.admissible);

  auto tiny = params;
  tiny.c0 = 1e-12;
  CHECK_FALSE(admissibility_check(make_shear(g, 1, 0.01), 0.75, 4, tiny).admissible);
  PhysField bad(g, 3);
  for (std::size_t i = 0; i < g.npoints(); ++i) bad.comp(0)[i] = std::sin(bad.coord(i, 0));
  CHECK_THROWS_AS(admissibility_check(bad, 0.75, 4, params), PreconditionError);
}
