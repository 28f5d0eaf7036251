#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nslog/diagnostics.hpp"
#include "nslog/error.hpp"
#include "nslog/fft.hpp"
#include "nslog/initial_data.hpp"
#include "nslog/solver.hpp"
#include "nslog/spectral.hpp"
#include "support/fields.hpp"
#include "support/gen.hpp"

using namespace nslog;
using namespace nslog::diag;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

PhysField sin_x_e2(const Grid& g) {
  return testfields::sample(g, 3, [](int c, double x, double, double) { return c == 1 ? std::sin(x) : 0.0; });
}

PhysField random_field(const Grid& g, std::uint64_t seed, double k_hi = 6) {
  RandomFieldSpec spec;
  spec.k_hi = k_hi;
  spec.seed = seed;
  return make_random_divfree(g, spec);
}

double mean_half_u2(const PhysField& f) {
  double acc = 0;
  for (double v : f.data) acc += v * v;
  return 0.5 * acc / static_cast<double>(f.grid.npoints());
}

formula::SpectralModels make_model(std::vector<double> deltas, std::vector<double> beta0, double k_nu = 6) {
  formula::SpectralModelParams mp;
  mp.k0 = 1;
  mp.k_nu = k_nu;
  mp.eps_rate = 0.7;
  mp.kolmogorov_c = 1.3;
  mp.beta0 = std::move(beta0);
  return formula::SpectralModels(mp, formula::LogLadderParams::with_deltas(std::move(deltas)), 0.75, 0.4);
}

std::vector<unsigned char> slab_mask(const Grid& g) {
  std::vector<unsigned char> m(g.npoints(), 0);
  for (std::size_t i = 0; i < g.npoints(); ++i)
    if (unflatten(g, i)[0] == 5) m[i] = 1;
  return m;
}

}  // namespace

TEST_CASE("energy spectrum of a single mode") {
  const Grid g({16, 16, 16});
  const auto sp = energy_spectrum(sin_x_e2(g), 0.1, 1.0);
  CHECK(sp.dk == Approx(1.0));
  CHECK(sp.k_centers.front() == 1.0);
  CHECK(sp.e_k[0] == Approx(0.25).epsilon(1e-14));
  for (std::size_t b = 1; b < sp.e_k.size(); ++b) CHECK(std::abs(sp.e_k[b]) <= 1e-30);
  CHECK(sp.total_energy() == Approx(0.25).epsilon(1e-14));
  CHECK(sp.eps_rate_s1 == Approx(0.05).epsilon(1e-14));
  CHECK(energy_spectrum(sin_x_e2(g), 0.1, 0.75).eps_rate_frac == Approx(0.05).epsilon(1e-14));

  const auto z = energy_spectrum(PhysField(g, 3));
  CHECK(testfields::max_abs(z.e_k) == 0.0);
  CHECK(z.eps_rate_s1 == 0.0);
}

TEST_CASE("Parseval shell closure") {
  testgen::Gen gen(4);
  for (int d = 0; d < 5; ++d) {
    const Grid g = d % 2 ? Grid({32, 32}) : Grid({16, 16, 16});
    PhysField f = inverse(testfields::random_spec(g, g.rank(), gen.engine()(), 4.0, false));
    for (auto& v : f.data) v += 0.3;  // nonzero mean goes to mean_energy
    const auto sp = energy_spectrum(f);
    CHECK(sp.total_energy() == Approx(mean_half_u2(f)).epsilon(1e-10));
    double m2 = 0;
    for (int c = 0; c < f.ncomp; ++c) {
      double m = 0;
      for (std::size_t i = 0; i < g.npoints(); ++i) m += f.comp(c)[i];
      m /= g.npoints();
      m2 += m * m;
    }
    CHECK(sp.mean_energy == Approx(0.5 * m2).epsilon(1e-10));
  }
}

TEST_CASE("transfer conserves energy") {
  const Grid g({32, 32, 32});
  const auto sp = energy_flux(random_field(g, 9, 8));
  double sum = 0, mag = 0, peak = 0;
  for (std::size_t b = 0; b < sp.transfer.size(); ++b) {
    sum += sp.transfer[b] * sp.dk;
    mag += std::abs(sp.transfer[b]) * sp.dk;
    peak = std::max(peak, std::abs(sp.flux[b]));
  }
  REQUIRE(mag > 0);
  CHECK(std::abs(sum) / mag <= 1e-8);
  CHECK(std::abs(sp.flux.back()) <= 1e-6 * peak);
  // Flux at the dealias cutoff.
  const double kcut = 32.0 / 3.0;
  for (std::size_t b = 0; b < sp.k_centers.size(); ++b)
    if (sp.k_centers[b] > kcut + 1) CHECK(std::abs(sp.flux[b]) <= 1e-6 * peak);

  const auto single = energy_flux(sin_x_e2(g));
  CHECK(testfields::max_abs(single.flux) <= 1e-15);
  PhysField bad(g, 3);
  for (std::size_t i = 0; i < g.npoints(); ++i) bad.comp(0)[i] = std::sin(bad.coord(i, 0));
  CHECK_THROWS_AS(energy_flux(bad), PreconditionError);
}

TEST_CASE("flux audit") {
  const Grid g({16, 16, 16});
  const auto sp = energy_flux(sin_x_e2(g));
  const auto model = make_model({1.0, 0.5}, {});
  const auto a = flux_audit(sp, model);
  CHECK(a.bins == 6);
  CHECK(a.max_relative_deviation == Approx(1.0).epsilon(1e-14));
  double wmax = 0;
  for (int k = 1; k <= 6; ++k) wmax = std::max(wmax, model.flux_weight(k));
  CHECK(a.fitted_c == Approx(wmax).epsilon(1e-14));
  CHECK(a.bound_satisfied_fraction == 0.0);

  auto flat = sp;
  for (std::size_t b = 0; b < flat.flux.size(); ++b) flat.flux[b] = 0.7 * (1 + 0.1 * std::sin(b));
  const auto d0 = flux_audit(flat, make_model({0.0}, {}));
  double worst = 0;
  for (int k = 1; k <= 6; ++k) worst = std::max(worst, 0.1 * std::abs(std::sin(k - 1)));
  CHECK(d0.fitted_c == Approx(worst).epsilon(1e-12));
  CHECK(d0.bound_satisfied_fraction == 1.0);

  formula::SpectralModelParams far;
  far.k0 = 100;
  far.k_nu = 200;
  CHECK_THROWS_AS(flux_audit(sp, formula::SpectralModels(far, {}, 0.75, 0.4)), ConfigError);
}

TEST_CASE("spectrum fit inverts synthetic model spectra") {
  const auto model = make_model({0.5, 0.3}, {0.8, 0.4}, 64);
  for (double t : {0.0, 1.0, 5.0}) {
    ShellSpectrum sp;
    for (int k = 1; k <= 64; ++k) {
      sp.k_centers.push_back(k);
      sp.e_k.push_back(model.model_spectrum(k, t));
    }
    const auto fit = spectrum_fit(sp, model, 2, 64);
    CHECK_FALSE(fit.regularized);
    CHECK(fit.c_kolmogorov == Approx(1.3).epsilon(1e-8));
    CHECK(fit.betas[0] == Approx(model.beta_decay(1, t)).epsilon(1e-8));
    CHECK(fit.betas[1] == Approx(model.beta_decay(2, t)).epsilon(1e-8));
    CHECK(fit.residual <= 1e-12);
  }

  // Pure Kolmogorov nests in the model.
  ShellSpectrum k41;
  for (int k = 1; k <= 40; ++k) {
    k41.k_centers.push_back(k);
    k41.e_k.push_back(2.0 * std::pow(0.7, 2.0 / 3.0) * std::pow(k, -5.0 / 3.0));
  }
  const auto f = spectrum_fit(k41, model, 1, 40);
  CHECK(f.c_kolmogorov == Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(f.betas[0]) <= 1e-9);
  CHECK(std::abs(f.betas[1]) <= 1e-9);

  // Decay exponents from two refits.
  const double t1 = 1, t2 = 9;
  ShellSpectrum s1, s2;
  for (int k = 1; k <= 64; ++k) {
    s1.k_centers.push_back(k);
    s2.k_centers.push_back(k);
    s1.e_k.push_back(model.model_spectrum(k, t1));
    s2.e_k.push_back(model.model_spectrum(k, t2));
  }
  const auto f1 = spectrum_fit(s1, model, 1, 64), f2 = spectrum_fit(s2, model, 1, 64);
  for (std::size_t j = 1; j <= 2; ++j) {
    const double alpha = -std::log(f2.betas[j - 1] / f1.betas[j - 1]) / std::log((1 + 0.4 * t2) / (1 + 0.4 * t1));
    CHECK(alpha == Approx(model.beta_exponent(j)).epsilon(0.05));
  }

  CHECK_THROWS_AS(spectrum_fit(k41, model, 1, 7), ConfigError);
  const auto deep = make_model({0.1, 0.1, 0.1, 0.1, 0.1}, {0.1, 0.1, 0.1, 0.1, 0.1}, 1000);
  ShellSpectrum narrow;
  for (int k = 500; k < 508; ++k) {
    narrow.k_centers.push_back(k);
    narrow.e_k.push_back(deep.model_spectrum(k, 0));
  }
  const auto nf = spectrum_fit(narrow, deep, 500, 508);
  CHECK(nf.regularized);
  CHECK_FALSE(nf.warning.empty());
}

TEST_CASE("structure functions") {
  const Grid g({32, 32, 32});
  const PhysField u = testfields::sample(g, 3, [](int c, double x, double, double) { return c == 0 ? std::sin(x) : 0.0; });
  std::vector<double> r;
  for (int m = 0; m <= 8; ++m) r.push_back(m * g.dx(0));
  StructureOptions opts;
  opts.axes = {0};
  const auto t = structure_functions(u, {1, 2, 3}, r, opts);
  for (std::size_t j = 0; j < r.size(); ++j) CHECK(t.s_p_r[1][j] == Approx(1 - std::cos(r[j])).epsilon(1e-12));
  for (std::size_t o = 0; o < 3; ++o) CHECK(t.s_p_r[o][0] == 0.0);
  CHECK(t.zeta[1] == Approx(2.0).epsilon(0.05));

  const PhysField w = random_field(g, 2);
  double u2 = 0;
  for (double v : w.data) u2 += v * v;
  u2 /= g.npoints();
  const auto rt = structure_functions(w, {2}, r);
  for (double v : rt.s_p_r[0]) CHECK(v <= 2 * u2);
  opts = {};
  opts.n_samples = 500;
  opts.seed = 3;
  const auto sa = structure_functions(w, {2}, r, opts);
  const auto sb = structure_functions(w, {2}, r, opts);
  CHECK(sa.s_p_r == sb.s_p_r);
  CHECK_THROWS_AS(structure_functions(w, {2}, {0.5 * g.dx(0)}), ConfigError);
}

TEST_CASE("exceptional set") {
  const Grid g({32, 32, 32});
  const PhysField w = random_field(g, 13);
  const auto top = exceptional_set(w, 1.0 / g.npoints());
  CHECK(top.measured_fraction == Approx(1.0 / g.npoints()));
  CHECK_FALSE(top.ties);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.001, 0.01, 0.05, 0.1, 0.3, 0.7}) {
    const auto e = exceptional_set(w, eps);
    CHECK(e.lambda_eps <= prev);
    CHECK(e.measured_fraction <= eps);
    CHECK(e.lambda_eps <= e.chebyshev_lambda);
    prev = e.lambda_eps;
  }
  // |grad u| = 1 everywhere: every point ties.
  const PhysField helix = testfields::sample(g, 3, [](int c, double, double, double z) {
    return c == 0 ? std::sin(z) : (c == 1 ? std::cos(z) : 0.0);
  });
  const auto tie = exceptional_set(helix, 0.1);
  CHECK(tie.lambda_eps == Approx(1.0).epsilon(1e-12));
  CHECK(tie.ties == (tie.measured_fraction > 0.1));
  CHECK_THROWS_AS(exceptional_set(w, 1.0), ConfigError);
}

TEST_CASE("box counting") {
  const Grid g({64, 64, 64});
  const std::vector<unsigned char> full(g.npoints(), 1);
  CHECK(box_counting_dimension(full, g).dimension == Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(box_counting_dimension(slab_mask(g), g).dimension - 2.0) <= 0.15);
  std::vector<unsigned char> point(g.npoints(), 0);
  point[12345] = 1;
  CHECK(std::abs(box_counting_dimension(point, g).dimension) <= 0.05);
  CHECK_THROWS_AS(box_counting_dimension(std::vector<unsigned char>(g.npoints(), 0), g), NumericalError);
  const Grid g2({32, 32});
  CHECK(box_counting_dimension(std::vector<unsigned char>(g2.npoints(), 1), g2).dimension == Approx(2.0));
}

TEST_CASE("local scaling exponents") {
  const Grid g({32, 32, 32});
  const PhysField smooth = make_shear(g, 1, 1.0);
  const auto ls = local_scaling_histogram(smooth, {1, 2, 4});
  CHECK(ls.points > 0);
  CHECK(ls.median_h == Approx(1.0).epsilon(0.15));
  for (double d : ls.d_of_h) CHECK(d <= 3.0 + 1e-12);
  testgen::Gen gen(8);
  PhysField noise(g, 3);
  for (auto& v : noise.data) v = gen.normal();
  const auto ln = local_scaling_histogram(noise, {1, 2, 4});
  CHECK(ln.points > 0);
  for (double d : ln.d_of_h) CHECK(d <= 3.0 + 1e-12);
  CHECK_THROWS_AS(local_scaling_histogram(smooth, {1, 2}), ConfigError);
}

TEST_CASE("alignment statistics") {
  const Grid g({32, 32, 32});
  const auto a = alignment_statistics(testfields::abc(g));
  double total = 0;
  for (double c : a.histogram) total += c;
  CHECK(total + a.excluded == g.npoints());
  CHECK(a.max_trace <= 1e-10);
  CHECK(a.mean_cos >= 0.0);
  CHECK(a.mean_cos <= 1.0);
  const auto b = alignment_statistics(testfields::abc(g));
  CHECK(a.histogram == b.histogram);
  const auto w = alignment_statistics(random_field(g, 21));
  CHECK(w.max_trace <= 1e-10);
  const auto z = alignment_statistics(PhysField(g, 3));
  CHECK(z.excluded == g.npoints());
  CHECK_THROWS_AS(alignment_statistics(PhysField(Grid({16, 16}), 2)), ConfigError);
}

TEST_CASE("ratio series") {
  const Grid g({16, 16, 16});
  SolverConfig cfg;
  cfg.s = 0.75;
  cfg.t_end = 0.2;
  cfg.record_every = 0.05;
  const auto res = run(make_shear(g, 1, 1.0), cfg);
  const auto rs = ratio_series(res.records);
  CHECK(rs.points.size() == res.records.size());
  for (const auto& p : rs.points) CHECK(p.second == Approx(1.0).epsilon(1e-12));

  SolverConfig half = cfg;
  half.s = 0.5;
  const SolverState st = make_state(random_field(g, 3, 4), cfg);
  const auto rec = diagnose(st, half);
  CHECK(ratio_series({rec}).points[0].second == Approx(1.0).epsilon(1e-14));
  DiagnosticsRecord zero;
  CHECK(ratio_series({zero}).excluded == 1);
}
