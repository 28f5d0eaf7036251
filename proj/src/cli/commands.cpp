#include "nslog/cli/commands.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "nslog/commutator.hpp"
#include "nslog/diagnostics.hpp"
#include "nslog/error.hpp"
#include "nslog/fft.hpp"
#include "nslog/formula.hpp"
#include "nslog/initial_data.hpp"
#include "nslog/ode.hpp"
#include "nslog/snapshot.hpp"
#include "nslog/solver.hpp"
#include "nslog/spectral.hpp"

namespace nslog::cli {

namespace {

using Row = std::vector<Csv::Cell>;

std::int64_t as_int(bool b) { return b ? 1 : 0; }

formula::LogLadderParams ladder(const RunConfig& c) {
  formula::LogLadderParams p = formula::LogLadderParams::with_deltas(c.list("ladder.deltas"));
  if (!c.list("ladder.cs").empty()) p.cs = c.list("ladder.cs");
  p.c0 = c.real("ladder.c0");
  p.c3 = c.real("ladder.c3");
  p.validate();
  return p;
}

Grid make_grid(const RunConfig& c) {
  std::vector<std::size_t> n;
  for (double x : c.list("grid.npts")) n.push_back(static_cast<std::size_t>(x));
  return Grid(n, std::vector<double>(n.size(), c.real("grid.box")));
}

std::vector<double> linspace(double lo, double hi, std::int64_t n) {
  std::vector<double> out;
  for (std::int64_t i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

std::vector<double> logspace(double lo, double hi, std::int64_t n) {
  std::vector<double> out;
  for (double e : linspace(std::log(lo), std::log(hi), n)) out.push_back(std::exp(e));
  out.front() = lo;
  out.back() = hi;
  return out;
}

SolverConfig solver_config(const RunConfig& c) {
  SolverConfig s;
  s.nu = c.real("solver.nu");
  s.s = c.real("solver.s");
  s.dt_policy = c.text("solver.dt_policy") == "cfl" ? DtPolicy::cfl : DtPolicy::fixed;
  s.dt = c.real("solver.dt");
  s.cfl = c.real("solver.cfl");
  s.t_end = c.real("solver.t_end");
  s.dealias = c.flag("solver.dealias");
  s.record_every = c.real("solver.record_every");
  s.q = c.real("solver.q");
  s.forcing.enabled = c.flag("solver.forcing");
  s.forcing.k_lo = c.real("solver.forcing_k_lo");
  s.forcing.k_hi = c.real("solver.forcing_k_hi");
  s.forcing.injection = c.real("solver.injection");
  s.params = ladder(c);
  s.validate();
  return s;
}

PhysField load_snapshot(const std::string& path, RunContext* ctx) {
  PhysField f;
  try {
    f = read_snapshot(path);
  } catch (const DataError& e) {
    throw IoError("cannot parse snapshot " + path + ": " + e.what());
  }
  if (ctx) ctx->note_input(path);
  return f;
}

Csv records_csv(const std::vector<DiagnosticsRecord>& records) {
  std::vector<std::string> h;
  for (const char* n : record_columns()) h.emplace_back(n);
  Csv csv(h);
  for (const auto& r : records) {
    Row row;
    for (double v : record_values(r)) row.emplace_back(v);
    csv.add(row);
  }
  return csv;
}

std::string now_iso() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

formula::SpectralModels diag_model(double k0, double k_nu, double eps, const formula::LogLadderParams& p, double s) {
  formula::SpectralModelParams mp;
  mp.k0 = k0;
  mp.k_nu = k_nu;
  mp.eps_rate = eps;
  return formula::SpectralModels(mp, p, s, formula::exponent_pack(s, 12).gamma_decay);
}

// Flux audit stage shared by analyze and audit; eps <= 0 means the measured fractional rate.
void flux_audit_stage(RunContext& ctx, const diag::ShellSpectrum& sp, double k0, double k_nu, double eps, double s) {
  const double e = eps > 0 ? eps : sp.eps_rate_frac;
  if (!(e > 0)) {
    ctx.stage("flux_audit", "skipped", "zero dissipation rate");
    return;
  }
  const auto a = diag::flux_audit(sp, diag_model(k0, k_nu, e, ladder(ctx.config()), s));
  Csv csv({"eps", "k0", "k_nu", "bins", "max_relative_deviation", "fitted_c", "bound_satisfied_fraction"});
  csv.add({e, k0, k_nu, static_cast<std::int64_t>(a.bins), a.max_relative_deviation, a.fitted_c,
           a.bound_satisfied_fraction});
  ctx.write_csv("flux_audit.csv", csv);
  ctx.stage("flux_audit", "ok");
}

void alignment_stage(RunContext& ctx, const PhysField& f, const std::string& name) {
  if (f.grid.rank() != 3 || f.ncomp != 3) {
    ctx.stage("alignment", "skipped", "needs a three-dimensional field");
    return;
  }
  const auto a = diag::alignment_statistics(f);
  Csv csv({"angle_lo", "angle_hi", "count"});
  for (std::size_t b = 0; b < a.histogram.size(); ++b) csv.add({a.bin_edges[b], a.bin_edges[b + 1], a.histogram[b]});
  ctx.write_csv(name, csv);
  Csv sum({"mean_cos", "excluded", "max_trace"});
  sum.add({a.mean_cos, static_cast<std::int64_t>(a.excluded), a.max_trace});
  ctx.write_csv("alignment_summary.csv", sum);
  ctx.stage("alignment", "ok");
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const PreconditionError*>(&e))
    return kConfigFailure;
  if (dynamic_cast<const IoError*>(&e)) return kIoFailure;
  if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const DataError*>(&e)) return kNumericalFailure;
  return kNumericalFailure;
}

std::string RunContext::path(const std::string& name) const {
  return (std::filesystem::path(cfg_.out_dir) / name).string();
}

void RunContext::write(const std::string& name, const std::string& bytes) {
  atomic_write(path(name), bytes);
  outputs_.push_back({name, sha256_hex(bytes)});
}

void RunContext::write_field(const std::string& name, const PhysField& f) {
  const auto bytes = encode_snapshot(f);
  write(name, std::string(bytes.begin(), bytes.end()));
}

void RunContext::note_input(const std::string& p) { inputs_.push_back({p, sha256_file(p)}); }

void RunContext::stage(const std::string& name, const std::string& status, const std::string& message) {
  stages_.push_back({name, status, message});
}

PhysField initial_field(const RunConfig& c, RunContext* ctx) {
  const std::string kind = c.text("initial.kind");
  if (kind == "snapshot") return load_snapshot(c.text("initial.path"), ctx);
  const Grid g = make_grid(c);
  const double amp = c.real("initial.amp");
  if (kind == "shear") return make_shear(g, static_cast<int>(c.integer("initial.k")), amp);
  if (kind == "taylor_green") return make_taylor_green_2d(g, amp);
  if (kind == "shell") return make_shell_datum(g, c.real("initial.r"));
  if (kind == "zero") return PhysField(g, g.rank());
  if (kind == "constant") {
    PhysField f(g, g.rank());
    for (auto& v : f.data) v = amp;
    return f;
  }
  if (kind == "abc") {
    if (g.rank() != 3) throw ConfigError("initial.kind = abc needs a three-dimensional grid");
    PhysField f(g, 3);
    const double k = 2 * std::numbers::pi / g.box(0);
    for (std::size_t i = 0; i < g.npoints(); ++i) {
      const double x = k * f.coord(i, 0), y = k * f.coord(i, 1), z = k * f.coord(i, 2);
      f.comp(0)[i] = amp * (std::sin(z) + std::cos(y));
      f.comp(1)[i] = amp * (std::sin(x) + std::cos(z));
      f.comp(2)[i] = amp * (std::sin(y) + std::cos(x));
    }
    return f;
  }
  RandomFieldSpec spec;
  spec.slope = c.real("initial.slope");
  spec.k_lo = c.real("initial.k_lo");
  spec.k_hi = c.real("initial.k_hi");
  spec.energy = c.real("initial.energy");
  spec.seed = c.seed;
  return make_random_divfree(g, spec);
}

void cmd_formulas(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const auto params = ladder(c);
  const double s = c.real("formulas.s"), q = c.real("formulas.q"), eta = c.real("ladder.eta");
  const auto sgrid = linspace(c.real("formulas.s_min"), c.real("formulas.s_max"), c.integer("formulas.s_points"));

  Csv packs({"s", "q", "theta", "alpha_gn", "eta", "mu", "gamma_decay", "p_scaling", "p_admissible", "delta01",
             "beta_ode"});
  for (double si : sgrid) {
    const auto p = formula::exponent_pack(si, q, eta);
    packs.add({si, q, p.theta, p.alpha_gn, p.eta, p.mu, p.gamma_decay, p.p_scaling, as_int(p.p_admissible), p.delta01,
               p.beta_ode});
  }
  ctx.write_csv("exponent_packs.csv", packs);

  Csv alpha({"levels", "alpha_threshold", "threshold_at_s"});
  for (std::size_t n = 1; n <= params.n(); ++n) {
    const auto pre = params.prefix(n);
    alpha.add({static_cast<std::int64_t>(n), formula::alpha_threshold(pre), formula::threshold_asymptote(s, 1.0, pre)});
  }
  ctx.write_csv("alpha_sweep.csv", alpha);

  Csv curve({"s", "threshold", "pathway_level"});
  for (double si : sgrid) {
    const auto lvl = formula::pathway_level(si, params);
    curve.add({si, formula::threshold_asymptote(si, 1.0, params), lvl ? static_cast<std::int64_t>(*lvl) : std::int64_t{-1}});
  }
  ctx.write_csv("threshold_curve.csv", curve);

  const auto bx = formula::blowup_exponents(s, q, params);
  Csv blow({"s", "q", "grad_exp_beta_form", "grad_exp_explicit_form", "velocity_exp", "filament_exp", "alignment_exp",
            "singular_dim"});
  blow.add({s, q, bx.grad_exp_beta_form, bx.grad_exp_explicit_form, bx.velocity_exp, bx.filament_exp,
            bx.alignment_exp, bx.singular_dim});
  ctx.write_csv("blowup_exponents.csv", blow);

  Csv dim({"eps", "dim_bound", "dim_bound_raw", "clamped", "theta_eps"});
  for (double e : logspace(c.real("formulas.eps_min"), c.real("formulas.eps_max"), c.integer("formulas.eps_points"))) {
    const auto gm = formula::exceptional_geometry(e, params);
    dim.add({e, gm.dim_bound, gm.dim_bound_raw, as_int(gm.clamped), gm.theta_eps});
  }
  ctx.write_csv("dimension_bounds.csv", dim);

  const auto pmax = c.integer("formulas.p_max");
  std::vector<std::string> zh = {"s"};
  for (std::int64_t p = 1; p <= pmax; ++p) zh.push_back("zeta_" + std::to_string(p));
  Csv zeta(zh);
  for (double si : sgrid) {
    const formula::MultifractalModel mf(si, params);
    Row row = {si};
    for (std::int64_t p = 1; p <= pmax; ++p) row.emplace_back(mf.zeta(static_cast<double>(p)));
    zeta.add(row);
  }
  ctx.write_csv("zeta_table.csv", zeta);

  const formula::MultifractalModel mf(s, params);
  Csv leg({"p", "zeta", "zeta_legendre", "zeta_legendre_numeric", "zeta_product_quadratic", "intermittency"});
  for (std::int64_t i = 1; i <= 2 * pmax; ++i) {
    const double p = 0.5 * static_cast<double>(i);
    leg.add({p, mf.zeta(p), mf.zeta_legendre(p), mf.zeta_legendre_numeric(p), mf.zeta_product_quadratic(p),
             mf.intermittency(p)});
  }
  ctx.write_csv("legendre.csv", leg);

  Csv dh({"h", "D"});
  const double width = 3.0 * std::sqrt(mf.sigma2());
  for (double h : linspace(mf.h0() - width, mf.h0() + width, c.integer("formulas.h_points"))) dh.add({h, mf.spectrum(h)});
  ctx.write_csv("multifractal_spectrum.csv", dh);

  formula::SpectralModelParams mp;
  mp.k0 = c.real("formulas.k0");
  mp.k_nu = c.real("formulas.k_nu");
  mp.eps_rate = c.real("formulas.eps_rate");
  mp.nu = c.real("formulas.nu");
  mp.beta0 = c.list("formulas.beta0");
  const auto pack = formula::exponent_pack(s, q, eta);
  const formula::SpectralModels sm(mp, params, s, pack.gamma_decay);
  const double t = c.real("formulas.t");
  Csv spec({"k", "flux_weight", "flux_bound", "model_spectrum", "limiting_spectrum"});
  for (double k : logspace(mp.k0, mp.k_nu, c.integer("formulas.k_points")))
    spec.add({k, sm.flux_weight(k), sm.flux_bound(k), sm.model_spectrum(k, t), sm.limiting_spectrum(k, t)});
  ctx.write_csv("spectral_models.csv", spec);
  ctx.stage("formulas", "ok");
}

void cmd_ode(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const double t_end = c.real("ode.t_end"), tol = c.real("ode.tol");
  Csv summary({"quantity", "value"});
  ode::OdeTrajectory tr;
  if (c.text("ode.kind") == "comparison") {
    const ode::ComparisonOde o{c.real("ode.y0"), c.real("ode.c"), c.real("ode.mu")};
    o.validate();
    const double cc = o.c, mu = o.mu;
    tr = ode::integrate([=](double, double y) { return cc * std::pow(y, 1.0 + mu); }, o.y0, t_end, tol);
    const double ts = o.blow_up_time();
    summary.add({"t_star_closed_form", ts});
    summary.add({"expected_exponent", -1.0 / mu});
    double slope = std::numeric_limits<double>::quiet_NaN();
    if (tr.terminal == ode::Terminal::blew_up) {
      try {
        slope = ode::fit_blowup_exponent(tr, tr.t_event, c.real("ode.fit_lo"), c.real("ode.fit_hi"));
      } catch (const NumericalError& e) {
        ctx.stage("exponent_fit", "skipped", e.what());
      }
    }
    summary.add({"fitted_exponent", slope});
    Csv traj({"t", "y", "closed_form"});
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const double t = tr.times[i];
      traj.add({t, tr.values[i], t < ts ? ode::closed_form_z(o, t) : std::numeric_limits<double>::infinity()});
    }
    ctx.write_csv("trajectory.csv", traj);
  } else {
    const ode::DichotomyOde o{c.real("ode.y0"), c.real("ode.c1"), c.real("ode.c2"), c.real("ode.beta"),
                              c.real("ode.omega")};
    const auto r = ode::run_dichotomy(o, t_end, tol);
    tr = r.trajectory;
    summary.add({"branch", ode::to_string(r.branch)});
    summary.add({"threshold", r.threshold ? *r.threshold : std::numeric_limits<double>::quiet_NaN()});
    Csv traj({"t", "y"});
    for (std::size_t i = 0; i < tr.times.size(); ++i) traj.add({tr.times[i], tr.values[i]});
    ctx.write_csv("trajectory.csv", traj);
  }
  summary.add({"terminal", ode::to_string(tr.terminal)});
  summary.add({"t_event", tr.t_event});
  summary.add({"t_lo", tr.t_lo});
  summary.add({"t_hi", tr.t_hi});
  ctx.write_csv("summary.csv", summary);
  ctx.stage("ode", "ok");
}

void cmd_simulate(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const SolverConfig sc = solver_config(c);
  const PhysField u0 = initial_field(c, &ctx);
  ctx.write_field("initial.nsl1", u0);
  const auto adm = admissibility_check(u0, sc.s, sc.q, sc.params);
  const RunResult res = run(u0, sc);
  ctx.write_csv("records.csv", records_csv(res.records));
  if (c.flag("solver.write_snapshot")) ctx.write_field("final.nsl1", inverse(res.final_state.u));
  Csv summary({"quantity", "value"});
  summary.add({"steps", static_cast<std::int64_t>(res.final_state.steps)});
  summary.add({"t_final", res.final_state.t});
  summary.add({"criterion_exponent", criterion_exponent(sc)});
  summary.add({"admissibility_lhs", adm.lhs});
  summary.add({"admissibility_rhs", adm.rhs});
  summary.add({"admissible", as_int(adm.admissible)});
  ctx.write_csv("summary.csv", summary);
  ctx.stage("simulate", "ok");
}

void cmd_analyze(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const std::string input = c.text("analyze.input");
  const PhysField f = input.empty() ? initial_field(c, &ctx) : load_snapshot(input, &ctx);
  ctx.write_field("input.nsl1", f);
  const Grid& g = f.grid;
  const double nu = c.real("analyze.nu"), s = c.real("analyze.s");
  // Dissipation order s may be 1; the ladder spectral model takes its order from [formulas].
  const double model_s = c.real("formulas.s");

  const bool divfree = f.ncomp == g.rank() && divergence_ratio(forward(f)) <= kDivergenceTolerance;
  const auto sp = divfree ? diag::energy_flux(f, nu, s) : diag::energy_spectrum(f, nu, s);
  Csv spec({"k", "E", "T", "Pi"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t b = 0; b < sp.k_centers.size(); ++b)
    spec.add({sp.k_centers[b], sp.e_k[b], divfree ? sp.transfer[b] : nan, divfree ? sp.flux[b] : nan});
  ctx.write_csv("spectrum.csv", spec);
  Csv rates({"mean_energy", "total_energy", "eps_rate_s1", "eps_rate_frac"});
  rates.add({sp.mean_energy, sp.total_energy(), sp.eps_rate_s1, sp.eps_rate_frac});
  ctx.write_csv("spectrum_summary.csv", rates);
  ctx.stage("spectrum", "ok", divfree ? "" : "field not divergence-free; transfer omitted");

  if (divfree) {
    flux_audit_stage(ctx, sp, c.real("analyze.k0"), c.real("analyze.k_nu"), c.real("analyze.eps_rate"), model_s);
    try {
      const double e = c.real("analyze.eps_rate") > 0 ? c.real("analyze.eps_rate") : sp.eps_rate_frac;
      const auto model = diag_model(c.real("analyze.k0"), c.real("analyze.k_nu"), e > 0 ? e : 1.0, ladder(c), model_s);
      const auto fit = diag::spectrum_fit(sp, model, std::max(c.real("analyze.fit_k_lo"), c.real("analyze.k0")),
                                          c.real("analyze.fit_k_hi"));
      std::vector<std::string> h = {"c_kolmogorov", "residual", "regularized", "bins"};
      for (std::size_t j = 1; j <= fit.betas.size(); ++j) h.push_back("beta_" + std::to_string(j));
      Csv csv(h);
      Row row = {fit.c_kolmogorov, fit.residual, as_int(fit.regularized), static_cast<std::int64_t>(fit.bins)};
      for (double b : fit.betas) row.emplace_back(b);
      csv.add(row);
      ctx.write_csv("spectrum_fit.csv", csv);
      ctx.stage("spectrum_fit", "ok", fit.warning);
    } catch (const ConfigError& e) {
      ctx.stage("spectrum_fit", "skipped", e.what());
    }
  }

  if (f.ncomp == g.rank()) {
    std::vector<double> seps;
    for (double cells : c.list("analyze.separations")) seps.push_back(cells * g.dx(0));
    bool cubic = true;
    for (int a = 1; a < g.rank(); ++a) cubic = cubic && g.dx(a) == g.dx(0);
    if (cubic) {
      diag::StructureOptions opts;
      opts.n_samples = static_cast<std::size_t>(c.integer("analyze.n_samples"));
      opts.seed = c.seed;
      const auto st = diag::structure_functions(f, c.list("analyze.orders"), seps, opts);
      Csv csv({"r", "p", "S"});
      for (std::size_t o = 0; o < st.orders.size(); ++o)
        for (std::size_t j = 0; j < st.r.size(); ++j) csv.add({st.r[j], st.orders[o], st.s_p_r[o][j]});
      ctx.write_csv("structure_functions.csv", csv);
      Csv z({"p", "zeta", "fit_lo", "fit_hi"});
      for (std::size_t o = 0; o < st.orders.size(); ++o) z.add({st.orders[o], st.zeta[o], st.fit_lo, st.fit_hi});
      ctx.write_csv("structure_exponents.csv", z);
      ctx.stage("structure_functions", "ok");
    } else {
      ctx.stage("structure_functions", "skipped", "grid spacing differs between axes");
    }
  }

  Csv ex({"eps", "lambda_eps", "measured_fraction", "ties", "chebyshev_lambda", "box_dimension", "box_residual"});
  bool first = true;
  for (double e : c.list("analyze.eps")) {
    const auto es = diag::exceptional_set(f, e);
    const auto bc = diag::box_counting_dimension(es.mask, g);
    ex.add({e, es.lambda_eps, es.measured_fraction, as_int(es.ties), es.chebyshev_lambda, bc.dimension, bc.fit_residual});
    if (first) {
      PhysField m(g, 1);
      for (std::size_t i = 0; i < g.npoints(); ++i) m.data[i] = es.mask[i] ? 1.0 : 0.0;
      ctx.write_field("exceptional_mask.nsl1", m);
      first = false;
    }
  }
  ctx.write_csv("exceptional_sets.csv", ex);
  ctx.stage("exceptional_sets", "ok");

  std::vector<int> radii;
  for (double r : c.list("analyze.radii")) radii.push_back(static_cast<int>(r));
  const auto ls = diag::local_scaling_histogram(f, radii, static_cast<std::size_t>(c.integer("analyze.histogram_bins")));
  Csv lsc({"h", "density", "D"});
  for (std::size_t b = 0; b < ls.h_centers.size(); ++b) lsc.add({ls.h_centers[b], ls.density[b], ls.d_of_h[b]});
  ctx.write_csv("local_scaling.csv", lsc);
  ctx.stage("local_scaling", "ok");

  alignment_stage(ctx, f, "alignment.csv");
}

void cmd_audit(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const PhysField f = initial_field(c, &ctx);
  const auto params = ladder(c);
  const double s = c.real("audit.s"), sigma = c.real("audit.sigma");
  const auto a = commutator_audit(f, s, sigma, params);
  Csv com({"s", "sigma", "lhs", "z", "grad_linf", "rhs_f1_term", "rhs_f2_term", "fitted_constant"});
  com.add({s, sigma, a.lhs, a.z, a.grad_linf, a.rhs_f1_term, a.rhs_f2_term, a.fitted_constant});
  ctx.write_csv("commutator.csv", com);
  ctx.stage("commutator", "ok");

  const auto sp = diag::energy_flux(f, c.real("solver.nu"), s);
  flux_audit_stage(ctx, sp, c.real("audit.k0"), c.real("audit.k_nu"), c.real("audit.eps_rate"), s);
  alignment_stage(ctx, f, "alignment.csv");

  const double t_end = c.real("audit.decay_t_end");
  if (t_end > 0) {
    SolverConfig sc = solver_config(c);
    sc.t_end = t_end;
    const auto res = run(f, sc);
    ctx.write_csv("records.csv", records_csv(res.records));
    const auto pack = formula::exponent_pack(sc.s > 0.5 && sc.s < 1 ? sc.s : 0.75, sc.q > 3 ? sc.q : 12);
    const auto d = decay_audit(res.records, pack, c.real("audit.c_env"), c.real("audit.beta_env"));
    Csv dc({"gamma_decay", "c_env", "beta_env", "violations", "margin", "records"});
    dc.add({pack.gamma_decay, c.real("audit.c_env"), c.real("audit.beta_env"), static_cast<std::int64_t>(d.violations),
            d.margin, static_cast<std::int64_t>(res.records.size())});
    ctx.write_csv("decay_audit.csv", dc);
    const auto rs = diag::ratio_series(res.records);
    Csv rc({"t", "ratio"});
    for (const auto& [t, r] : rs.points) rc.add({t, r});
    ctx.write_csv("ratio_series.csv", rc);
    Csv rt({"tail_slope", "reference_slope", "excluded"});
    rt.add({rs.tail_slope, -0.25, static_cast<std::int64_t>(rs.excluded)});
    ctx.write_csv("ratio_summary.csv", rt);
    ctx.stage("decay_audit", "ok");
  } else {
    ctx.stage("decay_audit", "skipped", "audit.decay_t_end = 0");
  }
}

SweepCrossing locate_crossing(const RunConfig& c, double rel) {
  const auto params = ladder(c);
  const double s = c.real("sweep.s"), q = c.real("sweep.q");
  auto g = [&](double lam) { return formula::dichotomy_omega(lam, s, q, params).omega - 1.0; };
  const auto grid = logspace(c.real("sweep.lambda_min"), c.real("sweep.lambda_max"), c.integer("sweep.points"));
  SweepCrossing out;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double lo = grid[i], hi = grid[i + 1];
    double glo = g(lo);
    const double ghi = g(hi);
    if (glo == 0.0) return {true, lo, lo, lo};
    if ((glo < 0) == (ghi < 0)) continue;
    while (hi - lo > rel * lo) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      if ((gm < 0) == (glo < 0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    return {true, lo, hi, 0.5 * (lo + hi)};
  }
  if (g(grid.back()) == 0.0) return {true, grid.back(), grid.back(), grid.back()};
  return out;
}

void cmd_sweep(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const auto params = ladder(c);
  const double s = c.real("sweep.s"), q = c.real("sweep.q");
  const bool with_ode = c.flag("sweep.run_ode");
  Csv csv({"lambda", "omega", "branch", "ode_outcome"});
  for (double lam : logspace(c.real("sweep.lambda_min"), c.real("sweep.lambda_max"), c.integer("sweep.points"))) {
    const auto w = formula::dichotomy_omega(lam, s, q, params);
    std::string outcome = "not_run";
    if (with_ode) {
      const ode::DichotomyOde o{c.real("sweep.y0"), c.real("sweep.c1"), c.real("sweep.c2"), c.real("sweep.beta"), w.omega};
      outcome = ode::to_string(ode::run_dichotomy(o, c.real("sweep.t_end"), c.real("sweep.tol")).branch);
    }
    csv.add({lam, w.omega, formula::to_string(w.branch), outcome});
  }
  ctx.write_csv("sweep.csv", csv);
  const auto x = locate_crossing(c);
  Csv cr({"found", "lambda_lo", "lambda_hi", "lambda_star", "omega_at_star"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  cr.add({as_int(x.found), x.found ? x.lambda_lo : nan, x.found ? x.lambda_hi : nan, x.found ? x.lambda_star : nan,
          x.found ? formula::dichotomy_omega(x.lambda_star, s, q, params).omega : nan});
  ctx.write_csv("crossing.csv", cr);
  ctx.stage("sweep", "ok", x.found ? "" : "no sign change of omega - 1 in the lambda range");
}

std::vector<FileDigest> manifest_outputs(const std::string& manifest_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse manifest " + manifest_path + ": " + e.what());
  }
  std::vector<FileDigest> out;
  for (const auto& o : j.at("outputs")) out.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>()});
  return out;
}

RunOutcome execute(const RunConfig& cfg, const RunOptions& opts) {
  RunContext ctx(cfg);
  RunOutcome out;
  const std::string start = now_iso();
  try {
    switch (cfg.mode) {
      case Mode::formulas:
        cmd_formulas(ctx);
        break;
      case Mode::ode:
        cmd_ode(ctx);
        break;
      case Mode::simulate:
        cmd_simulate(ctx);
        break;
      case Mode::analyze:
        cmd_analyze(ctx);
        break;
      case Mode::audit:
        cmd_audit(ctx);
        break;
      case Mode::sweep:
        cmd_sweep(ctx);
        break;
    }
  } catch (const std::exception& e) {
    out.exit_code = exit_code_for(e);
    out.error = e.what();
    ctx.stage(to_string(cfg.mode), "failed", e.what());
  }

  if (out.exit_code == kOk && !opts.verify_manifest.empty()) {
    try {
      const auto want = manifest_outputs(opts.verify_manifest);
      std::string diff;
      if (want.size() != ctx.outputs().size()) diff = "output count differs";
      for (std::size_t i = 0; diff.empty() && i < want.size(); ++i)
        if (!(want[i] == ctx.outputs()[i])) diff = "digest mismatch for " + want[i].path;
      if (diff.empty()) {
        ctx.stage("verify", "ok");
      } else {
        ctx.stage("verify", "failed", diff);
        out.exit_code = kNumericalFailure;
        out.error = "verify: " + diff;
      }
    } catch (const std::exception& e) {
      ctx.stage("verify", "failed", e.what());
      out.exit_code = exit_code_for(e);
      out.error = e.what();
    }
  }

  nlohmann::ordered_json m;
  m["tool"] = "nslog";
  m["version"] = kToolVersion;
  m["mode"] = to_string(cfg.mode);
  m["seed"] = cfg.seed;
  m["config"] = emit_config(cfg);
  m["start"] = start;
  m["end"] = now_iso();
  m["inputs"] = nlohmann::ordered_json::array();
  for (const auto& i : ctx.inputs()) m["inputs"].push_back({{"path", i.path}, {"sha256", i.sha256}});
  m["outputs"] = nlohmann::ordered_json::array();
  for (const auto& o : ctx.outputs()) m["outputs"].push_back({{"path", o.path}, {"sha256", o.sha256}});
  m["stages"] = nlohmann::ordered_json::array();
  for (const auto& s : ctx.stages()) m["stages"].push_back({{"name", s.name}, {"status", s.status}, {"message", s.message}});
  m["status"] = out.exit_code == kOk ? "ok" : "failed";
  m["exit_code"] = out.exit_code;
  out.outputs = ctx.outputs();
  out.manifest_path = ctx.path("manifest.json");
  try {
    atomic_write(out.manifest_path, m.dump(2) + "\n");
  } catch (const IoError& e) {
    if (out.exit_code == kOk) {
      out.exit_code = kIoFailure;
      out.error = e.what();
    }
  }
  return out;
}

}  // namespace nslog::cli
