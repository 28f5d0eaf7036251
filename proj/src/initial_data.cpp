#include "nslog/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nslog/commutator.hpp"
#include "nslog/error.hpp"
#include "nslog/fft.hpp"
#include "nslog/parallel.hpp"
#include "nslog/spectral.hpp"

namespace nslog {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class F>
PhysField sample_vector(const Grid& g, F&& f) {
  PhysField out(g, g.rank());
  par::for_each(g.npoints(), [&](std::size_t i) {
    const auto id = unflatten(g, i);
    double x[3] = {0, 0, 0};
    for (int a = 0; a < g.rank(); ++a) x[a] = static_cast<double>(id[a]) * g.dx(a);
    double v[3] = {0, 0, 0};
    f(x, v);
    for (int c = 0; c < g.rank(); ++c) out.comp(c)[i] = v[c];
  });
  return out;
}

}  // namespace

PhysField make_shear(const Grid& g, int k, double amp) {
  if (k < 1) throw ConfigError("make_shear: k must be positive");
  if (3 * static_cast<std::size_t>(k) >= g.n(1)) {
    std::ostringstream os;
    os << "make_shear: k = " << k << " lies outside the dealiased range for npts = " << g.n(1);
    throw ConfigError(os.str());
  }
  const double ky = kTwoPi * k / g.box(1);
  return sample_vector(g, [&](const double* x, double* v) { v[0] = amp * std::sin(ky * x[1]); });
}

PhysField make_taylor_green_2d(const Grid& g, double amp) {
  if (g.rank() != 2) throw ConfigError("make_taylor_green_2d: grid must be two-dimensional");
  const double kx = kTwoPi / g.box(0), ky = kTwoPi / g.box(1);
  return sample_vector(g, [&](const double* x, double* v) {
    v[0] = amp * std::sin(kx * x[0]) * std::cos(ky * x[1]);
    v[1] = -amp * std::cos(kx * x[0]) * std::sin(ky * x[1]);
  });
}

PhysField make_random_divfree(const Grid& g, const RandomFieldSpec& spec) {
  if (!(spec.k_lo >= 1.0) || !(spec.k_hi >= spec.k_lo))
    throw ConfigError("make_random_divfree: k range must satisfy 1 <= k_lo <= k_hi");
  if (!(spec.energy >= 0.0)) throw ConfigError("make_random_divfree: energy must be non-negative");
  const auto& md = g.modes();
  const double dk = g.kmin();
  const auto nbins = static_cast<std::size_t>(std::floor(spec.k_hi)) + 1;
  auto bin_of = [&](std::size_t i) { return static_cast<std::size_t>(std::lround(std::sqrt(md.k2[i]) / dk)); };
  auto in_band = [&](std::size_t i) {
    if (md.k2[i] == 0.0) return false;
    const double b = static_cast<double>(bin_of(i));
    return b >= spec.k_lo && b <= spec.k_hi;
  };
  for (std::size_t i = 0; i < g.nmodes(); ++i)
    if (in_band(i) && !md.keep[i]) throw ConfigError("make_random_divfree: k_hi reaches beyond the 2/3 cutoff");

  // White noise in physical space keeps the spectrum Hermitian by construction.
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PhysField noise(g, g.rank());
  for (auto& v : noise.data) v = normal(rng);
  SpecField u = leray_project(forward(noise));
  std::vector<double> shell(nbins, 0.0);
  for (std::size_t i = 0; i < g.nmodes(); ++i) {
    if (!in_band(i)) {
      for (int c = 0; c < u.ncomp; ++c) u.comp(c)[i] = 0.0;
      continue;
    }
    double e = 0.0;
    for (int c = 0; c < u.ncomp; ++c) e += std::norm(u.comp(c)[i]);
    shell[bin_of(i)] += 0.5 * md.weight[i] * e;
  }
  std::vector<double> scale(nbins, 0.0);
  double total = 0.0;
  for (std::size_t b = 0; b < nbins; ++b) {
    if (shell[b] <= 0.0) continue;
    const double want = std::pow(static_cast<double>(b), spec.slope);
    scale[b] = std::sqrt(want / shell[b]);
    total += want;
  }
  if (total == 0.0) throw ConfigError("make_random_divfree: no modes in the requested k range");
  const double norm = std::sqrt(spec.energy / total);
  for (std::size_t i = 0; i < g.nmodes(); ++i) {
    if (!in_band(i)) continue;
    const double f = scale[bin_of(i)] * norm;
    for (int c = 0; c < u.ncomp; ++c) u.comp(c)[i] *= f;
  }
  return inverse(u);
}

double shell_cutoff(double rho) {
  if (rho <= 0.5 || rho >= 3.0) return 0.0;
  return std::exp(1.6 - 1.0 / (rho - 0.5) - 1.0 / (3.0 - rho));
}

PhysField make_shell_datum(const Grid& g, double r) {
  if (!(r > 0.0)) throw ConfigError("make_shell_datum: r must be positive");
  const auto& md = g.modes();
  const int d = g.rank();
  for (std::size_t i = 0; i < g.nmodes(); ++i) {
    if (md.keep[i]) continue;
    if (std::sqrt(md.k2[i]) < 3.0 * r) {
      std::ostringstream os;
      os << "make_shell_datum: shell [r/2, 3r] with r = " << r << " exceeds the 2/3 cutoff";
      throw ConfigError(os.str());
    }
  }
  const double e3[3] = {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
  const double amp = std::pow(r, 1.0 - d);
  SpecField w(g, d);
  par::for_each(g.nmodes(), [&](std::size_t i) {
    const double km = std::sqrt(md.k2[i]);
    if (km == 0.0) return;
    const double eta = shell_cutoff(km / r);
    if (eta == 0.0) return;
    const double radial = amp * std::pow(km / r, -2.5) * eta;
    double kh[3] = {0, 0, 0};
    for (int a = 0; a < d; ++a) kh[a] = md.k[a][i] / km;
    double v[3] = {0, 0, 0};
    if (d == 3) {
      v[0] = kh[1] * e3[2] - kh[2] * e3[1];
      v[1] = kh[2] * e3[0] - kh[0] * e3[2];
      v[2] = kh[0] * e3[1] - kh[1] * e3[0];
    } else {
      v[0] = -kh[1];
      v[1] = kh[0];
    }
    for (int c = 0; c < d; ++c) w.comp(c)[i] = cplx(0.0, radial * v[c]);
  });
  return inverse(w);
}

ScaledFamily make_scaled_family(const PhysField& base, double lambda, double s, double q,
                                const formula::LogLadderParams& params, double target) {
  if (!(lambda > 0.0)) throw ConfigError("make_scaled_family: lambda must be positive");
  const SpecField bh = forward(base);
  const double hs = hs_seminorm(bh, s);
  if (!(hs > 0.0)) throw ConfigError("make_scaled_family: base profile has zero H^s seminorm");
  const double lq = lq_norm(inverse(fractional_laplacian(bh, 0.5 * s)), q);
  const double a = lambda / hs;
  ScaledFamily out;
  out.field = base;
  for (auto& v : out.field.data) v *= a;
  out.hs_achieved = a * hs;
  out.lq_achieved = a * lq;
  out.log_weight = formula::log_weight(lambda, params);
  if (std::abs(out.lq_achieved - target) > 1e-10 * std::max(std::abs(target), out.lq_achieved)) {
    std::ostringstream os;
    os << "make_scaled_family: target " << target << " is off the profile's ray (achievable value "
       << out.lq_achieved << " at lambda = " << lambda << ")";
    throw ConfigError(os.str());
  }
  return out;
}

Admissibility admissibility_check(const PhysField& u0, double s, double q,
                                  const formula::LogLadderParams& params) {
  const SpecField uh = forward(u0);
  const double div = divergence_ratio(uh);
  if (div > kDivergenceTolerance) throw PreconditionError("admissibility_check: u0 is not divergence-free");
  Admissibility a;
  a.hs = hs_seminorm(uh, s);
  a.lhs = lq_norm(inverse(fractional_laplacian(uh, 0.5 * s)), q);
  a.rhs = params.c0 / formula::log_weight(a.hs, params);
  a.admissible = a.lhs <= a.rhs;
  return a;
}

}  // namespace nslog
