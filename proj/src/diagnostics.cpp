#include "nslog/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "nslog/commutator.hpp"
#include "nslog/error.hpp"
#include "nslog/fft.hpp"
#include "nslog/parallel.hpp"
#include "nslog/spectral.hpp"

namespace nslog::diag {

namespace {

std::size_t shifted(const Grid& g, std::size_t i, int axis, long shift) {
  auto id = unflatten(g, i);
  const auto n = static_cast<long>(g.n(axis));
  id[axis] = static_cast<std::size_t>(((static_cast<long>(id[axis]) + shift) % n + n) % n);
  std::size_t out = 0;
  for (int a = 0; a < g.rank(); ++a) out = out * g.n(a) + id[a];
  return out;
}

// Least-squares slope and rms residual of y against x.
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  double res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (my + slope * (x[i] - mx));
    res += e * e;
  }
  return {slope, std::sqrt(res / n)};
}

std::size_t bin_of(double k, double dk) { return static_cast<std::size_t>(std::lround(k / dk)); }

// Pointwise Frobenius norm of the velocity gradient.
std::vector<double> grad_magnitude(const PhysField& f) {
  const PhysField gr = inverse(gradient(forward(f)));
  const Grid& g = f.grid;
  std::vector<double> out(g.npoints());
  par::for_each(g.npoints(), [&](std::size_t i) {
    double a = 0;
    for (int c = 0; c < gr.ncomp; ++c) a += gr.comp(c)[i] * gr.comp(c)[i];
    out[i] = std::sqrt(a);
  });
  return out;
}

}  // namespace

double ShellSpectrum::total_energy() const {
  double e = mean_energy;
  for (double v : e_k) e += v * dk;
  return e;
}

std::vector<double> shell_energy(const SpecField& uh, double dk, std::size_t nbins) {
  const auto& md = uh.grid.modes();
  return par::bin_sum(uh.grid.nmodes(), nbins, [&](std::size_t i, std::vector<double>& b) {
    if (md.k2[i] == 0.0) return;
    const std::size_t bin = bin_of(std::sqrt(md.k2[i]), dk);
    if (bin >= nbins) return;
    double e = 0;
    for (int c = 0; c < uh.ncomp; ++c) e += std::norm(uh.comp(c)[i]);
    b[bin] += 0.5 * md.weight[i] * e / dk;
  });
}

ShellSpectrum energy_spectrum(const PhysField& f, double nu, double s) {
  f.require_finite();
  const Grid& g = f.grid;
  const SpecField uh = forward(f);
  const auto& md = g.modes();
  ShellSpectrum out;
  out.dk = g.kmin();
  const std::size_t nbins = bin_of(g.kmax(), out.dk);
  auto energy = [&](std::size_t i) {
    double e = 0;
    for (int c = 0; c < uh.ncomp; ++c) e += std::norm(uh.comp(c)[i]);
    return 0.5 * md.weight[i] * e;
  };
  const auto bins = shell_energy(uh, out.dk, nbins + 1);
  out.mean_energy = par::sum(g.nmodes(), [&](std::size_t i) { return md.k2[i] == 0.0 ? energy(i) : 0.0; });
  for (std::size_t b = 1; b <= nbins; ++b) {
    out.k_centers.push_back(static_cast<double>(b) * out.dk);
    out.e_k.push_back(bins[b]);
  }
  out.eps_rate_s1 = 2.0 * nu * par::sum(g.nmodes(), [&](std::size_t i) { return md.k2[i] * energy(i); });
  out.eps_rate_frac = 2.0 * nu * par::sum(g.nmodes(), [&](std::size_t i) {
    return md.k2[i] > 0 ? std::pow(md.k2[i], s) * energy(i) : 0.0;
  });
  return out;
}

ShellSpectrum energy_flux(const PhysField& f, double nu, double s) {
  ShellSpectrum out = energy_spectrum(f, nu, s);
  const Grid& g = f.grid;
  SpecField uh = forward(f);
  if (divergence_ratio(uh) > kDivergenceTolerance) throw PreconditionError("energy_flux: field is not divergence-free");
  dealias_inplace(uh);
  const SpecField n = leray_project(nonlinear_conservative(uh, true));
  const auto& md = g.modes();
  const std::size_t nbins = out.e_k.size();
  const auto t = par::bin_sum(g.nmodes(), nbins + 1, [&](std::size_t i, std::vector<double>& b) {
    double r = 0;
    for (int c = 0; c < uh.ncomp; ++c) r -= std::real(std::conj(uh.comp(c)[i]) * n.comp(c)[i]);
    b[bin_of(std::sqrt(md.k2[i]), out.dk)] += md.weight[i] * r;
  });
  out.transfer.assign(nbins, 0.0);
  out.flux.assign(nbins, 0.0);
  double cum = t[0];
  for (std::size_t b = 1; b <= nbins; ++b) {
    out.transfer[b - 1] = t[b] / out.dk;
    cum += t[b];
    out.flux[b - 1] = -cum;
  }
  return out;
}

FluxAudit flux_audit(const ShellSpectrum& spec, const formula::SpectralModels& model) {
  if (spec.flux.size() != spec.k_centers.size()) throw ConfigError("flux_audit: spectrum carries no flux");
  const auto& mp = model.model();
  const double eps = mp.eps_rate;
  if (!(eps > 0.0)) throw ConfigError("flux_audit: model eps_rate must be positive");
  FluxAudit out;
  std::size_t ok = 0;
  for (std::size_t b = 0; b < spec.k_centers.size(); ++b) {
    const double k = spec.k_centers[b];
    if (k < mp.k0 || k > mp.k_nu) continue;
    ++out.bins;
    const double dev = std::abs(spec.flux[b] - eps);
    out.max_relative_deviation = std::max(out.max_relative_deviation, dev / eps);
    out.fitted_c = std::max(out.fitted_c, dev * model.flux_weight(k) / eps);
    if (dev <= model.flux_bound(k)) ++ok;
  }
  if (out.bins == 0) throw ConfigError("flux_audit: no bins inside [k0, k_nu]");
  out.bound_satisfied_fraction = static_cast<double>(ok) / static_cast<double>(out.bins);
  return out;
}

SpectrumFit spectrum_fit(const ShellSpectrum& spec, const formula::SpectralModels& model, double k_lo,
                         double k_hi) {
  const double eps = model.model().eps_rate;
  const std::size_t nb = model.ladder().n();
  std::vector<std::size_t> rows;
  for (std::size_t b = 0; b < spec.k_centers.size(); ++b)
    if (spec.k_centers[b] >= k_lo && spec.k_centers[b] <= k_hi) rows.push_back(b);
  if (rows.size() < 8) {
    std::ostringstream os;
    os << "spectrum_fit: " << rows.size() << " bins in [" << k_lo << ", " << k_hi << "], need 8";
    throw ConfigError(os.str());
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto ncol = static_cast<Eigen::Index>(nb + 1);
  Eigen::MatrixXd a(m, ncol);
  Eigen::VectorXd y(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const double k = spec.k_centers[rows[static_cast<std::size_t>(r)]];
    y(r) = spec.e_k[rows[static_cast<std::size_t>(r)]] * std::pow(k, 5.0 / 3.0) * std::pow(eps, -2.0 / 3.0);
    a(r, 0) = 1.0;
    for (std::size_t j = 1; j <= nb; ++j) a(r, static_cast<Eigen::Index>(j)) = model.correction_basis(j, k);
  }
  // Column scaling keeps the conditioning estimate meaningful.
  Eigen::VectorXd scale = a.colwise().norm().transpose();
  for (Eigen::Index c = 0; c < ncol; ++c)
    if (scale(c) == 0.0) scale(c) = 1.0;
  const Eigen::MatrixXd as = a * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(as, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  SpectrumFit out;
  out.bins = rows.size();
  Eigen::VectorXd xs;
  if (cond < 1e10) {
    xs = svd.solve(y);
  } else {
    out.regularized = true;
    std::ostringstream os;
    os << "spectrum_fit: basis near-collinear (condition " << cond << "); ridge solution";
    out.warning = os.str();
    const double lam = 1e-8 * sv(0) * sv(0);
    const Eigen::MatrixXd n = as.transpose() * as + lam * Eigen::MatrixXd::Identity(ncol, ncol);
    xs = n.ldlt().solve(as.transpose() * y);
  }
  const Eigen::VectorXd x = xs.cwiseQuotient(scale);
  out.c_kolmogorov = x(0);
  for (std::size_t j = 1; j <= nb; ++j)
    out.betas.push_back(x(0) != 0.0 ? x(static_cast<Eigen::Index>(j)) / x(0) : 0.0);
  const Eigen::VectorXd fit = a * x;
  double res = 0;
  for (Eigen::Index r = 0; r < m; ++r) {
    const double rel = y(r) != 0.0 ? (fit(r) - y(r)) / y(r) : fit(r);
    res += rel * rel;
  }
  out.residual = std::sqrt(res / static_cast<double>(m));
  return out;
}

StructureFunctionTable structure_functions(const PhysField& f, const std::vector<double>& orders,
                                           const std::vector<double>& separations, const StructureOptions& opts) {
  f.require_finite();
  const Grid& g = f.grid;
  if (f.ncomp != g.rank()) throw ConfigError("structure_functions: need one velocity component per axis");
  std::vector<int> axes = opts.axes;
  if (axes.empty())
    for (int a = 0; a < g.rank(); ++a) axes.push_back(a);
  for (int a : axes)
    if (a < 0 || a >= g.rank()) throw ConfigError("structure_functions: axis out of range");
  for (double p : orders)
    if (!(p > 0.0)) throw ConfigError("structure_functions: orders must be positive");
  if (!std::is_sorted(separations.begin(), separations.end())) throw ConfigError("structure_functions: separations must increase");

  // Integer shifts per separation and axis.
  std::vector<std::vector<long>> shifts(separations.size());
  for (std::size_t j = 0; j < separations.size(); ++j) {
    for (int a : axes) {
      const double cells = separations[j] / g.dx(a);
      const double rc = std::round(cells);
      if (!(separations[j] >= 0.0) || std::abs(cells - rc) > 1e-9 * std::max(1.0, cells)) {
        std::ostringstream os;
        os << "structure_functions: separation " << separations[j] << " is not a multiple of dx = " << g.dx(a);
        throw ConfigError(os.str());
      }
      shifts[j].push_back(static_cast<long>(rc));
    }
  }

  std::vector<std::size_t> points;
  if (opts.n_samples == 0) {
    points.resize(g.npoints());
    for (std::size_t i = 0; i < points.size(); ++i) points[i] = i;
  } else {
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<std::size_t> pick(0, g.npoints() - 1);
    points.resize(opts.n_samples);
    for (auto& p : points) p = pick(rng);
  }

  StructureFunctionTable out;
  out.r = separations;
  out.orders = orders;
  out.s_p_r.assign(orders.size(), std::vector<double>(separations.size(), 0.0));
  const double norm = 1.0 / static_cast<double>(points.size() * axes.size());
  for (std::size_t j = 0; j < separations.size(); ++j) {
    for (std::size_t o = 0; o < orders.size(); ++o) {
      double acc = 0;
      for (std::size_t ai = 0; ai < axes.size(); ++ai) {
        const int a = axes[ai];
        const double* u = f.comp(a);
        acc += par::sum(points.size(), [&](std::size_t k) {
          const std::size_t i = points[k];
          return std::pow(std::abs(u[shifted(g, i, a, shifts[j][ai])] - u[i]), orders[o]);
        });
      }
      out.s_p_r[o][j] = acc * norm;
    }
  }

  out.fit_lo = opts.fit_lo;
  out.fit_hi = opts.fit_hi;
  if (out.fit_lo <= 0.0)
    for (double r : separations)
      if (r > 0.0) {
        out.fit_lo = r;
        break;
      }
  if (out.fit_hi <= 0.0 && !separations.empty()) out.fit_hi = separations.back();
  for (std::size_t o = 0; o < orders.size(); ++o) {
    std::vector<double> x, y;
    for (std::size_t j = 0; j < separations.size(); ++j) {
      const double r = separations[j];
      if (r >= out.fit_lo && r <= out.fit_hi && r > 0.0 && out.s_p_r[o][j] > 0.0) {
        x.push_back(std::log(r));
        y.push_back(std::log(out.s_p_r[o][j]));
      }
    }
    out.zeta.push_back(x.size() >= 2 ? line_fit(x, y).first : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

ExceptionalSet exceptional_set(const PhysField& f, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("exceptional_set: eps must lie in (0, 1)");
  f.require_finite();
  const Grid& g = f.grid;
  const std::vector<double> mag = grad_magnitude(f);
  const std::size_t n = mag.size();
  const auto rank = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(eps * static_cast<double>(n))));
  std::vector<double> sorted = mag;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end(),
                   std::greater<>());
  ExceptionalSet out;
  out.eps = eps;
  out.lambda_eps = sorted[rank - 1];
  out.mask.assign(n, 0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (mag[i] >= out.lambda_eps) {
      out.mask[i] = 1;
      ++count;
    }
  out.ties = count > rank;
  out.measured_fraction = static_cast<double>(count) / static_cast<double>(n);
  const double dv = g.cell_volume();
  const double l6 = std::pow(par::sum(n, [&](std::size_t i) { return std::pow(mag[i], 6.0) * dv; }), 1.0 / 6.0);
  out.chebyshev_lambda = l6 / std::pow(g.volume() * eps, 1.0 / 6.0);
  return out;
}

BoxCount box_counting_dimension(const std::vector<unsigned char>& mask, const Grid& g) {
  if (mask.size() != g.npoints()) throw ConfigError("box_counting_dimension: mask size does not match the grid");
  if (std::none_of(mask.begin(), mask.end(), [](unsigned char v) { return v != 0; }))
    throw NumericalError("box_counting_dimension: empty mask");
  BoxCount out;
  std::vector<double> x, y;
  for (std::size_t size : {1, 2, 4, 8, 16}) {
    bool fits = true;
    for (int a = 0; a < g.rank(); ++a) fits = fits && g.n(a) % size == 0 && g.n(a) / size >= 1;
    if (!fits) continue;
    std::size_t nbox = 1;
    for (int a = 0; a < g.rank(); ++a) nbox *= g.n(a) / size;
    std::vector<unsigned char> occ(nbox, 0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      const auto id = unflatten(g, i);
      std::size_t b = 0;
      for (int a = 0; a < g.rank(); ++a) b = b * (g.n(a) / size) + id[a] / size;
      occ[b] = 1;
    }
    const auto c = static_cast<std::size_t>(std::count(occ.begin(), occ.end(), 1));
    out.sizes.push_back(size);
    out.counts.push_back(c);
    x.push_back(std::log(1.0 / static_cast<double>(size)));
    y.push_back(std::log(static_cast<double>(c)));
  }
  if (x.size() < 2) throw NumericalError("box_counting_dimension: fewer than two box sizes fit the grid");
  const auto [slope, res] = line_fit(x, y);
  out.dimension = slope;
  out.fit_residual = res;
  return out;
}

LocalScaling local_scaling_histogram(const PhysField& f, const std::vector<int>& radii, std::size_t nbins) {
  if (radii.size() < 3) throw ConfigError("local_scaling_histogram: need at least three radii");
  for (int r : radii)
    if (r < 1) throw ConfigError("local_scaling_histogram: radii are positive cell counts");
  if (nbins < 1) throw ConfigError("local_scaling_histogram: nbins must be positive");
  f.require_finite();
  const Grid& g = f.grid;
  const PhysField gr = inverse(gradient(forward(f)));
  double dx = g.dx(0);
  for (int a = 1; a < g.rank(); ++a) dx = std::min(dx, g.dx(a));
  std::vector<double> lr;
  for (int r : radii) lr.push_back(std::log(r * dx));
  const std::size_t n = g.npoints();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> h(n, nan);
  par::for_each(n, [&](std::size_t i) {
    std::vector<double> ly;
    for (int r : radii) {
      double inc = 0;
      for (int a = 0; a < g.rank(); ++a) {
        const std::size_t j = shifted(g, i, a, r);
        double d2 = 0;
        for (int c = 0; c < gr.ncomp; ++c) {
          const double d = gr.comp(c)[j] - gr.comp(c)[i];
          d2 += d * d;
        }
        inc += std::sqrt(d2);
      }
      inc /= g.rank();
      if (!(inc > 0.0)) return;
      ly.push_back(std::log(inc));
    }
    h[i] = line_fit(lr, ly).first;
  });

  LocalScaling out;
  std::vector<double> valid;
  for (double v : h)
    if (std::isfinite(v)) valid.push_back(v);
  out.points = valid.size();
  if (valid.empty()) return out;
  std::sort(valid.begin(), valid.end());
  out.median_h = valid[valid.size() / 2];
  const double lo = valid.front(), hi = valid.back();
  const double width = hi > lo ? (hi - lo) / static_cast<double>(nbins) : 1.0;
  auto bin = [&](double v) { return std::min(nbins - 1, static_cast<std::size_t>((v - lo) / width)); };
  std::vector<double> count(nbins, 0.0);
  for (double v : valid) count[bin(v)] += 1.0;
  for (std::size_t b = 0; b < nbins; ++b) {
    out.h_centers.push_back(lo + (static_cast<double>(b) + 0.5) * width);
    out.density.push_back(count[b] / (static_cast<double>(valid.size()) * width));
    double d = 0;
    if (count[b] > 0) {
      std::vector<unsigned char> mask(n, 0);
      for (std::size_t i = 0; i < n; ++i)
        if (std::isfinite(h[i]) && bin(h[i]) == b) mask[i] = 1;
      try {
        d = box_counting_dimension(mask, g).dimension;
      } catch (const NumericalError&) {
        d = 0;
      }
    }
    out.d_of_h.push_back(d);
  }
  return out;
}

Alignment alignment_statistics(const PhysField& f, std::size_t nbins) {
  const Grid& g = f.grid;
  if (g.rank() != 3 || f.ncomp != 3) throw ConfigError("alignment_statistics: needs a three-dimensional velocity");
  if (nbins < 1) throw ConfigError("alignment_statistics: nbins must be positive");
  f.require_finite();
  const PhysField gr = inverse(gradient(forward(f)));
  const std::size_t n = g.npoints();
  std::vector<double> cosv(n, -1.0), trace(n, 0.0), wmag(n, 0.0);
  par::for_each(n, [&](std::size_t i) {
    Eigen::Matrix3d grad;
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < 3; ++a) grad(c, a) = gr.comp(c * 3 + a)[i];
    const Eigen::Vector3d w(grad(2, 1) - grad(1, 2), grad(0, 2) - grad(2, 0), grad(1, 0) - grad(0, 1));
    wmag[i] = w.norm();
    const Eigen::Matrix3d strain = 0.5 * (grad + grad.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(strain);
    trace[i] = es.eigenvalues().sum();
    if (wmag[i] > 0.0) cosv[i] = std::abs(w.dot(es.eigenvectors().col(2))) / wmag[i];
  });
  const double wmax = *std::max_element(wmag.begin(), wmag.end());
  Alignment out;
  for (std::size_t b = 0; b <= nbins; ++b) out.bin_edges.push_back(90.0 * static_cast<double>(b) / static_cast<double>(nbins));
  out.histogram.assign(nbins, 0.0);
  double csum = 0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.max_trace = std::max(out.max_trace, std::abs(trace[i]));
    if (!(wmag[i] > 1e-12 * std::max(wmax, 1e-300)) || wmax == 0.0) {
      ++out.excluded;
      continue;
    }
    const double c = std::min(1.0, cosv[i]);
    const double ang = std::acos(c) * 180.0 / std::numbers::pi;
    out.histogram[std::min(nbins - 1, static_cast<std::size_t>(ang / 90.0 * static_cast<double>(nbins)))] += 1.0;
    csum += c;
    ++used;
  }
  out.mean_cos = used > 0 ? csum / static_cast<double>(used) : 0.0;
  return out;
}

RatioSeries ratio_series(const std::vector<DiagnosticsRecord>& records) {
  RatioSeries out;
  for (const auto& r : records) {
    if (!(r.lq_root > 0.0)) {
      ++out.excluded;
      continue;
    }
    out.points.emplace_back(r.t, r.frac_lq_full / r.lq_root);
  }
  std::vector<std::pair<double, double>> pos;
  for (const auto& p : out.points)
    if (p.first > 0.0 && p.second > 0.0) pos.push_back(p);
  const std::size_t start = pos.size() / 2;
  if (pos.size() - start >= 2) {
    std::vector<double> x, y;
    for (std::size_t i = start; i < pos.size(); ++i) {
      x.push_back(std::log(pos[i].first));
      y.push_back(std::log(pos[i].second));
    }
    out.tail_slope = line_fit(x, y).first;
  }
  return out;
}

}  // namespace nslog::diag
