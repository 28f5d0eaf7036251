#include "nslog/spectral.hpp"

#include <cmath>
#include <limits>

#include "nslog/error.hpp"
#include "nslog/fft.hpp"
#include "nslog/parallel.hpp"

namespace nslog {

namespace {

constexpr cplx kI(0.0, 1.0);

void require_vector(const SpecField& g, const char* who) {
  if (g.ncomp != g.grid.rank())
    throw PreconditionError(std::string(who) + ": expects a vector field with rank components");
}

}  // namespace

SpecField fractional_laplacian(const SpecField& g, double s) {
  if (!(s > 0.0)) throw DomainError("fractional_laplacian: s must be positive");
  return apply_radial(g, [s](double k2) { return k2 > 0.0 ? std::pow(k2, s) : 0.0; });
}

SpecField leray_project(const SpecField& g) {
  require_vector(g, "leray_project");
  const auto& md = g.grid.modes();
  const int r = g.grid.rank();
  SpecField out = g;
  par::for_each(g.grid.nmodes(), [&](std::size_t i) {
    double kk = 0.0;
    for (int a = 0; a < r; ++a) kk += md.kd[a][i] * md.kd[a][i];
    if (kk == 0.0) return;
    cplx dot = 0.0;
    for (int a = 0; a < r; ++a) dot += md.kd[a][i] * g.comp(a)[i];
    dot /= kk;
    for (int a = 0; a < r; ++a) out.comp(a)[i] -= md.kd[a][i] * dot;
  });
  return out;
}

SpecField divergence(const SpecField& g) {
  require_vector(g, "divergence");
  const auto& md = g.grid.modes();
  SpecField out(g.grid, 1);
  par::for_each(g.grid.nmodes(), [&](std::size_t i) {
    cplx acc = 0.0;
    for (int a = 0; a < g.ncomp; ++a) acc += md.kd[a][i] * g.comp(a)[i];
    out.data[i] = kI * acc;
  });
  return out;
}

SpecField gradient(const SpecField& g) {
  const int r = g.grid.rank();
  const auto& md = g.grid.modes();
  SpecField out(g.grid, g.ncomp * r);
  par::for_each(g.grid.nmodes(), [&](std::size_t i) {
    for (int c = 0; c < g.ncomp; ++c)
      for (int a = 0; a < r; ++a) out.comp(c * r + a)[i] = kI * md.kd[a][i] * g.comp(c)[i];
  });
  return out;
}

SpecField curl(const SpecField& g) {
  require_vector(g, "curl");
  const auto& md = g.grid.modes();
  const auto& kd = md.kd;
  if (g.grid.rank() == 2) {
    SpecField out(g.grid, 1);
    par::for_each(g.grid.nmodes(), [&](std::size_t i) {
      out.data[i] = kI * (kd[0][i] * g.comp(1)[i] - kd[1][i] * g.comp(0)[i]);
    });
    return out;
  }
  SpecField out(g.grid, 3);
  par::for_each(g.grid.nmodes(), [&](std::size_t i) {
    const cplx u = g.comp(0)[i], v = g.comp(1)[i], w = g.comp(2)[i];
    out.comp(0)[i] = kI * (kd[1][i] * w - kd[2][i] * v);
    out.comp(1)[i] = kI * (kd[2][i] * u - kd[0][i] * w);
    out.comp(2)[i] = kI * (kd[0][i] * v - kd[1][i] * u);
  });
  return out;
}

void dealias_inplace(SpecField& g) {
  const auto& keep = g.grid.modes().keep;
  par::for_each(g.grid.nmodes(), [&](std::size_t i) {
    if (keep[i]) return;
    for (int c = 0; c < g.ncomp; ++c) g.comp(c)[i] = 0.0;
  });
}

SpecField dealias(const SpecField& g) {
  SpecField out = g;
  dealias_inplace(out);
  return out;
}

SpecField advect(const SpecField& u, const SpecField& w) {
  require_vector(u, "advect");
  if (!(u.grid == w.grid)) throw PreconditionError("advect: grids differ");
  const int r = u.grid.rank();
  const PhysField up = inverse(dealias(u));
  const PhysField gw = inverse(gradient(dealias(w)));
  PhysField prod(u.grid, w.ncomp);
  const std::size_t np = u.grid.npoints();
  par::for_each(np, [&](std::size_t x) {
    for (int c = 0; c < w.ncomp; ++c) {
      double acc = 0.0;
      for (int a = 0; a < r; ++a) acc += up.comp(a)[x] * gw.comp(c * r + a)[x];
      prod.comp(c)[x] = acc;
    }
  });
  SpecField out = forward(prod);
  dealias_inplace(out);
  return out;
}

SpecField nonlinear_conservative(const SpecField& u, bool truncate) {
  require_vector(u, "nonlinear_conservative");
  const int r = u.grid.rank();
  const auto& kd = u.grid.modes().kd;
  const PhysField up = inverse(truncate ? dealias(u) : u);
  const std::size_t np = u.grid.npoints();
  // Symmetric products u_a u_b, a <= b.
  const int npairs = r * (r + 1) / 2;
  PhysField prod(u.grid, npairs);
  par::for_each(np, [&](std::size_t x) {
    int p = 0;
    for (int a = 0; a < r; ++a)
      for (int b = a; b < r; ++b) prod.comp(p++)[x] = up.comp(a)[x] * up.comp(b)[x];
  });
  const SpecField ph = forward(prod);
  auto pair_index = [r](int a, int b) {
    if (a > b) std::swap(a, b);
    return a * r - a * (a - 1) / 2 + (b - a);
  };
  SpecField out(u.grid, r);
  par::for_each(u.grid.nmodes(), [&](std::size_t i) {
    for (int a = 0; a < r; ++a) {
      cplx acc = 0.0;
      for (int b = 0; b < r; ++b) acc += kd[b][i] * ph.comp(pair_index(a, b))[i];
      out.comp(a)[i] = kI * acc;
    }
  });
  if (truncate) dealias_inplace(out);
  return out;
}

double l2_norm(const SpecField& g) {
  const auto& w = g.grid.modes().weight;
  const double s = par::sum(g.grid.nmodes(), [&](std::size_t i) {
    double acc = 0.0;
    for (int c = 0; c < g.ncomp; ++c) acc += std::norm(g.comp(c)[i]);
    return w[i] * acc;
  });
  return std::sqrt(g.grid.volume() * s);
}

double hs_seminorm(const SpecField& g, double s) {
  const auto& md = g.grid.modes();
  const double sum = par::sum(g.grid.nmodes(), [&](std::size_t i) {
    if (md.k2[i] == 0.0) return 0.0;
    double acc = 0.0;
    for (int c = 0; c < g.ncomp; ++c) acc += std::norm(g.comp(c)[i]);
    return md.weight[i] * std::pow(md.k2[i], s) * acc;
  });
  return std::sqrt(g.grid.volume() * sum);
}

double lq_norm(const PhysField& f, double q) {
  if (!(q >= 1.0)) throw DomainError("lq_norm: q must be >= 1");
  const std::size_t np = f.grid.npoints();
  auto mag2 = [&](std::size_t x) {
    double acc = 0.0;
    for (int c = 0; c < f.ncomp; ++c) acc += f.comp(c)[x] * f.comp(c)[x];
    return acc;
  };
  if (std::isinf(q)) return std::sqrt(std::max(0.0, par::max(np, mag2)));
  const double s = par::sum(np, [&](std::size_t x) { return std::pow(mag2(x), 0.5 * q); });
  return std::pow(s * f.grid.cell_volume(), 1.0 / q);
}

double grad_linf(const SpecField& g) {
  const PhysField gp = inverse(gradient(g));
  const double m = par::max(g.grid.npoints(), [&](std::size_t x) {
    double acc = 0.0;
    for (int c = 0; c < gp.ncomp; ++c) acc += gp.comp(c)[x] * gp.comp(c)[x];
    return acc;
  });
  return std::sqrt(std::max(0.0, m));
}

double divergence_ratio(const SpecField& g) {
  require_vector(g, "divergence_ratio");
  const auto& md = g.grid.modes();
  const int r = g.grid.rank();
  const double num = par::sum(g.grid.nmodes(), [&](std::size_t i) {
    cplx acc = 0.0;
    for (int a = 0; a < r; ++a) acc += md.kd[a][i] * g.comp(a)[i];
    return md.weight[i] * std::norm(acc);
  });
  const double den = par::sum(g.grid.nmodes(), [&](std::size_t i) {
    double acc = 0.0;
    for (int c = 0; c < g.ncomp; ++c) acc += std::norm(g.comp(c)[i]);
    return md.weight[i] * md.k2[i] * acc;
  });
  if (den == 0.0) return 0.0;
  return std::sqrt(num / den);
}

Norms norms(const SpecField& g, double s, double q) {
  if (!(q >= 1.0)) throw DomainError("norms: q must be >= 1");
  Norms n;
  n.l2 = l2_norm(g);
  n.hs_semi = hs_seminorm(g, s);
  n.frac_lq_half = lq_norm(inverse(fractional_laplacian(g, 0.5 * s)), q);
  n.frac_lq_full = lq_norm(inverse(fractional_laplacian(g, s)), q);
  n.grad_linf = grad_linf(g);
  return n;
}

Norms norms(const PhysField& f, double s, double q) { return norms(forward(f), s, q); }

}  // namespace nslog
