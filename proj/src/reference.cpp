#include "nslog/reference.hpp"

#include <cmath>

#include "nslog/error.hpp"
#include "nslog/fft.hpp"

namespace nslog::serial {

namespace {
constexpr cplx kI(0.0, 1.0);
}

SpecField fractional_laplacian(const SpecField& g, double s) {
  if (!(s > 0.0)) throw DomainError("fractional_laplacian: s must be positive");
  SpecField out(g.grid, g.ncomp);
  const auto& k2 = g.grid.modes().k2;
  for (int c = 0; c < g.ncomp; ++c)
    for (std::size_t i = 0; i < g.grid.nmodes(); ++i)
      out.comp(c)[i] = k2[i] > 0.0 ? g.comp(c)[i] * std::pow(k2[i], s) : cplx(0.0);
  return out;
}

SpecField leray_project(const SpecField& g) {
  const auto& kd = g.grid.modes().kd;
  const int r = g.grid.rank();
  SpecField out = g;
  for (std::size_t i = 0; i < g.grid.nmodes(); ++i) {
    double kk = 0.0;
    cplx dot = 0.0;
    for (int a = 0; a < r; ++a) {
      kk += kd[a][i] * kd[a][i];
      dot += kd[a][i] * g.comp(a)[i];
    }
    if (kk == 0.0) continue;
    for (int a = 0; a < r; ++a) out.comp(a)[i] -= kd[a][i] * dot / kk;
  }
  return out;
}

SpecField nonlinear_conservative(const SpecField& u) {
  const int r = u.grid.rank();
  const auto& md = u.grid.modes();
  SpecField ud = u;
  for (std::size_t i = 0; i < u.grid.nmodes(); ++i)
    if (!md.keep[i])
      for (int c = 0; c < r; ++c) ud.comp(c)[i] = 0.0;
  const PhysField up = inverse(ud);
  SpecField out(u.grid, r);
  PhysField prod(u.grid, 1);
  std::vector<cplx> ph(u.grid.nmodes());
  for (int a = 0; a < r; ++a) {
    for (int b = a; b < r; ++b) {
      for (std::size_t x = 0; x < u.grid.npoints(); ++x)
        prod.data[x] = up.comp(a)[x] * up.comp(b)[x];
      fft::forward_scalar(u.grid, prod.data.data(), ph.data());
      for (std::size_t i = 0; i < u.grid.nmodes(); ++i) {
        out.comp(a)[i] += kI * md.kd[b][i] * ph[i];
        if (b != a) out.comp(b)[i] += kI * md.kd[a][i] * ph[i];
      }
    }
  }
  for (std::size_t i = 0; i < u.grid.nmodes(); ++i)
    if (!md.keep[i])
      for (int c = 0; c < r; ++c) out.comp(c)[i] = 0.0;
  return out;
}

double l2_norm(const SpecField& g) {
  const auto& w = g.grid.modes().weight;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.grid.nmodes(); ++i)
    for (int c = 0; c < g.ncomp; ++c) acc += w[i] * std::norm(g.comp(c)[i]);
  return std::sqrt(g.grid.volume() * acc);
}

double lq_norm(const PhysField& f, double q) {
  if (!(q >= 1.0)) throw DomainError("lq_norm: q must be >= 1");
  double acc = 0.0;
  for (std::size_t x = 0; x < f.grid.npoints(); ++x) {
    double m2 = 0.0;
    for (int c = 0; c < f.ncomp; ++c) m2 += f.comp(c)[x] * f.comp(c)[x];
    if (std::isinf(q)) acc = std::max(acc, std::sqrt(m2));
    else acc += std::pow(m2, 0.5 * q);
  }
  if (std::isinf(q)) return acc;
  return std::pow(acc * f.grid.cell_volume(), 1.0 / q);
}

double grad_linf(const SpecField& g) {
  const int r = g.grid.rank();
  const auto& kd = g.grid.modes().kd;
  SpecField gr(g.grid, g.ncomp * r);
  for (std::size_t i = 0; i < g.grid.nmodes(); ++i)
    for (int c = 0; c < g.ncomp; ++c)
      for (int a = 0; a < r; ++a) gr.comp(c * r + a)[i] = kI * kd[a][i] * g.comp(c)[i];
  const PhysField gp = inverse(gr);
  double m = 0.0;
  for (std::size_t x = 0; x < g.grid.npoints(); ++x) {
    double acc = 0.0;
    for (int c = 0; c < gp.ncomp; ++c) acc += gp.comp(c)[x] * gp.comp(c)[x];
    m = std::max(m, acc);
  }
  return std::sqrt(m);
}

std::vector<double> shell_energy(const SpecField& g, double dk, std::size_t nbins) {
  const auto& md = g.grid.modes();
  std::vector<double> e(nbins, 0.0);
  for (std::size_t i = 0; i < g.grid.nmodes(); ++i) {
    if (md.k2[i] == 0.0) continue;
    const auto b = static_cast<std::size_t>(std::lround(std::sqrt(md.k2[i]) / dk));
    if (b >= nbins) continue;
    double acc = 0.0;
    for (int c = 0; c < g.ncomp; ++c) acc += std::norm(g.comp(c)[i]);
    e[b] += 0.5 * md.weight[i] * acc / dk;
  }
  return e;
}

}  // namespace nslog::serial
