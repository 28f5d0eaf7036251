#pragma once

// Fourier-multiplier operators, projections, derivatives, products and norms
// on periodic fields. Odd derivatives use the Nyquist-free wavenumber kd.

#include "nslog/field.hpp"

namespace nslog {

/// |k|^{2s} per mode; the zero mode maps to 0. s must be positive.
SpecField fractional_laplacian(const SpecField& g, double s);

/// Multiplies each mode by f(|k|^2).
template <class F>
SpecField apply_radial(const SpecField& g, F&& f);

/// I - k k^T / |k|^2 per mode (zero mode unchanged). Requires ncomp == rank.
SpecField leray_project(const SpecField& g);

SpecField divergence(const SpecField& g);
/// Component c * rank + a holds d_a u_c.
SpecField gradient(const SpecField& g);
/// Three components in 3D; the scalar vorticity in 2D.
SpecField curl(const SpecField& g);

/// Zeroes modes outside the 2/3-rule box.
void dealias_inplace(SpecField& g);
SpecField dealias(const SpecField& g);

/// Transform of (u . grad) w with both inputs and the product dealiased.
SpecField advect(const SpecField& u, const SpecField& w);
/// Transform of div(u (x) u), dealiased unless `truncate` is false. Equals advect(u, u)
/// when u is divergence-free.
SpecField nonlinear_conservative(const SpecField& u, bool truncate = true);

/// sqrt(int |u|^2) over the box via Parseval.
double l2_norm(const SpecField& g);
/// ||(-Delta)^{s/2} u||_{L^2} via Parseval.
double hs_seminorm(const SpecField& g, double s);
/// (int |u(x)|^q dx)^{1/q} with |.| the Euclidean norm over components; q = inf gives the max.
double lq_norm(const PhysField& f, double q);
/// Maximum over grid points of the Frobenius norm of grad u.
double grad_linf(const SpecField& g);
/// ||div u||_{L^2} / ||grad u||_{L^2}; 0 for constant fields.
double divergence_ratio(const SpecField& g);

struct Norms {
  double l2 = 0;
  double hs_semi = 0;       ///< ||(-Delta)^{s/2} u||_{L^2}
  double frac_lq_half = 0;  ///< ||(-Delta)^{s/2} u||_{L^q}
  double frac_lq_full = 0;  ///< ||(-Delta)^{s} u||_{L^q}
  double grad_linf = 0;
};

/// q must be >= 1 (infinity allowed).
Norms norms(const SpecField& g, double s, double q);
Norms norms(const PhysField& f, double s, double q);

// ---------------------------------------------------------------------------

template <class F>
SpecField apply_radial(const SpecField& g, F&& f) {
  SpecField out(g.grid, g.ncomp);
  const auto& k2 = g.grid.modes().k2;
  const std::size_t nm = g.grid.nmodes();
  for (int c = 0; c < g.ncomp; ++c) {
    const cplx* in = g.comp(c);
    cplx* o = out.comp(c);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nm); ++i)
      o[i] = in[i] * f(k2[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace nslog
