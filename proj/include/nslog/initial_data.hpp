#pragma once

// Initial-data constructions for the solver.

#include <cstdint>

#include "nslog/field.hpp"
#include "nslog/formula.hpp"

namespace nslog {

/// u = (amp sin(k y), 0[, 0]); k must satisfy 3k < npts along y.
PhysField make_shear(const Grid& g, int k, double amp);

/// u = amp (sin x cos y, -cos x sin y). Rank 2 only.
PhysField make_taylor_green_2d(const Grid& g, double amp);

struct RandomFieldSpec {
  double slope = -5.0 / 3.0;  ///< shell energy E(k) ~ k^slope
  double k_lo = 1;            ///< populated shells, integer wavenumber units
  double k_hi = 4;
  double energy = 0.5;        ///< kinetic energy per unit volume, (1/2)<|u|^2>
  std::uint64_t seed = 1;
};

/// Gaussian solenoidal field with exactly the prescribed shell energies.
PhysField make_random_divfree(const Grid& g, const RandomFieldSpec& spec);

/// Smooth radial cutoff supported in [1/2, 3], peak 1 at the middle of its support.
double shell_cutoff(double rho);

/// Shell-localized datum w_r(x) = r w(r x) with w^(xi) = |xi|^{-5/2} eta(|xi|) Phi(xi/|xi|),
/// Phi a fixed solenoidal angular profile. The shell [r/2, 3r] must fit under the 2/3 cutoff.
PhysField make_shell_datum(const Grid& g, double r);

struct ScaledFamily {
  PhysField field;
  double hs_achieved = 0;  ///< ||v||_{H^s}
  double lq_achieved = 0;  ///< ||(-Delta)^{s/2} v||_{L^q}
  double log_weight = 0;   ///< prod (1 + L_j(lambda))^{delta_j}
};

/// Scalar rescale of `base` so that ||v||_{H^s} = lambda; the resulting
/// ||(-Delta)^{s/2} v||_{L^q} must equal `target` within 1e-10 relative,
/// otherwise ConfigError (a scalar multiple cannot move the two norms independently).
ScaledFamily make_scaled_family(const PhysField& base, double lambda, double s, double q,
                                const formula::LogLadderParams& params, double target);

struct Admissibility {
  double lhs = 0;  ///< ||(-Delta)^{s/2} u0||_{L^q}
  double rhs = 0;  ///< c0 / log_weight(||u0||_{H^s})
  double hs = 0;
  bool admissible = false;
};

Admissibility admissibility_check(const PhysField& u0, double s, double q,
                                  const formula::LogLadderParams& params);

}  // namespace nslog
