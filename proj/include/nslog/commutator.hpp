#pragma once

// The fractional commutator [(-Delta)^s, u . grad] u and its audit against the
// logarithmic commutator bound.

#include "nslog/field.hpp"
#include "nslog/formula.hpp"

namespace nslog {

/// Divergence-ratio tolerance accepted as "divergence-free" on input.
inline constexpr double kDivergenceTolerance = 1e-8;

/// (-Delta)^s D[(u.grad)u] - D[(u.grad)(-Delta)^s u], D the 2/3-rule truncation.
SpecField commutator(const SpecField& u, double s);
PhysField commutator(const PhysField& u, double s);

struct CommutatorAudit {
  double lhs = 0;          ///< ||[(-Delta)^s, u.grad]u||_{L^2}
  double z = 0;            ///< ||(-Delta)^{s+sigma} u||_{L^2}
  double grad_linf = 0;
  double rhs_f1_term = 0;  ///< ||grad u||_inf ||(-Delta)^s u||_2 F1(Z)
  double rhs_f2_term = 0;  ///< ||grad u||_inf ||(-Delta)^{s+1/2} u||_2 F2(Z)
  double fitted_constant = 0;
};

/// sigma must lie in (0, 1 - s).
CommutatorAudit commutator_audit(const PhysField& u, double s, double sigma,
                                 const formula::LogLadderParams& params);

}  // namespace nslog
