#include "nslog/commutator.hpp"

#include <sstream>

#include "nslog/error.hpp"
#include "nslog/fft.hpp"
#include "nslog/spectral.hpp"

namespace nslog {

namespace {

void require_divfree(const SpecField& u, const char* who) {
  const double r = divergence_ratio(u);
  if (r > kDivergenceTolerance) {
    std::ostringstream os;
    os << who << ": input is not divergence-free (ratio " << r << ")";
    throw PreconditionError(os.str());
  }
}

}  // namespace

SpecField commutator(const SpecField& u, double s) {
  require_divfree(u, "commutator");
  const SpecField a = fractional_laplacian(advect(u, u), s);
  const SpecField b = advect(u, fractional_laplacian(u, s));
  SpecField out(u.grid, u.ncomp);
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = a.data[i] - b.data[i];
  return out;
}

PhysField commutator(const PhysField& u, double s) { return inverse(commutator(forward(u), s)); }

CommutatorAudit commutator_audit(const PhysField& u, double s, double sigma,
                                 const formula::LogLadderParams& params) {
  if (!(sigma > 0.0 && sigma < 1.0 - s)) throw DomainError("commutator_audit: sigma must lie in (0, 1-s)");
  const SpecField uh = forward(u);
  CommutatorAudit a;
  a.lhs = l2_norm(commutator(uh, s));
  // ||(-Delta)^t u||_2 is the H^{2t} seminorm.
  a.z = hs_seminorm(uh, 2.0 * (s + sigma));
  a.grad_linf = grad_linf(uh);
  const auto f = formula::commutator_factors(a.z, params);
  a.rhs_f1_term = a.grad_linf * hs_seminorm(uh, 2.0 * s) * f.f1;
  a.rhs_f2_term = a.grad_linf * hs_seminorm(uh, 2.0 * s + 1.0) * f.f2;
  const double rhs = a.rhs_f1_term + a.rhs_f2_term;
  a.fitted_constant = (a.lhs == 0.0 || rhs == 0.0) ? 0.0 : a.lhs / rhs;
  return a;
}

}  // namespace nslog
