#include "nslog/shells.hpp"

#include <cmath>

#include "nslog/error.hpp"
#include "nslog/spectral.hpp"

namespace nslog {

namespace {
double g_exp(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
}  // namespace

double lp_bump(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = g_exp(2.0 - r);
  const double b = g_exp(r - 1.0);
  return a / (a + b);
}

ShellPartition::ShellPartition(int j_min, int j_max) : j_min_(j_min), j_max_(j_max) {
  if (j_max < j_min) throw ConfigError("shell partition: j_max < j_min");
}

ShellPartition ShellPartition::for_grid(const Grid& g) {
  const int lo = static_cast<int>(std::floor(std::log2(g.kmin())));
  const int hi = static_cast<int>(std::ceil(std::log2(g.kmax())));
  return {lo, std::max(lo, hi)};
}

double ShellPartition::weight(int j, double r) const {
  if (j < j_min_ || j > j_max_ || r <= 0.0) return 0.0;
  const double hi = lp_bump(std::ldexp(r, -j));
  const double lo = j == j_min_ ? 0.0 : lp_bump(std::ldexp(r, -(j - 1)));
  return hi - lo;
}

SpecField shell_project(const SpecField& g, int j, const ShellPartition& part) {
  return apply_radial(g, [&](double k2) { return part.weight(j, std::sqrt(k2)); });
}

}  // namespace nslog
