#pragma once

// Dyadic Littlewood-Paley partition with a smooth compactly supported bump.
//
// phi(r) = 1 for r <= 1, 0 for r >= 2, smooth in between; shell j has weight
// phi(r / 2^j) - phi(r / 2^{j-1}), supported in [2^{j-1}, 2^{j+1}]. The shells
// j_min..j_max sum to one on kmin <= r <= 2^{j_max}.

#include "nslog/field.hpp"

namespace nslog {

/// The C-infinity cutoff profile.
double lp_bump(double r);

class ShellPartition {
 public:
  ShellPartition(int j_min, int j_max);
  /// Shells covering every nonzero |k| on the grid.
  static ShellPartition for_grid(const Grid& g);

  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  double weight(int j, double r) const;

 private:
  int j_min_;
  int j_max_;
};

SpecField shell_project(const SpecField& g, int j, const ShellPartition& part);

}  // namespace nslog
