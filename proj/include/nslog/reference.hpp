#pragma once

// Single-threaded reference versions of the data-parallel kernels. They use
// plain loops with a single running accumulator and exist to cross-check and
// benchmark the OpenMP kernels.

#include <vector>

#include "nslog/field.hpp"

namespace nslog::serial {

SpecField fractional_laplacian(const SpecField& g, double s);
SpecField leray_project(const SpecField& g);
SpecField nonlinear_conservative(const SpecField& u);
double l2_norm(const SpecField& g);
double lq_norm(const PhysField& f, double q);
double grad_linf(const SpecField& g);
/// Shell energy E(k) in unit bins round(|k| / dk), per unit volume.
std::vector<double> shell_energy(const SpecField& g, double dk, std::size_t nbins);

}  // namespace nslog::serial
