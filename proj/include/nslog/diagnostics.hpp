#pragma once

// Diagnostics of velocity snapshots: shell spectra and nonlinear transfer,
// model fits, structure functions, exceptional sets and box counting,
// local scaling exponents and vorticity/strain alignment.
//
// Shell bins have unit width in units of the smallest wavenumber and are
// centred on integers; densities are per unit volume.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nslog/field.hpp"
#include "nslog/formula.hpp"
#include "nslog/solver.hpp"

namespace nslog::diag {

struct ShellSpectrum {
  double dk = 1;
  std::vector<double> k_centers;  ///< dk, 2 dk, ...
  std::vector<double> e_k;        ///< energy density per unit volume and unit k
  std::vector<double> transfer;   ///< T(k); empty unless computed by energy_flux
  std::vector<double> flux;       ///< Pi(k) = -sum_{k' <= k} T(k') dk
  double mean_energy = 0;         ///< energy of the zero mode, kept out of the bins
  double eps_rate_s1 = 0;         ///< 2 nu int k^2 E dk
  double eps_rate_frac = 0;       ///< 2 nu int k^{2s} E dk
  double total_energy() const;    ///< sum e_k dk + mean_energy
};

/// Shell energy density in bins round(|k| / dk), zero mode excluded; bins past nbins are dropped.
std::vector<double> shell_energy(const SpecField& uh, double dk, std::size_t nbins);

ShellSpectrum energy_spectrum(const PhysField& f, double nu = 1.0, double s = 1.0);
/// Spectrum plus transfer and flux of the dealiased, projected nonlinearity.
/// Requires a divergence-free field.
ShellSpectrum energy_flux(const PhysField& f, double nu = 1.0, double s = 1.0);

struct FluxAudit {
  double max_relative_deviation = 0;    ///< max |Pi - eps| / eps over the range
  double fitted_c = 0;                  ///< smallest C for which the bound holds
  double bound_satisfied_fraction = 0;  ///< at the model's own constant
  std::size_t bins = 0;
};

/// |Pi(k) - eps| <= C eps / weight(k) over bins in [k0, k_nu] of the model; eps from the model.
FluxAudit flux_audit(const ShellSpectrum& spec, const formula::SpectralModels& model);

struct SpectrumFit {
  double c_kolmogorov = 0;
  std::vector<double> betas;
  double residual = 0;        ///< rms relative error of the fitted curve
  bool regularized = false;   ///< basis was near-collinear; ridge solution returned
  std::string warning;
  std::size_t bins = 0;
};

/// Least squares of E k^{5/3} eps^{-2/3} on {1, correction_basis(j, k)} over bins in [k_lo, k_hi].
SpectrumFit spectrum_fit(const ShellSpectrum& spec, const formula::SpectralModels& model, double k_lo,
                         double k_hi);

struct StructureFunctionTable {
  std::vector<double> r;
  std::vector<double> orders;
  std::vector<std::vector<double>> s_p_r;  ///< [order][separation]
  std::vector<double> zeta;                ///< fitted log-log slopes per order
  double fit_lo = 0;
  double fit_hi = 0;
};

struct StructureOptions {
  std::size_t n_samples = 0;   ///< 0 means every grid point
  std::uint64_t seed = 1;
  std::vector<int> axes;       ///< empty means every axis
  double fit_lo = 0;           ///< fit window; 0 means the smallest positive r
  double fit_hi = 0;           ///< 0 means the largest r
};

/// Longitudinal increments u_a(x + r e_a) - u_a(x), averaged over axes and points.
StructureFunctionTable structure_functions(const PhysField& f, const std::vector<double>& orders,
                                           const std::vector<double>& separations,
                                           const StructureOptions& opts = {});

struct ExceptionalSet {
  double eps = 0;
  double lambda_eps = 0;
  std::vector<unsigned char> mask;
  double measured_fraction = 0;
  bool ties = false;             ///< threshold value shared by points beyond the quantile rank
  double chebyshev_lambda = 0;   ///< ||grad u||_{L^6} / (V eps)^{1/6}
};

/// Top-eps volume fraction of |grad u|; ties at the threshold are included.
ExceptionalSet exceptional_set(const PhysField& f, double eps);

struct BoxCount {
  double dimension = 0;
  double fit_residual = 0;
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> counts;
};

/// Occupied boxes at sizes 1, 2, 4, 8, 16 cells (sizes that divide every axis).
BoxCount box_counting_dimension(const std::vector<unsigned char>& mask, const Grid& g);

struct LocalScaling {
  std::vector<double> h_centers;
  std::vector<double> density;   ///< normalized histogram of h
  std::vector<double> d_of_h;    ///< box-counting dimension of each h level set (0 when empty)
  std::size_t points = 0;        ///< points with a defined exponent
  double median_h = 0;
};

/// Per-point slope of log |grad u(x + r e_a) - grad u(x)| (axis mean) against log r.
/// radii are in grid cells. Rough, grid-limited estimator.
LocalScaling local_scaling_histogram(const PhysField& f, const std::vector<int>& radii, std::size_t nbins = 20);

struct Alignment {
  std::vector<double> bin_edges;   ///< degrees, [0, 90]
  std::vector<double> histogram;   ///< counts
  double mean_cos = 0;
  std::size_t excluded = 0;        ///< points with vanishing vorticity
  double max_trace = 0;            ///< max |sum of strain eigenvalues|
};

/// Angle between vorticity and the most extensional strain eigenvector. Rank 3 only.
Alignment alignment_statistics(const PhysField& f, std::size_t nbins = 18);

struct RatioSeries {
  std::vector<std::pair<double, double>> points;  ///< (t, ||(-Delta)^s u||_q / ||(-Delta)^{1/2} u||_q)
  double tail_slope = 0;   ///< d log ratio / d log t over the second half of the positive times
  std::size_t excluded = 0;
};

RatioSeries ratio_series(const std::vector<DiagnosticsRecord>& records);

}  // namespace nslog::diag
