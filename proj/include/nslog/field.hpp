#pragma once

// Periodic grids and the two field representations.
//
// Physical samples are stored component-major, row-major per component with
// the last axis fastest. Spectral coefficients use the real-to-complex half
// spectrum: the last axis keeps n/2+1 entries, the others keep all n.
// Coefficients are Fourier-series coefficients (the forward transform is
// scaled by 1/N), so a constant c maps to a zero-mode coefficient c.

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace nslog {

using cplx = std::complex<double>;

/// Per-mode wavenumber data for a half-spectrum layout.
struct ModeTable {
  std::array<std::vector<double>, 3> k;    ///< physical wavenumber per axis
  std::array<std::vector<double>, 3> kd;   ///< derivative wavenumber: 0 on Nyquist planes
  std::array<std::vector<int>, 3> m;       ///< signed integer index per axis
  std::vector<double> k2;                  ///< |k|^2
  std::vector<double> weight;              ///< Hermitian multiplicity: 1 or 2
  std::vector<unsigned char> keep;         ///< 2/3-rule mask
};

class Grid {
 public:
  Grid() = default;
  /// npts: 2 or 3 entries, powers of two >= 8. box defaults to 2 pi per axis.
  explicit Grid(std::vector<std::size_t> npts, std::vector<double> box = {});

  int rank() const { return rank_; }
  std::size_t n(int axis) const { return n_[axis]; }
  double box(int axis) const { return box_[axis]; }
  double dx(int axis) const { return box_[axis] / static_cast<double>(n_[axis]); }
  /// Extent of the spectral array along an axis.
  std::size_t ns(int axis) const { return axis == rank_ - 1 ? n_[axis] / 2 + 1 : n_[axis]; }

  std::size_t npoints() const { return npoints_; }
  std::size_t nmodes() const { return nmodes_; }
  double volume() const;
  double cell_volume() const { return volume() / static_cast<double>(npoints_); }

  std::vector<std::size_t> npts() const { return {n_.begin(), n_.begin() + rank_}; }
  std::vector<double> boxes() const { return {box_.begin(), box_.begin() + rank_}; }

  const ModeTable& modes() const { return *modes_; }

  /// Largest |k| present on the grid and smallest nonzero |k|.
  double kmax() const { return kmax_; }
  double kmin() const { return kmin_; }

  bool operator==(const Grid& o) const {
    return rank_ == o.rank_ && n_ == o.n_ && box_ == o.box_;
  }

 private:
  int rank_ = 0;
  std::array<std::size_t, 3> n_{1, 1, 1};
  std::array<double, 3> box_{1, 1, 1};
  std::size_t npoints_ = 0;
  std::size_t nmodes_ = 0;
  double kmax_ = 0;
  double kmin_ = 0;
  std::shared_ptr<const ModeTable> modes_;
};

struct PhysField {
  Grid grid;
  int ncomp = 0;
  std::vector<double> data;

  PhysField() = default;
  PhysField(const Grid& g, int nc) : grid(g), ncomp(nc), data(g.npoints() * nc, 0.0) {}

  double* comp(int c) { return data.data() + static_cast<std::size_t>(c) * grid.npoints(); }
  const double* comp(int c) const {
    return data.data() + static_cast<std::size_t>(c) * grid.npoints();
  }
  /// Physical coordinate of point index i along an axis.
  double coord(std::size_t i, int axis) const;
  /// Throws DataError on NaN/Inf samples.
  void require_finite() const;
};

struct SpecField {
  Grid grid;
  int ncomp = 0;
  std::vector<cplx> data;

  SpecField() = default;
  SpecField(const Grid& g, int nc) : grid(g), ncomp(nc), data(g.nmodes() * nc, cplx(0.0, 0.0)) {}

  cplx* comp(int c) { return data.data() + static_cast<std::size_t>(c) * grid.nmodes(); }
  const cplx* comp(int c) const {
    return data.data() + static_cast<std::size_t>(c) * grid.nmodes();
  }
  /// Index of the mode with signed integer wavevector m, or npos if it is not stored
  /// (m must have a non-negative last component).
  std::size_t index_of(const std::vector<int>& m) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Multi-index of a flat point index (row-major, last axis fastest).
std::array<std::size_t, 3> unflatten(const Grid& g, std::size_t i);

}  // namespace nslog
