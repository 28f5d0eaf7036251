#include "nslog/field.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nslog/error.hpp"
#include "nslog/parallel.hpp"

namespace nslog {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::shared_ptr<const ModeTable> build_modes(int rank, const std::array<std::size_t, 3>& n,
                                             const std::array<double, 3>& box) {
  auto t = std::make_shared<ModeTable>();
  std::array<std::size_t, 3> ns{1, 1, 1};
  for (int a = 0; a < rank; ++a) ns[a] = a == rank - 1 ? n[a] / 2 + 1 : n[a];
  const std::size_t total = ns[0] * ns[1] * ns[2];
  for (int a = 0; a < 3; ++a) {
    t->k[a].assign(total, 0.0);
    t->kd[a].assign(total, 0.0);
    t->m[a].assign(total, 0);
  }
  t->k2.assign(total, 0.0);
  t->weight.assign(total, 0.0);
  t->keep.assign(total, 0);

  for (std::size_t idx = 0; idx < total; ++idx) {
    std::array<std::size_t, 3> i{};
    std::size_t r = idx;
    for (int a = rank - 1; a >= 0; --a) {
      i[a] = r % ns[a];
      r /= ns[a];
    }
    double k2 = 0.0;
    bool keep = true;
    for (int a = 0; a < rank; ++a) {
      const long na = static_cast<long>(n[a]);
      long m = static_cast<long>(i[a]);
      if (a != rank - 1 && m > na / 2) m -= na;
      if (a != rank - 1 && m == na / 2) m = -na / 2;
      const double kk = 2.0 * std::numbers::pi * static_cast<double>(m) / box[a];
      t->m[a][idx] = static_cast<int>(m);
      t->k[a][idx] = kk;
      t->kd[a][idx] = (std::labs(m) * 2 == na) ? 0.0 : kk;
      k2 += kk * kk;
      if (3 * std::labs(m) >= na) keep = false;
    }
    t->k2[idx] = k2;
    t->keep[idx] = keep ? 1 : 0;
    const std::size_t last = i[rank - 1];
    t->weight[idx] = (last == 0 || 2 * last == n[rank - 1]) ? 1.0 : 2.0;
  }
  return t;
}

}  // namespace

Grid::Grid(std::vector<std::size_t> npts, std::vector<double> box) {
  if (npts.size() != 2 && npts.size() != 3) throw ConfigError("grid: rank must be 2 or 3");
  if (box.empty()) box.assign(npts.size(), 2.0 * std::numbers::pi);
  if (box.size() != npts.size()) throw ConfigError("grid: box and npts lengths differ");
  rank_ = static_cast<int>(npts.size());
  npoints_ = 1;
  for (int a = 0; a < rank_; ++a) {
    if (npts[a] < 8 || !is_pow2(npts[a])) {
      std::ostringstream os;
      os << "grid: npts[" << a << "] = " << npts[a] << " must be a power of two >= 8";
      throw ConfigError(os.str());
    }
    if (!(box[a] > 0.0) || !std::isfinite(box[a])) throw ConfigError("grid: box lengths must be positive");
    n_[a] = npts[a];
    box_[a] = box[a];
    npoints_ *= npts[a];
  }
  modes_ = build_modes(rank_, n_, box_);
  nmodes_ = modes_->k2.size();
  kmin_ = std::numeric_limits<double>::infinity();
  for (int a = 0; a < rank_; ++a) kmin_ = std::min(kmin_, 2.0 * std::numbers::pi / box_[a]);
  double m2 = 0.0;
  for (double v : modes_->k2) m2 = std::max(m2, v);
  kmax_ = std::sqrt(m2);
}

double Grid::volume() const {
  double v = 1.0;
  for (int a = 0; a < rank_; ++a) v *= box_[a];
  return v;
}

std::array<std::size_t, 3> unflatten(const Grid& g, std::size_t i) {
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (int a = g.rank() - 1; a >= 0; --a) {
    idx[a] = i % g.n(a);
    i /= g.n(a);
  }
  return idx;
}

double PhysField::coord(std::size_t i, int axis) const {
  return static_cast<double>(unflatten(grid, i)[axis]) * grid.dx(axis);
}

void PhysField::require_finite() const {
  const double bad = par::max(data.size(), [&](std::size_t i) {
    return std::isfinite(data[i]) ? 0.0 : 1.0;
  });
  if (bad > 0.0) throw DataError("field contains non-finite samples");
}

std::size_t SpecField::index_of(const std::vector<int>& m) const {
  const int r = grid.rank();
  if (static_cast<int>(m.size()) != r) return npos;
  std::size_t idx = 0;
  for (int a = 0; a < r; ++a) {
    const long na = static_cast<long>(grid.n(a));
    long v = m[a];
    if (a == r - 1) {
      if (v < 0 || v > na / 2) return npos;
    } else {
      if (v < -na / 2 || v >= na / 2) {
        if (v == na / 2) v = -na / 2;
        else return npos;
      }
      if (v < 0) v += na;
    }
    idx = idx * grid.ns(a) + static_cast<std::size_t>(v);
  }
  return idx;
}

}  // namespace nslog
