#pragma once

// Direct-summation Fourier transforms on full (not half) spectra and a
// commutator evaluated with them. Independent of FFTW and of the library's
// mode tables; intended for small grids only.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using C = std::complex<double>;

struct DenseGrid {
  int rank;
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> box{1, 1, 1};
  std::size_t size() const { return std::size_t(n[0]) * n[1] * n[2]; }
  std::array<int, 3> idx(std::size_t i) const {
    std::array<int, 3> r{0, 0, 0};
    for (int a = 2; a >= 0; --a) {
      r[a] = int(i % n[a]);
      i /= n[a];
    }
    return r;
  }
  bool nyquist(int a, int i) const { return 2 * i == n[a]; }
};

// One-axis direct DFT applied to every line; sign -1 forward.
inline void dft_axis(const DenseGrid& g, std::vector<C>& v, int axis, int sign) {
  const int na = g.n[axis];
  std::size_t stride = 1;
  for (int a = 2; a > axis; --a) stride *= g.n[a];
  std::vector<C> tw(na);
  for (int j = 0; j < na; ++j) tw[j] = std::polar(1.0, sign * 2 * std::numbers::pi * j / na);
  std::vector<C> line(na), out(na);
  for (std::size_t base = 0; base < v.size(); ++base) {
    if ((base / stride) % na != 0) continue;
    for (int j = 0; j < na; ++j) line[j] = v[base + j * stride];
    for (int kk = 0; kk < na; ++kk) {
      C acc = 0;
      for (int j = 0; j < na; ++j) acc += line[j] * tw[(std::size_t(kk) * j) % na];
      out[kk] = acc;
    }
    for (int j = 0; j < na; ++j) v[base + j * stride] = out[j];
  }
}

inline std::vector<C> dense_forward(const DenseGrid& g, const std::vector<double>& f) {
  std::vector<C> v(f.begin(), f.end());
  for (int a = 0; a < 3; ++a)
    if (g.n[a] > 1) dft_axis(g, v, a, -1);
  for (auto& x : v) x /= double(g.size());
  return v;
}

inline std::vector<double> dense_inverse(const DenseGrid& g, std::vector<C> v) {
  for (int a = 0; a < 3; ++a)
    if (g.n[a] > 1) dft_axis(g, v, a, +1);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
  return out;
}

inline bool keep(const DenseGrid& g, std::size_t i) {
  auto id = g.idx(i);
  for (int a = 0; a < g.rank; ++a) {
    int m = id[a] <= g.n[a] / 2 ? id[a] : id[a] - g.n[a];
    if (3 * std::abs(m) >= g.n[a]) return false;
  }
  return true;
}

inline double kmag2(const DenseGrid& g, std::size_t i) {
  auto id = g.idx(i);
  double s = 0;
  for (int a = 0; a < g.rank; ++a) {
    int m = id[a] <= g.n[a] / 2 ? id[a] : id[a] - g.n[a];
    double k = 2 * std::numbers::pi * m / g.box[a];
    s += k * k;
  }
  return s;
}

inline double kderiv(const DenseGrid& g, std::size_t i, int a) {
  auto id = g.idx(i);
  if (g.nyquist(a, id[a])) return 0.0;
  int m = id[a] <= g.n[a] / 2 ? id[a] : id[a] - g.n[a];
  return 2 * std::numbers::pi * m / g.box[a];
}

using VecSpec = std::vector<std::vector<C>>;

inline VecSpec truncate(const DenseGrid& g, VecSpec v) {
  for (auto& c : v)
    for (std::size_t i = 0; i < c.size(); ++i)
      if (!keep(g, i)) c[i] = 0;
  return v;
}

inline VecSpec frac(const DenseGrid& g, VecSpec v, double s) {
  for (auto& c : v)
    for (std::size_t i = 0; i < c.size(); ++i) {
      double k2 = kmag2(g, i);
      c[i] *= k2 > 0 ? std::pow(k2, s) : 0.0;
    }
  return v;
}

// (u . grad) w, both truncated, product truncated.
inline VecSpec advect(const DenseGrid& g, const VecSpec& u, const VecSpec& w) {
  auto ut = truncate(g, u);
  auto wt = truncate(g, w);
  std::vector<std::vector<double>> up;
  for (auto& c : ut) up.push_back(dense_inverse(g, c));
  VecSpec out;
  for (auto& wc : wt) {
    std::vector<double> acc(g.size(), 0.0);
    for (int a = 0; a < g.rank; ++a) {
      std::vector<C> d(wc.size());
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = C(0, 1) * kderiv(g, i, a) * wc[i];
      auto dp = dense_inverse(g, d);
      for (std::size_t x = 0; x < acc.size(); ++x) acc[x] += up[a][x] * dp[x];
    }
    out.push_back(dense_forward(g, acc));
  }
  return truncate(g, out);
}

/// L2 norm over the box of the commutator, by direct summation.
inline double commutator_l2(const DenseGrid& g, const std::vector<std::vector<double>>& u_phys,
                            double s) {
  VecSpec u;
  for (auto& c : u_phys) u.push_back(dense_forward(g, c));
  auto a = frac(g, advect(g, u, u), s);
  auto b = advect(g, u, frac(g, u, s));
  double vol = 1;
  for (int ax = 0; ax < g.rank; ++ax) vol *= g.box[ax];
  double acc = 0;
  for (std::size_t c = 0; c < a.size(); ++c)
    for (std::size_t i = 0; i < a[c].size(); ++i) acc += std::norm(a[c][i] - b[c][i]);
  return std::sqrt(vol * acc);
}

}  // namespace oracle
