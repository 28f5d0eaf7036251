#pragma once

// 50-digit reference evaluations of the closed-form quantities, written
// directly from the defining expressions with no shared code paths.

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <cstddef>
#include <vector>

namespace oracle {

using Real = boost::multiprecision::cpp_dec_float_50;

inline Real e() { return boost::multiprecision::exp(Real(1)); }

inline Real L(int j, const Real& x) {
  Real v = x;
  for (int i = 0; i < j; ++i) v = log(e() + v);
  return v;
}

inline Real weight(const Real& x, const std::vector<double>& d) {
  Real w = 1;
  for (std::size_t j = 0; j < d.size(); ++j) w *= pow(1 + L(int(j) + 1, x), Real(d[j]));
  return w;
}

inline Real F1(const Real& z, const std::vector<double>& d) {
  Real p = L(1, z);
  for (std::size_t j = 1; j < d.size(); ++j) p *= pow(1 + L(int(j) + 1, z), -Real(d[j]));
  return p;
}

inline Real F2(const Real& z, const std::vector<double>& d) {
  Real p = 1 / L(1, z);
  for (std::size_t j = 1; j < d.size(); ++j) p *= pow(1 + L(int(j) + 1, z), Real(d[j]));
  return p;
}

struct Pack {
  Real theta, alpha, beta, mu, gamma, p, delta01;
};

inline Pack pack(const Real& s, const Real& q, const Real& eta) {
  Pack r;
  r.theta = Real(3) / 2 * q / (3 * q - 2);
  r.alpha = Real(3) / 2 * (Real(1) / 2 - 1 / q);
  r.beta = r.theta * (1 - r.alpha) / (2 - r.theta * r.alpha);
  r.mu = r.beta + eta;
  r.gamma = 1 / (2 * r.mu);
  r.p = 2 / (2 * s - 1 - 3 / q);
  Real a = (q - 3) / (6 * q), b = (2 * s - 1) / (4 * s);
  r.delta01 = a < b ? a : b;
  return r;
}

inline Real fact(std::size_t n) {
  Real f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= Real(i);
  return f;
}

inline Real alpha_threshold(const std::vector<double>& d, const std::vector<double>& c) {
  Real sum = 0;
  for (std::size_t j = 0; j < d.size(); ++j) sum += Real(c[j]) * Real(d[j]) / fact(j + 1);
  return 1 / (1 + sum);
}

inline Real threshold(const Real& s, const Real& cq, const std::vector<double>& d,
                      const std::vector<double>& c) {
  return cq * pow(s - Real(1) / 2, alpha_threshold(d, c));
}

struct Blowup {
  Real grad_beta, grad_explicit, velocity, filament, alignment, dim;
};

inline Blowup blowup(const Real& s, const Real& q, const std::vector<double>& d) {
  Pack pk = pack(s, q, 0);
  Blowup b;
  b.grad_beta = (1 + pk.beta) / (2 * pk.beta);
  b.grad_explicit = (2 - pk.theta * pk.alpha) / (2 * pk.theta * (1 - pk.alpha));
  b.velocity = Real(1) / 2;
  b.filament = Real(1) / 2;
  b.alignment = 0;
  Real sd = 0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    Real dj = d[j];
    b.velocity -= dj / ((1 + dj) * (2 + dj));
    b.filament += dj / (1 + dj);
    b.alignment += dj / (2 * (1 + dj));
    sd += dj / (1 + dj) / Real(j + 2);
  }
  b.dim = 1 - sd;
  if (b.dim < 0) b.dim = 0;
  return b;
}

inline Real dim_bound_raw(const Real& eps, const std::vector<double>& d) {
  Real x = 1 / eps, sum = 0;
  for (std::size_t j = 1; j <= d.size(); ++j) {
    Real dj = d[j - 1];
    sum += dj / (1 + dj) * L(int(j) - 1, x) / (1 + L(int(j), x));
  }
  return 3 - sum;
}

inline Real theta_eps(const Real& eps, const std::vector<double>& d) {
  Real x = 1 / eps, p = 1;
  for (std::size_t j = 1; j <= d.size(); ++j) {
    Real dj = d[j - 1], jj = Real(j);
    Real f = dj / (1 + dj);
    p *= pow(eps, f / (1 + jj)) * pow(1 + L(int(j), x), -f * jj / (1 + jj));
  }
  return p;
}

inline Real ladder_factor(const std::vector<double>& d) {
  Real f = 1;
  for (double dj : d) f *= 1 - Real(dj) / (1 + Real(dj));
  return f;
}

inline Real spectrum_D(const Real& h, const Real& s, const std::vector<double>& d) {
  Real h0 = 2 * s - 1, sig2 = (3 - 2 * s) / (2 * s - 1);
  return 3 - (h - h0) * (h - h0) / (2 * sig2) * ladder_factor(d);
}

inline Real zeta(const Real& p, const Real& s, const std::vector<double>& d) {
  Real f = 1;
  for (double dj : d) f /= 1 + Real(dj);
  return p / 3 - p * (p - 3) / 3 * ((3 - 2 * s) / (2 * s - 1)) * f;
}

inline Real rho(std::size_t j, const Real& s) {
  if (j == 1) return (2 * s - 1) / (2 * s);
  return Real(1) / Real(j);
}

inline Real flux_bound(const Real& k, const Real& k0, const Real& C, const Real& eps,
                       const Real& s, const std::vector<double>& d) {
  Real w = 1;
  for (std::size_t j = 1; j <= d.size(); ++j) w *= pow(1 + L(int(j), k / k0), Real(d[j - 1]) * rho(j, s));
  return C * eps / w;
}

inline Real model_spectrum(const Real& k, const Real& t, const Real& k0, const Real& C,
                           const Real& eps, const Real& gamma, const std::vector<double>& d,
                           const std::vector<double>& beta0) {
  Real corr = 1;
  for (std::size_t j = 1; j <= d.size() && j <= beta0.size(); ++j) {
    Real aj = 2 * gamma / 3 * Real(j) / Real(j + 1);
    Real bj = Real(beta0[j - 1]) / pow(1 + gamma * t, aj);
    Real den = 1;
    for (std::size_t i = 1; i <= j; ++i) den *= pow(1 + L(int(i), k / k0), 1 + Real(d[i - 1]));
    corr += bj * L(int(j), k / k0) / den;
  }
  return C * pow(eps, Real(2) / 3) * pow(k, Real(-5) / 3) * corr;
}

inline Real limiting_spectrum(const Real& k, const Real& t, const Real& C, const Real& eps,
                              const Real& nu, const Real& c) {
  return C * pow(eps, Real(2) / 3) * pow(k, Real(-5) / 3) * exp(-c * sqrt(nu * t) * k);
}

inline Real omega(const Real& lambda, const Real& s, const std::vector<double>& d,
                  const std::vector<double>& c, const Real& c3) {
  Real phi = 1 / sqrt(1 + log(lambda));
  return c3 * pow(s - Real(1) / 2, alpha_threshold(d, c)) / (phi * weight(lambda, d));
}

inline Real closed_form_z(const Real& y0, const Real& C, const Real& mu, const Real& t) {
  return y0 / pow(1 - mu * C * pow(y0, mu) * t, 1 / mu);
}

}  // namespace oracle
