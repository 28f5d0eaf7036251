#include "nslog/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nslog/error.hpp"

namespace nslog::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b* (error weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
  double y;
  double err;
  double f_end;
  bool finite;
};

StepResult dopri_step(const Rhs& f, double t, double y, double h, double k1) {
  const double k2 = f(t + c2 * h, y + h * a21 * k1);
  const double k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
  const double k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const double k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const double k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  const double y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const double k7 = f(t + h, y5);
  const double err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  const bool ok = std::isfinite(y5) && std::isfinite(err) && std::isfinite(k7);
  return {y5, std::abs(err), k7, ok};
}

// Remaining time to blow-up assuming locally f ~ C y^{1+mu}; 0 if not blowing up.
double remaining_time(const Rhs& f, double t, double y, double fy) {
  if (!(fy > 0.0) || !(y > 0.0)) return 0.0;
  constexpr double rel = 1e-6;
  const double f2 = f(t, y * (1.0 + rel));
  if (!(f2 > 0.0) || !std::isfinite(f2)) return 0.0;
  const double mu = std::log(f2 / fy) / std::log1p(rel) - 1.0;
  if (!(mu > 0.0)) return 0.0;
  return y / (mu * fy);
}

}  // namespace

double ComparisonOde::blow_up_time() const {
  validate();
  return 1.0 / (mu * c * std::pow(y0, mu));
}

void ComparisonOde::validate() const {
  if (!(y0 > 0.0)) throw DomainError("comparison ode: y0 must be positive");
  if (!(c > 0.0)) throw DomainError("comparison ode: c must be positive");
  if (!(mu > 0.0)) throw DomainError("comparison ode: mu must be positive");
}

void DichotomyOde::validate() const {
  if (!(y0 > 0.0)) throw DomainError("dichotomy ode: y0 must be positive");
  if (!(c1 >= 0.0)) throw DomainError("dichotomy ode: c1 must be non-negative");
  if (!(c2 > 0.0)) throw DomainError("dichotomy ode: c2 must be positive");
  if (!(beta > 0.0)) throw DomainError("dichotomy ode: beta must be positive");
  if (!(omega >= 0.0)) throw DomainError("dichotomy ode: omega must be non-negative");
}

std::string to_string(Terminal t) {
  switch (t) {
    case Terminal::completed:
      return "completed";
    case Terminal::blew_up:
      return "blew_up";
    case Terminal::hit_zero:
      return "hit_zero";
  }
  return "unknown";
}

std::string to_string(DichotomyOutcome o) { return o == DichotomyOutcome::blow_up ? "blow-up" : "global"; }

double closed_form_z(const ComparisonOde& ode, double t) {
  const double ts = ode.blow_up_time();
  if (!(t >= 0.0)) throw DomainError("closed_form_z: t must be non-negative");
  if (t >= ts) {
    std::ostringstream os;
    os << "closed_form_z: t = " << t << " is past the blow-up time " << ts;
    throw BlowUpError(os.str(), ts);
  }
  const double base = 1.0 - ode.mu * ode.c * std::pow(ode.y0, ode.mu) * t;
  return ode.y0 / std::pow(base, 1.0 / ode.mu);
}

double decay_envelope(double y0, double c, double beta, double gamma, double t) {
  return c * y0 / std::pow(1.0 + beta * t, gamma);
}

OdeTrajectory integrate(const Rhs& rhs, double y0, double t_end, double tol,
                        const IntegrateOptions& opts) {
  if (!(tol > 0.0)) throw DomainError("integrate: tol must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("integrate: t_end must be finite and >= 0");
  if (!std::isfinite(y0)) throw DomainError("integrate: y0 must be finite");

  OdeTrajectory tr;
  tr.times.push_back(0.0);
  tr.values.push_back(y0);
  if (t_end == 0.0) return tr;

  const double h_max = opts.h_max > 0.0 ? opts.h_max : t_end / 100.0;
  double t = 0.0;
  double y = y0;
  double f = rhs(t, y);
  if (!std::isfinite(f)) throw NumericalError("integrate: right-hand side is not finite at t = 0");
  double h = std::min(h_max, 1e-3 * t_end);
  {
    const double scale = tol + tol * std::abs(y);
    if (std::abs(f) > 0.0) h = std::min(h, 0.01 * std::pow(scale, 0.2) * std::max(std::abs(y), 1.0) / std::abs(f));
    h = std::max(h, opts.h_min_rel * t_end);
  }

  std::size_t steps = 0;
  while (t < t_end) {
    if (++steps > opts.max_steps) throw NumericalError("integrate: step limit exceeded");
    const double h_min = opts.h_min_rel * std::max(1.0, std::abs(t));
    if (h < h_min) {
      // Step collapse. Past the ceiling, or within time resolution of a
      // power-law singularity, this is the blow-up; otherwise it is stiffness.
      const double rem = remaining_time(rhs, t, y, f);
      if (y > opts.ceiling || (rem > 0.0 && rem <= 1e4 * h_min)) {
        tr.terminal = Terminal::blew_up;
        tr.t_event = t + rem;
        tr.t_lo = t;
        tr.t_hi = t + 2.0 * rem;
        return tr;
      }
      std::ostringstream os;
      os << "integrate: step size underflow at t = " << t << " (y = " << y << ")";
      throw NumericalError(os.str());
    }
    const bool last = t + h >= t_end;
    const double hh = last ? t_end - t : h;
    const StepResult s = dopri_step(rhs, t, y, hh, f);
    if (!s.finite) {
      h = hh * 0.25;
      continue;
    }
    const double scale = tol + tol * std::max(std::abs(y), std::abs(s.y));
    const double errn = s.err / scale;
    if (errn > 1.0) {
      h = hh * std::max(0.2, 0.9 * std::pow(errn, -0.2));
      continue;
    }

    const double t_new = last ? t_end : t + hh;
    if (y > 0.0 && s.y < 0.0) {
      const double tz = t + hh * y / (y - s.y);
      tr.times.push_back(tz);
      tr.values.push_back(0.0);
      tr.terminal = Terminal::hit_zero;
      tr.t_event = tz;
      return tr;
    }
    t = t_new;
    y = s.y;
    f = s.f_end;
    tr.times.push_back(t);
    tr.values.push_back(y);
    if (y == 0.0 && f <= 0.0) {
      tr.terminal = Terminal::hit_zero;
      tr.t_event = t;
      return tr;
    }

    if (y > opts.ceiling) {
      const double rem = remaining_time(rhs, t, y, f);
      if (rem > 0.0 && (2.0 * rem <= opts.bracket_rel * (t + rem) || y > 1e250)) {
        tr.terminal = Terminal::blew_up;
        tr.t_event = t + rem;
        tr.t_lo = t;
        tr.t_hi = t + 2.0 * rem;
        return tr;
      }
    }
    const double grow = errn == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(errn, -0.2)));
    h = std::min(h_max, hh * grow);
  }
  return tr;
}

DichotomyResult run_dichotomy(const DichotomyOde& ode, double t_end, double tol,
                              const IntegrateOptions& opts) {
  ode.validate();
  const double eff = ode.c2 * (1.0 - ode.omega);
  const double p = 1.0 + ode.beta;
  const Rhs rhs = [&](double, double y) { return -ode.c1 + eff * std::pow(std::max(y, 0.0), p); };
  DichotomyResult r;
  r.trajectory = integrate(rhs, ode.y0, t_end, tol, opts);
  r.branch = r.trajectory.terminal == Terminal::blew_up ? DichotomyOutcome::blow_up : DichotomyOutcome::global;
  if (ode.omega < 1.0) r.threshold = std::pow(ode.c1 / eff, 1.0 / p);
  return r;
}

double fit_blowup_exponent(const OdeTrajectory& tr, double t_star, double lo, double hi) {
  if (!(t_star > 0.0)) throw NumericalError("fit_blowup_exponent: t_star must be positive");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double t = tr.times[i];
    if (t > lo * t_star && t < hi * t_star && tr.values[i] > 0.0) {
      xs.push_back(std::log(t_star - t));
      ys.push_back(std::log(tr.values[i]));
    }
  }
  if (xs.size() < 20) {
    std::ostringstream os;
    os << "fit_blowup_exponent: " << xs.size() << " samples in the fit window, need 20";
    throw NumericalError(os.str());
  }
  const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
  if (*mx - *mn < 1e-9) throw NumericalError("fit_blowup_exponent: trajectory does not diverge in the window");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mxv = sx / n, myv = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mxv) * (xs[i] - mxv);
    sxy += (xs[i] - mxv) * (ys[i] - myv);
  }
  if (sxx == 0.0) throw NumericalError("fit_blowup_exponent: degenerate abscissae");
  return sxy / sxx;
}

}  // namespace nslog::ode
