#pragma once

// Scalar comparison ODEs: closed forms, an adaptive Dormand-Prince 5(4)
// integrator with finite-time blow-up detection, the dichotomy model and
// log-log fitting of blow-up rates.

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nslog::ode {

/// dZ/dt = c Z^{1+mu}
struct ComparisonOde {
  double y0 = 1;
  double c = 1;
  double mu = 1;

  double blow_up_time() const;
  void validate() const;
};

/// dY/dt = -c1 + c2 (1 - omega) Y^{1+beta}
struct DichotomyOde {
  double y0 = 1;
  double c1 = 1;
  double c2 = 1;
  double beta = 0.5;
  double omega = 0;

  void validate() const;
};

enum class Terminal { completed, blew_up, hit_zero };
std::string to_string(Terminal t);

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<double> values;
  Terminal terminal = Terminal::completed;
  double t_event = 0;  ///< t_star for blew_up, crossing time for hit_zero
  double t_lo = 0;     ///< bracket on t_star
  double t_hi = 0;
};

/// Y0 / (1 - mu C Y0^mu t)^{1/mu}; BlowUpError for t >= blow_up_time.
double closed_form_z(const ComparisonOde& ode, double t);

/// c y0 / (1 + beta t)^gamma
double decay_envelope(double y0, double c, double beta, double gamma, double t);

struct IntegrateOptions {
  double ceiling = 1e12;
  double bracket_rel = 1e-4;  ///< target relative width of the t_star bracket
  double h_max = 0;           ///< 0: (t_end - t0) / 100
  double h_min_rel = 1e-14;
  std::size_t max_steps = 50'000'000;
};

using Rhs = std::function<double(double t, double y)>;

/// Adaptive integration from t = 0. Step error is measured as |e| / (tol + tol |y|).
/// Throws NumericalError when the step size underflows below the ceiling.
OdeTrajectory integrate(const Rhs& rhs, double y0, double t_end, double tol,
                        const IntegrateOptions& opts = {});

enum class DichotomyOutcome { blow_up, global };
std::string to_string(DichotomyOutcome o);

struct DichotomyResult {
  OdeTrajectory trajectory;
  DichotomyOutcome branch = DichotomyOutcome::global;
  std::optional<double> threshold;  ///< (c1 / (c2 (1 - omega)))^{1/(1+beta)} when omega < 1
};

DichotomyResult run_dichotomy(const DichotomyOde& ode, double t_end, double tol,
                              const IntegrateOptions& opts = {});

/// Slope of log y against log(t_star - t) over samples with t in (lo, hi) * t_star.
/// Needs at least 20 samples and a diverging trajectory, else NumericalError.
double fit_blowup_exponent(const OdeTrajectory& tr, double t_star, double lo = 0.5,
                           double hi = 0.99);

}  // namespace nslog::ode
