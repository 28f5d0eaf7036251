#include "nslog/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "nslog/cli/output.hpp"
#include "nslog/error.hpp"

namespace nslog::cli {

namespace {

enum class Kind { real, integer, boolean, text, list, choice };

struct Param {
  std::string section;
  std::string key;
  Kind kind;
  std::string def;
  // Returns an empty string when the value is acceptable.
  std::function<std::string(const Value&)> check;
  std::vector<std::string> choices;
};

using Check = std::function<std::string(const Value&)>;

Check any() {
  return [](const Value&) { return std::string(); };
}
Check gt(double lo, const std::string& msg) {
  return [=](const Value& v) { return std::get<double>(v) > lo ? std::string() : msg; };
}
Check ge(double lo, const std::string& msg) {
  return [=](const Value& v) { return std::get<double>(v) >= lo ? std::string() : msg; };
}
Check open_closed(double lo, double hi, const std::string& msg) {
  return [=](const Value& v) {
    const double x = std::get<double>(v);
    return x > lo && x <= hi ? std::string() : msg;
  };
}
Check open(double lo, double hi, const std::string& msg) {
  return [=](const Value& v) {
    const double x = std::get<double>(v);
    return x > lo && x < hi ? std::string() : msg;
  };
}
Check int_ge(std::int64_t lo, const std::string& msg) {
  return [=](const Value& v) { return std::get<std::int64_t>(v) >= lo ? std::string() : msg; };
}
Check each(std::function<bool(double)> ok, const std::string& msg) {
  return [=](const Value& v) {
    for (double x : std::get<std::vector<double>>(v))
      if (!ok(x)) return msg;
    return std::string();
  };
}

const std::vector<Param>& schema() {
  static const std::vector<Param> s = [] {
    const std::string two_pi = format_double(2 * std::numbers::pi);
    auto pos = [](double x) { return x > 0.0; };
    auto nonneg = [](double x) { return x >= 0.0; };
    auto natural = [](double x) { return x >= 0.0 && x == std::floor(x); };
    std::vector<Param> p = {
        // ladder
        {"ladder", "deltas", Kind::list, "1,1", each(nonneg, "must be non-negative"), {}},
        {"ladder", "cs", Kind::list, "", each(pos, "must be positive"), {}},
        {"ladder", "c0", Kind::real, "1", gt(0, "must be positive"), {}},
        {"ladder", "c3", Kind::real, "1", gt(0, "must be positive"), {}},
        {"ladder", "eta", Kind::real, "0.01", gt(0, "must be positive"), {}},
        // formulas
        {"formulas", "s", Kind::real, "0.75", open(0.5, 1, "must exceed 1/2 (and be below 1)"), {}},
        {"formulas", "q", Kind::real, "12", gt(3, "must exceed 3"), {}},
        {"formulas", "s_min", Kind::real, "0.501", open(0.5, 1, "must lie in (1/2, 1)"), {}},
        {"formulas", "s_max", Kind::real, "0.999", open(0.5, 1, "must lie in (1/2, 1)"), {}},
        {"formulas", "s_points", Kind::integer, "50", int_ge(2, "must be at least 2"), {}},
        {"formulas", "eps_min", Kind::real, "0.0001", open(0, 1, "must lie in (0, 1)"), {}},
        {"formulas", "eps_max", Kind::real, "0.5", open(0, 1, "must lie in (0, 1)"), {}},
        {"formulas", "eps_points", Kind::integer, "20", int_ge(2, "must be at least 2"), {}},
        {"formulas", "p_max", Kind::integer, "8", int_ge(3, "must be at least 3"), {}},
        {"formulas", "h_points", Kind::integer, "41", int_ge(2, "must be at least 2"), {}},
        {"formulas", "k0", Kind::real, "1", gt(0, "must be positive"), {}},
        {"formulas", "k_nu", Kind::real, "100", gt(0, "must be positive"), {}},
        {"formulas", "k_points", Kind::integer, "50", int_ge(2, "must be at least 2"), {}},
        {"formulas", "eps_rate", Kind::real, "1", gt(0, "must be positive"), {}},
        {"formulas", "nu", Kind::real, "0.001", gt(0, "must be positive"), {}},
        {"formulas", "t", Kind::real, "1", ge(0, "must be non-negative"), {}},
        {"formulas", "beta0", Kind::list, "0.5,0.25", any(), {}},
        // ode
        {"ode", "kind", Kind::choice, "comparison", any(), {"comparison", "dichotomy"}},
        {"ode", "y0", Kind::real, "2", gt(0, "must be positive"), {}},
        {"ode", "c", Kind::real, "1", gt(0, "must be positive"), {}},
        {"ode", "mu", Kind::real, "1", gt(0, "must be positive"), {}},
        {"ode", "c1", Kind::real, "1", ge(0, "must be non-negative"), {}},
        {"ode", "c2", Kind::real, "1", gt(0, "must be positive"), {}},
        {"ode", "beta", Kind::real, "0.5", gt(0, "must be positive"), {}},
        {"ode", "omega", Kind::real, "0", ge(0, "must be non-negative"), {}},
        {"ode", "t_end", Kind::real, "1", gt(0, "must be positive"), {}},
        {"ode", "tol", Kind::real, "1e-12", gt(0, "must be positive"), {}},
        {"ode", "fit_lo", Kind::real, "0.5", open(0, 1, "must lie in (0, 1)"), {}},
        {"ode", "fit_hi", Kind::real, "0.99", open(0, 1, "must lie in (0, 1)"), {}},
        // grid
        {"grid", "npts", Kind::list, "32,32,32",
         [](const Value& v) {
           const auto& l = std::get<std::vector<double>>(v);
           if (l.size() != 2 && l.size() != 3) return std::string("needs 2 or 3 entries");
           for (double x : l) {
             if (!(x >= 8 && x == std::floor(x) && x <= 4096)) return std::string("entries must be powers of two >= 8");
             const auto n = static_cast<std::uint64_t>(x);
             if ((n & (n - 1)) != 0) return std::string("entries must be powers of two >= 8");
           }
           return std::string();
         },
         {}},
        {"grid", "box", Kind::real, two_pi, gt(0, "must be positive"), {}},
        // initial data
        {"initial", "kind", Kind::choice, "shear", any(),
         {"shear", "taylor_green", "random", "shell", "abc", "zero", "constant", "snapshot"}},
        {"initial", "k", Kind::integer, "1", int_ge(1, "must be at least 1"), {}},
        {"initial", "amp", Kind::real, "1", any(), {}},
        {"initial", "slope", Kind::real, format_double(-5.0 / 3.0), any(), {}},
        {"initial", "k_lo", Kind::real, "1", ge(1, "must be at least 1"), {}},
        {"initial", "k_hi", Kind::real, "4", ge(1, "must be at least 1"), {}},
        {"initial", "energy", Kind::real, "0.5", ge(0, "must be non-negative"), {}},
        {"initial", "r", Kind::real, "2", gt(0, "must be positive"), {}},
        {"initial", "path", Kind::text, "", any(), {}},
        // solver
        {"solver", "nu", Kind::real, "0.1", gt(0, "must be positive"), {}},
        {"solver", "s", Kind::real, "1", open_closed(0.5, 1, "must exceed 1/2 (and be at most 1)"), {}},
        {"solver", "dt_policy", Kind::choice, "fixed", any(), {"fixed", "cfl"}},
        {"solver", "dt", Kind::real, "0.01", gt(0, "must be positive"), {}},
        {"solver", "cfl", Kind::real, "0.5", open(0, 1, "must lie in (0, 1)"), {}},
        {"solver", "t_end", Kind::real, "1", ge(0, "must be non-negative"), {}},
        {"solver", "dealias", Kind::boolean, "true", any(), {}},
        {"solver", "record_every", Kind::real, "0.01", gt(0, "must be positive"), {}},
        {"solver", "q", Kind::real, "12", ge(1, "must be at least 1"), {}},
        {"solver", "forcing", Kind::boolean, "false", any(), {}},
        {"solver", "forcing_k_lo", Kind::real, "1", gt(0, "must be positive"), {}},
        {"solver", "forcing_k_hi", Kind::real, "2", gt(0, "must be positive"), {}},
        {"solver", "injection", Kind::real, "0.1", ge(0, "must be non-negative"), {}},
        {"solver", "write_snapshot", Kind::boolean, "true", any(), {}},
        // analyze
        {"analyze", "input", Kind::text, "", any(), {}},
        {"analyze", "nu", Kind::real, "0.1", gt(0, "must be positive"), {}},
        {"analyze", "s", Kind::real, "1", gt(0, "must be positive"), {}},
        {"analyze", "orders", Kind::list, "1,2,3,4,5,6", each(pos, "must be positive"), {}},
        {"analyze", "separations", Kind::list, "0,1,2,4,8", each(natural, "must be whole cell counts"), {}},
        {"analyze", "eps", Kind::list, "0.01,0.05,0.1",
         each([](double x) { return x > 0 && x < 1; }, "must lie in (0, 1)"), {}},
        {"analyze", "radii", Kind::list, "1,2,4", each([](double x) { return x >= 1 && x == std::floor(x); }, "must be whole cell counts >= 1"), {}},
        {"analyze", "n_samples", Kind::integer, "0", int_ge(0, "must be non-negative"), {}},
        {"analyze", "histogram_bins", Kind::integer, "20", int_ge(1, "must be at least 1"), {}},
        {"analyze", "fit_k_lo", Kind::real, "1", gt(0, "must be positive"), {}},
        {"analyze", "fit_k_hi", Kind::real, "10", gt(0, "must be positive"), {}},
        {"analyze", "k0", Kind::real, "1", gt(0, "must be positive"), {}},
        {"analyze", "k_nu", Kind::real, "8", gt(0, "must be positive"), {}},
        {"analyze", "eps_rate", Kind::real, "0", ge(0, "must be non-negative"), {}},
        // audit
        {"audit", "s", Kind::real, "0.75", open(0, 1, "must lie in (0, 1)"), {}},
        {"audit", "sigma", Kind::real, "0.1", gt(0, "must be positive"), {}},
        {"audit", "decay_t_end", Kind::real, "0", ge(0, "must be non-negative"), {}},
        {"audit", "c_env", Kind::real, "1", gt(0, "must be positive"), {}},
        {"audit", "beta_env", Kind::real, "1", gt(0, "must be positive"), {}},
        {"audit", "k0", Kind::real, "1", gt(0, "must be positive"), {}},
        {"audit", "k_nu", Kind::real, "8", gt(0, "must be positive"), {}},
        {"audit", "eps_rate", Kind::real, "0", ge(0, "must be non-negative"), {}},
        // sweep
        {"sweep", "s", Kind::real, "0.75", open(0.5, 1, "must exceed 1/2 (and be below 1)"), {}},
        {"sweep", "q", Kind::real, "12", gt(3, "must exceed 3"), {}},
        {"sweep", "lambda_min", Kind::real, "1", ge(1, "must be at least 1"), {}},
        {"sweep", "lambda_max", Kind::real, "1000000", ge(1, "must be at least 1"), {}},
        {"sweep", "points", Kind::integer, "40", int_ge(2, "must be at least 2"), {}},
        {"sweep", "run_ode", Kind::boolean, "false", any(), {}},
        {"sweep", "y0", Kind::real, "1", gt(0, "must be positive"), {}},
        {"sweep", "c1", Kind::real, "1", ge(0, "must be non-negative"), {}},
        {"sweep", "c2", Kind::real, "1", gt(0, "must be positive"), {}},
        {"sweep", "beta", Kind::real, "0.5", gt(0, "must be positive"), {}},
        {"sweep", "t_end", Kind::real, "10", gt(0, "must be positive"), {}},
        {"sweep", "tol", Kind::real, "1e-10", gt(0, "must be positive"), {}},
    };
    return p;
  }();
  return s;
}

const Param* find_param(const std::string& section, const std::string& key) {
  for (const auto& p : schema())
    if (p.section == section && p.key == key) return &p;
  return nullptr;
}

std::string primary_section(Mode m) {
  switch (m) {
    case Mode::formulas:
      return "formulas";
    case Mode::ode:
      return "ode";
    case Mode::simulate:
      return "solver";
    case Mode::analyze:
      return "analyze";
    case Mode::audit:
      return "audit";
    case Mode::sweep:
      return "sweep";
  }
  return "";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  const auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e && b != e;
}

Value parse_value(const Param& p, const std::string& raw) {
  const std::string where = p.section + "." + p.key;
  auto fail = [&](const std::string& what) -> ConfigError {
    return ConfigError("key '" + p.key + "' (" + where + "): " + what + " (got '" + raw + "')");
  };
  switch (p.kind) {
    case Kind::real: {
      double x;
      if (!parse_real(raw, x) || std::isnan(x)) throw fail("expected a number");
      return x;
    }
    case Kind::integer: {
      std::int64_t x;
      const auto r = std::from_chars(raw.data(), raw.data() + raw.size(), x);
      if (r.ec != std::errc() || r.ptr != raw.data() + raw.size() || raw.empty()) throw fail("expected an integer");
      return x;
    }
    case Kind::boolean:
      if (raw == "true" || raw == "yes" || raw == "on" || raw == "1") return true;
      if (raw == "false" || raw == "no" || raw == "off" || raw == "0") return false;
      throw fail("expected true or false");
    case Kind::text:
      return raw;
    case Kind::list: {
      std::vector<double> out;
      if (trim(raw).empty()) return out;
      std::stringstream ss(raw);
      std::string item;
      while (std::getline(ss, item, ',')) {
        double x;
        if (!parse_real(trim(item), x) || std::isnan(x)) throw fail("expected a comma-separated list of numbers");
        out.push_back(x);
      }
      return out;
    }
    case Kind::choice:
      if (std::find(p.choices.begin(), p.choices.end(), raw) == p.choices.end()) {
        std::string all;
        for (const auto& c : p.choices) all += (all.empty() ? "" : ", ") + c;
        throw fail("expected one of " + all);
      }
      return raw;
  }
  throw fail("unsupported kind");
}

std::string render(const Value& v) {
  struct Visitor {
    std::string operator()(double x) const { return format_double(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const std::vector<double>& l) const {
      std::string out;
      for (std::size_t i = 0; i < l.size(); ++i) out += (i ? "," : "") + format_double(l[i]);
      return out;
    }
  };
  return std::visit(Visitor{}, v);
}

void check_domain(const Param& p, const Value& v) {
  const std::string msg = p.check(v);
  if (!msg.empty())
    throw ConfigError("domain violation: key '" + p.key + "' (" + p.section + "." + p.key + ") " + msg + ", got " +
                      render(v));
}

// Constraints involving several keys.
void cross_checks(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError("domain violation: " + m); };
  if (c.real("formulas.s_min") >= c.real("formulas.s_max")) fail("formulas.s_min must be below s_max");
  if (c.real("formulas.eps_min") >= c.real("formulas.eps_max")) fail("formulas.eps_min must be below eps_max");
  if (c.real("formulas.k0") >= c.real("formulas.k_nu")) fail("formulas.k0 must be below k_nu");
  if (c.real("ode.fit_lo") >= c.real("ode.fit_hi")) fail("ode.fit_lo must be below fit_hi");
  if (c.real("initial.k_lo") > c.real("initial.k_hi")) fail("initial.k_lo must not exceed k_hi");
  if (c.real("solver.forcing_k_lo") > c.real("solver.forcing_k_hi")) fail("solver.forcing_k_lo must not exceed forcing_k_hi");
  if (c.real("sweep.lambda_min") >= c.real("sweep.lambda_max")) fail("sweep.lambda_min must be below lambda_max");
  if (c.real("analyze.k0") >= c.real("analyze.k_nu")) fail("analyze.k0 must be below k_nu");
  if (c.real("audit.k0") >= c.real("audit.k_nu")) fail("audit.k0 must be below k_nu");
  if (c.real("audit.s") + c.real("audit.sigma") >= 1.0) fail("audit.sigma must satisfy s + sigma < 1");
  const auto& cs = c.list("ladder.cs");
  if (!cs.empty() && cs.size() != c.list("ladder.deltas").size()) fail("ladder.cs must be empty or match deltas in length");
  if (c.text("initial.kind") == "snapshot" && c.text("initial.path").empty() && c.mode != Mode::analyze)
    fail("initial.path is required when initial.kind = snapshot");
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::formulas:
      return "formulas";
    case Mode::ode:
      return "ode";
    case Mode::simulate:
      return "simulate";
    case Mode::analyze:
      return "analyze";
    case Mode::audit:
      return "audit";
    case Mode::sweep:
      return "sweep";
  }
  return "unknown";
}

Mode parse_mode(const std::string& name) {
  for (Mode m : {Mode::formulas, Mode::ode, Mode::simulate, Mode::analyze, Mode::audit, Mode::sweep})
    if (to_string(m) == name) return m;
  throw ConfigError("unknown mode '" + name + "' (expected formulas, ode, simulate, analyze, audit or sweep)");
}

std::vector<std::string> config_sections() {
  return {"run", "ladder", "formulas", "ode", "grid", "initial", "solver", "analyze", "audit", "sweep"};
}

double RunConfig::real(const std::string& key) const { return std::get<double>(values.at(key)); }
std::int64_t RunConfig::integer(const std::string& key) const { return std::get<std::int64_t>(values.at(key)); }
bool RunConfig::flag(const std::string& key) const { return std::get<bool>(values.at(key)); }
const std::string& RunConfig::text(const std::string& key) const { return std::get<std::string>(values.at(key)); }
const std::vector<double>& RunConfig::list(const std::string& key) const {
  return std::get<std::vector<double>>(values.at(key));
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::set<std::string> seen;
  bool have_mode = false;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto syntax = [&](const std::string& what) {
    throw ConfigError("line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') syntax("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      const auto secs = config_sections();
      if (std::find(secs.begin(), secs.end(), section) == secs.end()) syntax("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) syntax("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    if (key.empty()) syntax("missing key before '='");

    // Keys outside any section: run keys, then the mode's own section, then the ladder.
    std::string sec = section;
    if (sec.empty()) {
      if (key == "mode" || key == "seed" || key == "out_dir") {
        sec = "run";
      } else {
        if (!have_mode) syntax("key '" + key + "' outside a section must follow 'mode'");
        sec = find_param(primary_section(c.mode), key) ? primary_section(c.mode) : "ladder";
      }
    }
    const std::string full = sec + "." + key;
    if (!seen.insert(full).second) syntax("duplicate key '" + key + "' (" + full + ")");
    if (sec == "run") {
      if (key == "mode") {
        c.mode = parse_mode(raw);
        have_mode = true;
      } else if (key == "seed") {
        std::uint64_t x;
        const auto r = std::from_chars(raw.data(), raw.data() + raw.size(), x);
        if (r.ec != std::errc() || r.ptr != raw.data() + raw.size() || raw.empty())
          throw ConfigError("key 'seed' (run.seed): expected an unsigned 64-bit integer (got '" + raw + "')");
        c.seed = x;
      } else if (key == "out_dir") {
        c.out_dir = raw;
      } else {
        syntax("unknown key '" + key + "' in [run]");
      }
      continue;
    }
    const Param* p = find_param(sec, key);
    if (!p) syntax("unknown key '" + key + "' in [" + sec + "]");
    const Value v = parse_value(*p, raw);
    check_domain(*p, v);
    c.values[full] = v;
  }
  if (!have_mode) throw ConfigError("missing required key 'mode'");
  for (const auto& p : schema()) {
    const std::string full = p.section + "." + p.key;
    if (!c.values.count(full)) c.values[full] = parse_value(p, p.def);
  }
  cross_checks(c);
  return c;
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[run]\nmode = " << to_string(c.mode) << "\nseed = " << c.seed << "\nout_dir = " << c.out_dir << "\n";
  std::string current;
  for (const auto& p : schema()) {
    if (p.section != current) {
      current = p.section;
      os << "\n[" << current << "]\n";
    }
    os << p.key << " = " << render(c.values.at(p.section + "." + p.key)) << "\n";
  }
  return os.str();
}

}  // namespace nslog::cli
