#pragma once

// Run configuration: line-oriented `key = value` text with [section] headers
// and # comments. Every key is declared in a schema with a type, a default
// and a domain check; unknown or repeated keys are errors.

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace nslog::cli {

enum class Mode { formulas, ode, simulate, analyze, audit, sweep };

std::string to_string(Mode m);
/// ConfigError for unknown names.
Mode parse_mode(const std::string& name);

using Value = std::variant<double, std::int64_t, bool, std::string, std::vector<double>>;

struct RunConfig {
  Mode mode = Mode::formulas;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  /// Every schema key ("section.key"), defaults filled in.
  std::map<std::string, Value> values;

  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  const std::vector<double>& list(const std::string& key) const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates. Errors carry the line number or the offending key.
RunConfig parse_config(const std::string& text);
/// Canonical text form; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& c);

/// Section names in emission order.
std::vector<std::string> config_sections();

}  // namespace nslog::cli
