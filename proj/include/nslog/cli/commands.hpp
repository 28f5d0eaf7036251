#pragma once

// Command drivers behind the nslog executable. Each command writes its
// outputs atomically under the run's out_dir and records their digests;
// execute() writes manifest.json last and maps failures to exit codes.

#include <exception>
#include <string>
#include <vector>

#include "nslog/cli/config.hpp"
#include "nslog/cli/output.hpp"
#include "nslog/field.hpp"

namespace nslog::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kConfigFailure = 1, kNumericalFailure = 2, kIoFailure = 3 };

/// Exit code for an exception thrown by a stage.
int exit_code_for(const std::exception& e);

struct FileDigest {
  std::string path;  ///< relative to out_dir
  std::string sha256;
  bool operator==(const FileDigest&) const = default;
};

struct Stage {
  std::string name;
  std::string status;  ///< ok, failed, skipped
  std::string message;
};

/// Collects outputs, inputs and stage status for one run.
class RunContext {
 public:
  explicit RunContext(const RunConfig& cfg) : cfg_(cfg) {}

  const RunConfig& config() const { return cfg_; }
  std::string path(const std::string& name) const;

  void write(const std::string& name, const std::string& bytes);
  void write_csv(const std::string& name, const Csv& csv) { write(name, csv.str()); }
  void write_field(const std::string& name, const PhysField& f);
  void note_input(const std::string& path);
  void stage(const std::string& name, const std::string& status, const std::string& message = "");

  const std::vector<FileDigest>& outputs() const { return outputs_; }
  const std::vector<FileDigest>& inputs() const { return inputs_; }
  const std::vector<Stage>& stages() const { return stages_; }

 private:
  const RunConfig& cfg_;
  std::vector<FileDigest> outputs_;
  std::vector<FileDigest> inputs_;
  std::vector<Stage> stages_;
};

void cmd_formulas(RunContext& ctx);
void cmd_ode(RunContext& ctx);
void cmd_simulate(RunContext& ctx);
void cmd_analyze(RunContext& ctx);
void cmd_audit(RunContext& ctx);
void cmd_sweep(RunContext& ctx);

struct SweepCrossing {
  bool found = false;
  double lambda_lo = 0;
  double lambda_hi = 0;
  double lambda_star = 0;
};

/// Bisection for omega(lambda) = 1 over the sweep grid, to relative width `rel`.
SweepCrossing locate_crossing(const RunConfig& cfg, double rel = 1e-9);

struct RunOutcome {
  int exit_code = kOk;
  std::string error;
  std::vector<FileDigest> outputs;
  std::string manifest_path;
};

struct RunOptions {
  std::string verify_manifest;  ///< compare output digests against this manifest
};

RunOutcome execute(const RunConfig& cfg, const RunOptions& opts = {});

/// Output digests listed in a manifest file.
std::vector<FileDigest> manifest_outputs(const std::string& manifest_path);

/// Field described by the [grid] and [initial] sections.
PhysField initial_field(const RunConfig& cfg, RunContext* ctx = nullptr);

}  // namespace nslog::cli
