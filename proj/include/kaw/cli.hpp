#pragma once

#include "kaw/config.hpp"
#include "kaw/diagnostics.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace kaw {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitCertificate = 2,
  kExitSolver = 3,
  kExitIo = 4,
};

struct CliOptions {
  std::string config_path;
  std::string out_dir{"."};
  /// 0 selects the available parallelism.
  int workers{0};
  std::string axis;
  std::vector<double> values;
};

/// KAW_WORKERS wins over the flag; both fall back to hardware concurrency.
int resolve_workers(int flag);

int cmd_check(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_run(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CliOptions& opts, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal, locale independent.
std::string format_double(double v);

void write_series_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records);

/// Certificate for the configured initial data (radius ‖(u0, z0)‖_H).
Certificate config_certificate(const RunConfig& config);
nlohmann::json certificate_json(const Certificate& c);
nlohmann::json check_json(const Check& c);

struct VerifyReport {
  std::vector<Check> checks;
  nlohmann::json details;
  /// All non-informational checks pass.
  bool pass() const;
};

VerifyReport run_verification(const RunConfig& config, int workers);

/// Fit window [fit_start, T_end], or the whole run when T_end ≤ fit_start.
DecayFit fit_run(const std::vector<DiagnosticsRecord>& records, const RunConfig& config);

}  // namespace kaw
