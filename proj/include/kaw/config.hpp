#pragma once

#include "kaw/errors.hpp"
#include "kaw/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace kaw {

/// Malformed or invalid configuration; `what()` names the field or line.
class ConfigError : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

struct KernelSpec {
  /// constant | exponential | tabulated
  std::string form{"constant"};
  double tau1{1.0};
  double tau2{2.0};
  double c{1.0};
  double sigma{0.0};
  std::vector<double> s;
  std::vector<double> values;

  MemoryKernel build() const;
  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

struct NumericsSpec {
  int N{128};
  double dt{0.01};
  double T_end{30.0};
  int record_every{10};
  bool linear_only{false};
  bool mms{false};
  int startup_steps{2};
  /// Start of the decay-fit window; the window ends at T_end.
  double fit_start{5.0};
  friend bool operator==(const NumericsSpec&, const NumericsSpec&) = default;
};

struct OutputSpec {
  std::string csv{"series.csv"};
  std::string report{"report.json"};
  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

/// Settings of the verification suite.
struct VerifySpec {
  int samples{20};
  int random_runs{20};
  double horizon{5.0};
  int spectral_N{300};
  friend bool operator==(const VerifySpec&, const VerifySpec&) = default;
};

struct RunConfig {
  PhysicalParams model;
  FeedbackGains gains;
  KernelSpec kernel;
  NumericsSpec numerics;
  U0Spec u0;
  Z0Spec z0;
  Normalization normalize;
  OutputSpec outputs;
  VerifySpec verify;
  std::uint64_t seed{20240601};

  SimConfig to_sim() const;
  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

bool operator==(const PhysicalParams&, const PhysicalParams&);
bool operator==(const FeedbackGains&, const FeedbackGains&);
bool operator==(const RunConfig&, const RunConfig&);

/// Parses and validates. Unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& config);

/// Returns a copy with the scalar at `axis` (e.g. "model.L") set to `value`.
/// Throws ConfigError unless `axis` names a numeric scalar field.
void check_axis(const RunConfig& config, const std::string& axis);

RunConfig with_axis_value(const RunConfig& config, const std::string& axis, double value);

RunConfig reference_config();

}  // namespace kaw
