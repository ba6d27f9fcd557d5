#pragma once

#include "kaw/discretization.hpp"
#include "kaw/kernel.hpp"
#include "kaw/memory.hpp"
#include "kaw/model.hpp"
#include "kaw/profiles.hpp"

#include <optional>
#include <vector>

namespace kaw {

struct SimConfig {
  PhysicalParams params;
  FeedbackGains gains;
  MemoryKernel kernel{1.0, 2.0, ConstantForm{1.0}};
  int N{128};
  double dt{0.01};
  double T_end{30.0};
  int record_every{10};
  U0Spec u0;
  Z0Spec z0;
  Normalization normalization;
  /// Replace u0/z0 by the manufactured solution and add its forcing.
  bool mms{false};
  bool linear_only{false};
  /// Leading steps taken as two backward-Euler half steps each.
  int startup_steps{2};
  int history_margin{2};

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  /// ceil(T_end/dt), ignoring rounding noise.
  long step_count() const;
};

struct SimState {
  std::vector<double> u;
  HistoryBuffer history;
  double t{0.0};
  long step_index{0};
  /// Nonlinear term at the previous level, for Adams–Bashforth.
  std::optional<std::vector<double>> nonlinear_prev;
};

/// Field values along a trajectory.
struct DiagnosticsRecord {
  double t{0.0};
  double E{0.0};
  double E1{0.0};
  double E2{0.0};
  double xi{0.0};
  double w0{0.0};
  double F{0.0};
  double qform{0.0};
  double l2{0.0};
  double h2seminorm{0.0};
  /// ∫λ(s) w(t−s) ds
  double memory{0.0};
  /// ∫λ w²(t−s) ds − memory²/∫λ ≥ 0
  double cs_gap{0.0};
  /// ∫λ w²(t−s) ds
  double lambda_w2{0.0};
  /// ∫s λ(s) w²(t−s) ds
  double s_lambda_w2{0.0};
  /// ∫λ ∫₀^s w²(t−σ) dσ ds
  double z_plain{0.0};
  /// F − u_xx(L) of the discrete state
  double penalty{0.0};
  /// Energy lost to the one-sided third-derivative closure.
  double closure_loss{0.0};
};

class Simulator {
public:
  explicit Simulator(SimConfig config);

  const SimConfig& config() const { return config_; }
  const SpatialOperator& op() const { return op_; }

  /// u0 and sampled z0, rescaled per the normalization.
  SimState initial_state() const;
  /// Factor applied to (u0, z0) by the normalization.
  double initial_scale() const { return scale_; }

  /// One IMEX step in place. Throws SolverError on non-finite values.
  void step(SimState& state) const;

  struct Result {
    std::vector<DiagnosticsRecord> records;
    SimState final_state;
  };
  Result run() const;

  /// Skew-form discretization of u^p u_x.
  std::vector<double> nonlinear_term(const std::vector<double>& u) const;

private:
  SimState raw_state() const;
  std::vector<double> forcing(double t) const;

  SimConfig config_;
  SpatialOperator op_;
  RankOneBandedSolver solver_;
  double scale_{1.0};
};

DiagnosticsRecord compute_record(const SimState& state, const SimConfig& config,
                                 const SpatialOperator& op);

/// Discrete L² distance between state.u and the manufactured solution at state.t.
double mms_error_l2(const Simulator& sim, const SimState& state);

/// ‖(u0, z0)‖²_H = ‖u0‖² + |β| ∫λ∫₀^s z0² for a state at t = 0.
double h_norm_squared(const SimState& state, const SimConfig& config);

}  // namespace kaw
