#include "kaw/solver.hpp"

#include "kaw/errors.hpp"

#include <cmath>
#include <string>

namespace kaw {

void SimConfig::validate() const {
  params.validate();
  gains.validate();
  if (N < 12) throw InvalidArgument("numerics.N must be >= 12");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("numerics.dt must be > 0");
  if (!(T_end >= 0.0) || !std::isfinite(T_end)) throw InvalidArgument("numerics.T_end must be >= 0");
  if (dt > kernel.tau1()) throw InvalidArgument("numerics.dt must not exceed kernel.tau1");
  if (record_every < 1) throw InvalidArgument("numerics.record_every must be >= 1");
  if (startup_steps < 0) throw InvalidArgument("numerics.startup_steps must be >= 0");
  if (history_margin < 2) throw InvalidArgument("numerics.history_margin must be >= 2");
  kaw::validate(u0);
  kaw::validate(z0);
  if (normalization.kind != "none" && normalization.kind != "norm" &&
      normalization.kind != "radius_fraction") {
    throw InvalidArgument("initial.normalize.kind must be none|norm|radius_fraction");
  }
  if (normalization.kind != "none" && !(normalization.value >= 0.0)) {
    throw InvalidArgument("initial.normalize.value must be >= 0");
  }
}

long SimConfig::step_count() const {
  const double q = T_end / dt;
  return static_cast<long>(std::ceil(q - 1e-9 * std::max(1.0, q)));
}

namespace {

RankOneBandedSolver make_solver(const SpatialOperator& op, const SimConfig& c) {
  // I − (dt/2)(A + α g_F trace0ᵀ)
  std::vector<double> u = op.g_F;
  for (double& v : u) v *= -0.5 * c.dt * c.gains.alpha;
  return RankOneBandedSolver(op.A.scaled_plus_identity(-0.5 * c.dt), u, op.trace0);
}

void check_finite(const std::vector<double>& u, long step, double t) {
  for (double v : u) {
    if (!std::isfinite(v)) {
      throw SolverError("non-finite state at step " + std::to_string(step), step, t);
    }
  }
}

}  // namespace

Simulator::Simulator(SimConfig config)
    : config_((config.validate(), std::move(config))),
      op_(build_operator(config_.params, make_grid(config_.params.L, config_.N))),
      solver_(make_solver(op_, config_)) {
  const auto& norm = config_.normalization;
  if (config_.mms || norm.kind == "none") return;
  double target = norm.value;
  if (norm.kind == "radius_fraction") target *= r_max(config_.params);
  const double e0 = h_norm_squared(raw_state(), config_);
  if (e0 <= 0.0) {
    if (target > 0.0) throw InvalidArgument("cannot normalize zero initial data");
    return;
  }
  scale_ = target / std::sqrt(e0);
}

SimState Simulator::raw_state() const {
  if (config_.mms) {
    const ManufacturedSolution ms(config_.params.a, config_.params.b, config_.params.L,
                                  config_.params.p);
    std::vector<double> u(op_.grid.x.size());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = ms.value(op_.grid.x[j], 0.0);
    HistoryBuffer hist(config_.dt, config_.kernel.tau2(), [](double) { return 0.0; },
                       config_.history_margin);
    return SimState{std::move(u), std::move(hist), 0.0, 0, std::nullopt};
  }
  const Z0Spec z0 = config_.z0;
  HistoryBuffer hist(config_.dt, config_.kernel.tau2(), [&z0](double t) { return eval_z0(z0, t); },
                     config_.history_margin);
  return SimState{sample_u0(config_.u0, op_.grid.x, config_.params.L), std::move(hist), 0.0, 0,
                  std::nullopt};
}

SimState Simulator::initial_state() const {
  SimState s = raw_state();
  if (scale_ != 1.0) {
    for (double& v : s.u) v *= scale_;
    const Z0Spec z0 = config_.z0;
    const double c = scale_;
    s.history = HistoryBuffer(config_.dt, config_.kernel.tau2(),
                              [&z0, c](double t) { return c * eval_z0(z0, t); },
                              config_.history_margin);
  }
  return s;
}

std::vector<double> Simulator::nonlinear_term(const std::vector<double>& u) const {
  // (1/(p+2))·[D1(u^{p+1}) + u^p·D1 u]
  const double p = config_.params.p;
  std::vector<double> up(u.size()), up1(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    up[j] = signed_pow(u[j], p);
    up1[j] = up[j] * u[j];
  }
  const std::vector<double> d_up1 = op_.D1.multiply(up1);
  const std::vector<double> du = op_.D1.multiply(u);
  std::vector<double> out(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = (d_up1[j] + up[j] * du[j]) / (p + 2.0);
  return out;
}

std::vector<double> Simulator::forcing(double t) const {
  std::vector<double> f(op_.grid.x.size(), 0.0);
  if (!config_.mms) return f;
  const ManufacturedSolution ms(config_.params.a, config_.params.b, config_.params.L,
                                config_.params.p);
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = ms.forcing(op_.grid.x[j], t);
  return f;
}

void Simulator::step(SimState& state) const {
  const double dt = config_.dt;
  const double alpha = config_.gains.alpha;
  const double beta = config_.gains.beta;
  const auto& kernel = config_.kernel;
  const bool nonlinear = !config_.linear_only;
  const std::size_t n = state.u.size();
  const double t = state.t;

  std::vector<double> nl_now;
  if (nonlinear) nl_now = nonlinear_term(state.u);

  std::vector<double> u_new;
  if (state.step_index < config_.startup_steps) {
    // Two backward-Euler half steps sharing the Crank–Nicolson matrix.
    std::vector<double> u = state.u;
    for (int half = 1; half <= 2; ++half) {
      const double th = t + 0.5 * dt * half;
      const double m = memory_integral(state.history, kernel, th);
      const std::vector<double> f = forcing(th);
      const std::vector<double> nl = !nonlinear ? std::vector<double>{}
                                     : half == 1 ? nl_now
                                                 : nonlinear_term(u);
      std::vector<double> rhs(n);
      for (std::size_t j = 0; j < n; ++j) {
        double r = beta * op_.g_F[j] * m + f[j];
        if (nonlinear) r -= nl[j];
        rhs[j] = u[j] + 0.5 * dt * r;
      }
      check_finite(rhs, state.step_index + 1, t + dt);
      u = solver_.solve(rhs);
    }
    u_new = std::move(u);
  } else {
    const double m = 0.5 * (memory_integral(state.history, kernel, t) +
                            memory_integral(state.history, kernel, t + dt));
    std::vector<double> mu = op_.A.multiply(state.u);
    const double w = alpha * trace_uxx0(op_, state.u);
    const std::vector<double> f0 = forcing(t);
    const std::vector<double> f1 = forcing(t + dt);
    std::vector<double> rhs(n);
    for (std::size_t j = 0; j < n; ++j) {
      double r = 0.5 * (mu[j] + op_.g_F[j] * w) + op_.g_F[j] * beta * m + 0.5 * (f0[j] + f1[j]);
      if (nonlinear) {
        const double ext = state.nonlinear_prev ? 1.5 * nl_now[j] - 0.5 * (*state.nonlinear_prev)[j]
                                                : nl_now[j];
        r -= ext;
      }
      rhs[j] = state.u[j] + dt * r;
    }
    check_finite(rhs, state.step_index + 1, t + dt);
    u_new = solver_.solve(rhs);
  }

  const long next = state.step_index + 1;
  const double t_next = static_cast<double>(next) * dt;
  check_finite(u_new, next, t_next);
  state.history.push(trace_uxx0(op_, u_new));
  state.u = std::move(u_new);
  state.t = t_next;
  state.step_index = next;
  if (nonlinear) state.nonlinear_prev = std::move(nl_now);
}

Simulator::Result Simulator::run() const {
  Result res{{}, initial_state()};
  const long steps = config_.step_count();
  if (steps == 0) return res;
  SimState& s = res.final_state;
  res.records.push_back(compute_record(s, config_, op_));
  for (long k = 1; k <= steps; ++k) {
    step(s);
    if (k % config_.record_every == 0 || k == steps) {
      res.records.push_back(compute_record(s, config_, op_));
    }
  }
  return res;
}

double mms_error_l2(const Simulator& sim, const SimState& state) {
  const auto& c = sim.config();
  const ManufacturedSolution ms(c.params.a, c.params.b, c.params.L, c.params.p);
  const Grid& g = sim.op().grid;
  double s = 0.0;
  for (std::size_t j = 0; j < state.u.size(); ++j) {
    const double e = state.u[j] - ms.value(g.x[j], state.t);
    s += e * e;
  }
  return std::sqrt(g.h * s);
}

double h_norm_squared(const SimState& state, const SimConfig& config) {
  const Grid g = make_grid(config.params.L, config.N);
  return mass_and_weighted_mass(state.u, g).l2 +
         std::abs(config.gains.beta) * z_energy(state.history, config.kernel, PlainWeight{});
}

DiagnosticsRecord compute_record(const SimState& state, const SimConfig& config,
                                 const SpatialOperator& op) {
  const auto& k = config.kernel;
  const auto& g = config.gains;
  const double ab = std::abs(g.beta);
  DiagnosticsRecord r;
  r.t = state.t;
  const Masses m = mass_and_weighted_mass(state.u, op.grid);
  r.l2 = m.l2;
  r.E1 = m.weighted;
  r.z_plain = z_energy(state.history, k, PlainWeight{});
  r.E = r.l2 + ab * r.z_plain;
  r.E2 = ab * z_energy(state.history, k, ExpWeight{g.delta});
  r.xi = r.E + g.mu1 * r.E1 + g.mu2 * r.E2;
  r.w0 = state.history.sample(0);
  r.memory = memory_integral(state.history, k);
  r.F = g.alpha * r.w0 + g.beta * r.memory;
  r.qform = assemble_P(g, k).quadratic_form(r.w0, r.memory);
  r.h2seminorm = h2_seminorm(op.grid, state.u);
  r.lambda_w2 = lag_integral(state.history, k, state.t, [](double) { return 1.0; }, 2);
  r.s_lambda_w2 = lag_integral(state.history, k, state.t, [](double s) { return s; }, 2);
  r.cs_gap = r.lambda_w2 - r.memory * r.memory / k.lambda_integral();
  r.penalty = r.F - trace_uxxL(op, state.u);
  // d‖u‖²/dt contribution of −b·D3: −2b·h·uᵀD3u.
  r.closure_loss = 2.0 * op.b * op.grid.h * dot(state.u, op.D3.multiply(state.u));
  return r;
}

}  // namespace kaw
