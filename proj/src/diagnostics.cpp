#include "kaw/diagnostics.hpp"

#include "kaw/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

namespace kaw {

DecayFit fit_decay(const std::vector<DiagnosticsRecord>& records, double t_start, double t_end) {
  std::vector<double> ts, ys;
  for (const auto& r : records) {
    if (r.t < t_start || r.t > t_end) continue;
    if (!(r.E >= 1e-300)) continue;
    ts.push_back(r.t);
    ys.push_back(std::log(r.E));
  }
  if (ts.empty()) throw InvalidArgument("nothing to fit");
  if (ts.size() < 10) throw InvalidArgument("fewer than 10 records with E > 0 in the fit window");
  const auto n = static_cast<double>(ts.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    mt += ts[k];
    my += ys[k];
  }
  mt /= n;
  my /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    stt += (ts[k] - mt) * (ts[k] - mt);
    sty += (ts[k] - mt) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  DecayFit fit;
  fit.t_start = t_start;
  fit.t_end = t_end;
  fit.points = ts.size();
  const double slope = stt > 0.0 ? sty / stt : 0.0;
  fit.rate = -slope / 2.0;
  if (syy <= 1e-30 * std::max(1.0, my * my)) {
    fit.r2 = 1.0;
  } else {
    fit.r2 = std::clamp(sty * sty / (stt * syy), 0.0, 1.0);
  }
  const double e0 = records.front().E;
  fit.kappa_hat = 1.0;
  if (e0 > 0.0) {
    for (const auto& r : records) {
      if (r.t > t_end) break;
      fit.kappa_hat = std::max(fit.kappa_hat, r.E * std::exp(2.0 * fit.rate * r.t) / e0);
    }
  }
  return fit;
}

Check make_check(std::string name, double lhs, double rhs, std::string note) {
  Check c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = rhs - lhs;
  c.pass = lhs <= rhs;
  c.note = std::move(note);
  return c;
}

AprioriReport check_apriori_estimates(const std::vector<DiagnosticsRecord>& records,
                                      const SimConfig& config, double slack) {
  AprioriReport rep;
  if (!config.linear_only) {
    rep.skipped = true;
    rep.reason = "skipped (nonlinear)";
    return rep;
  }
  if (records.empty()) {
    rep.skipped = true;
    rep.reason = "skipped (empty trajectory)";
    return rep;
  }
  const auto& r0 = records.front();
  const auto& rT = records.back();
  const double T = rT.t - r0.t;
  const double int_w0 = integrate_records(records, [](const auto& r) { return r.w0 * r.w0; });
  const double int_slw = integrate_records(records, [](const auto& r) { return r.s_lambda_w2; });
  const double int_lw = integrate_records(records, [](const auto& r) { return r.lambda_w2; });
  const double int_l2 = integrate_records(records, [](const auto& r) { return r.l2; });
  rep.est1_constant = r0.E > 0.0 ? (int_w0 + int_slw) / r0.E : 0.0;

  const double rhs3 = rT.z_plain + int_lw;
  rep.est3 = make_check("est3", r0.z_plain, (1.0 + slack) * rhs3);
  rep.est3.note = "||z0||^2 <= ||z(T)||^2 + int int lambda z^2(t,1,s)";
  const double rhs4 = int_l2 + T * int_w0;
  rep.est4 = make_check("est4", T * r0.l2, (1.0 + slack) * rhs4);
  rep.est4.note = "T||u0||^2 <= ||u||^2_{L2L2} + T||u_xx(.,0)||^2_{L2(0,T)}";
  // Exact zero data: both sides vanish.
  if (r0.E == 0.0) rep.est3.pass = rep.est4.pass = true;
  return rep;
}

SimConfig random_unit_data(SimConfig config, std::uint64_t rng_seed) {
  Lcg rng(rng_seed);
  config.mms = false;
  config.u0 = U0Spec{};
  config.u0.kind = "random";
  config.u0.modes = 4;
  config.u0.seed = static_cast<std::uint64_t>(rng.uniform() * 0x1.0p53);
  config.z0 = Z0Spec{};
  config.z0.kind = "sinusoid";
  config.z0.amplitude = rng.uniform(0.2, 1.0);
  config.z0.omega = rng.uniform(0.5, 4.0);
  config.z0.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  config.normalization = Normalization{"norm", 1.0};
  return config;
}

double observability_ratio(const SimConfig& config) {
  SimConfig c = config;
  c.linear_only = true;
  c.record_every = 1;
  const Simulator sim(c);
  const auto res = sim.run();
  if (res.records.empty()) return 0.0;
  const auto& r0 = res.records.front();
  const double lhs = r0.l2 + r0.z_plain;
  if (!(lhs > 0.0)) throw InvalidArgument("observability needs nonzero initial data");
  const double rhs = integrate_records(res.records,
                                       [](const auto& r) { return r.w0 * r.w0 + r.s_lambda_w2; });
  return rhs / lhs;
}

ObservabilityResult estimate_observability(const SimConfig& config, int n_samples,
                                           std::uint64_t seed, int workers) {
  if (n_samples < 1) throw InvalidArgument("n_samples must be >= 1");
  if (config.T_end < config.kernel.tau2()) {
    throw InvalidArgument("observability horizon must be >= tau2");
  }
  ObservabilityResult out;
  out.samples.resize(static_cast<std::size_t>(n_samples));
  Lcg rng(seed);
  for (auto& s : out.samples) s.seed = static_cast<std::uint64_t>(rng.uniform() * 0x1.0p53);
  parallel_for(out.samples.size(), workers, [&](std::size_t k) {
    out.samples[k].ratio = observability_ratio(random_unit_data(config, out.samples[k].seed));
  });
  out.c_obs = std::numeric_limits<double>::infinity();
  for (const auto& s : out.samples) out.c_obs = std::min(out.c_obs, s.ratio);
  return out;
}

double spectral_residual(const PhysicalParams& params, int N, int n_eigs, double* lambda_re,
                         double* lambda_im) {
  const SpatialOperator op = build_operator(params, make_grid(params.L, N));
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = std::max(0, i - 3); j <= std::min(N - 1, i + 3); ++j) {
      A(i, j) = op.A(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, true);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
  const Eigen::VectorXcd ev = es.eigenvalues();
  const Eigen::MatrixXcd V = es.eigenvectors();
  std::vector<int> idx(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int x, int y) { return std::abs(ev(x)) < std::abs(ev(y)); });
  const int take = std::min(n_eigs, N);
  double best = std::numeric_limits<double>::infinity();
  for (int q = 0; q < take; ++q) {
    const int i = idx[static_cast<std::size_t>(q)];
    const Eigen::VectorXcd v = V.col(i);
    const double nrm = std::sqrt(op.grid.h * v.squaredNorm());
    std::complex<double> tr = 0.0;
    for (int j = 0; j < N; ++j) tr += op.trace0[static_cast<std::size_t>(j)] * v(j);
    const double r = std::abs(tr) / nrm;
    if (r < best) {
      best = r;
      if (lambda_re) *lambda_re = ev(i).real();
      if (lambda_im) *lambda_im = ev(i).imag();
    }
  }
  return best;
}

std::vector<SpectralResult> spectral_lemma_test(const PhysicalParams& params,
                                                const std::vector<double>& L_values, int N,
                                                int n_eigs, int workers) {
  if (N < 100) throw InvalidArgument("spectral test needs N >= 100");
  std::vector<SpectralResult> out(L_values.size());
  parallel_for(L_values.size(), workers, [&](std::size_t k) {
    SpectralResult& r = out[k];
    r.L = L_values[k];
    r.N = N;
    try {
      PhysicalParams p = params;
      p.L = r.L;
      r.residual = spectral_residual(p, N, n_eigs, &r.lambda_re, &r.lambda_im);
      r.residual_coarse = spectral_residual(p, N / 2, n_eigs);
      r.threshold = 10.0 * std::abs(r.residual - r.residual_coarse) +
                    1e3 * std::numeric_limits<double>::epsilon() * r.residual;
      r.pass = r.residual > r.threshold;
    } catch (const std::exception& e) {
      r.error = e.what();
      r.pass = false;
    }
  });
  return out;
}

Check check_sandwich(const std::vector<DiagnosticsRecord>& records, const SimConfig& config) {
  const double c = 1.0 + std::max(config.params.L * config.gains.mu1, config.gains.mu2);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    const double slack = 1e-12 * (1.0 + r.E);
    worst = std::max(worst, r.E - r.xi - slack);
    worst = std::max(worst, r.xi - c * r.E - slack);
  }
  if (records.empty()) worst = 0.0;
  Check ch = make_check("sandwich", worst, 0.0, "max violation of E <= xi <= (1+max(L mu1, mu2)) E");
  return ch;
}

Check check_monotone(const std::vector<DiagnosticsRecord>& records, double tol) {
  double worst = 0.0;
  if (records.size() >= 2) {
    worst = -std::numeric_limits<double>::infinity();
    const double e0 = records.front().E;
    for (std::size_t k = 1; k < records.size(); ++k) {
      worst = std::max(worst, (records[k].E - records[k - 1].E) / (e0 > 0.0 ? e0 : 1.0));
    }
  }
  return make_check("monotone", worst, tol, "max relative increase of E between records");
}

Check check_lyapunov(const std::vector<DiagnosticsRecord>& records, double mu) {
  double worst = 0.0;
  if (records.size() >= 2) {
    worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < records.size(); ++k) {
      const double dt = records[k].t - records[k - 1].t;
      const double bound = records[k - 1].xi * std::exp(-2.0 * mu * dt) * (1.0 + 1e-6);
      const double base = records[k - 1].xi > 0.0 ? records[k - 1].xi : 1.0;
      worst = std::max(worst, (records[k].xi - bound) / base);
    }
  }
  return make_check("lyapunov", worst, 0.0, "max relative excess of xi over xi e^{-2 mu dt}");
}

std::vector<DissipationSample> dissipation_samples(const std::vector<DiagnosticsRecord>& records,
                                                   const SimConfig& config, int count) {
  std::vector<DissipationSample> out;
  if (records.size() < 2 || count < 1) return out;
  const double ab = std::abs(config.gains.beta);
  auto balance = [&](const DiagnosticsRecord& r) {
    return r.qform - ab * r.cs_gap - r.penalty * r.penalty - r.closure_loss;
  };
  const std::size_t steps = records.size() - 1;
  for (int q = 0; q < count; ++q) {
    const std::size_t k = std::min(steps - 1, (steps * static_cast<std::size_t>(q + 1)) /
                                                  static_cast<std::size_t>(count + 1));
    const auto& a = records[k];
    const auto& b = records[k + 1];
    DissipationSample s;
    s.t = 0.5 * (a.t + b.t);
    s.dE_dt = (b.E - a.E) / (b.t - a.t);
    s.qform = 0.5 * (a.qform + b.qform);
    s.balance = 0.5 * (balance(a) + balance(b));
    out.push_back(s);
  }
  return out;
}

void parallel_for(std::size_t tasks, int workers, const std::function<void(std::size_t)>& body) {
  const std::size_t nthreads =
      std::min<std::size_t>(tasks, static_cast<std::size_t>(std::max(1, workers)));
  if (nthreads <= 1) {
    for (std::size_t k = 0; k < tasks; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < nthreads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < tasks; k = next++) {
        try {
          body(k);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace kaw
