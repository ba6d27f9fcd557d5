// One line per acceptance criterion; exit status 1 if any criterion fails.
#include "kaw/cli.hpp"
#include "kaw/errors.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

using namespace kaw;
namespace fs = std::filesystem;

namespace {

const double pi = std::numbers::pi;

struct Ledger {
  int failed{0};
  // Sandwich results from every trajectory the other criteria produce.
  bool sandwich_ok{true};
  int sandwich_runs{0};
  double sandwich_worst{-1e300};

  void line(int id, const std::string& name, bool pass, const std::string& detail, double secs) {
    if (!pass) ++failed;
    std::printf("%s %d %s: %s [%.2f s]\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  void sandwich(const std::vector<DiagnosticsRecord>& r, const SimConfig& c) {
    const Check s = check_sandwich(r, c);
    sandwich_ok = sandwich_ok && s.pass;
    sandwich_worst = std::max(sandwich_worst, s.lhs - s.rhs);
    ++sandwich_runs;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

class Timer {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

private:
  std::chrono::steady_clock::time_point t0_{std::chrono::steady_clock::now()};
};

SimConfig reference() { return reference_config().to_sim(); }

void certificate_oracle(Ledger& led) {
  Timer t;
  Lcg rng(12345);
  double worst = 0.0;
  bool definite = true;
  for (int n = 0; n < 1000; ++n) {
    const double tau1 = rng.uniform(0.1, 2.0);
    const double tau2 = tau1 + rng.uniform(0.1, 2.0);
    const double c = rng.uniform(0.1, 2.0);
    KernelForm kf = ConstantForm{c};
    if (rng.uniform() < 0.5) kf = ExponentialForm{c, rng.uniform(-1.0, 1.0)};
    const MemoryKernel k(tau1, tau2, kf);
    const double budget = rng.uniform(0.05, 0.999);
    const double share = rng.uniform(0.01, 0.99);
    const FeedbackGains g{(rng.uniform() < 0.5 ? -1 : 1) * budget * share,
                          (rng.uniform() < 0.5 ? -1 : 1) * budget * (1 - share) /
                              k.lambda_integral(),
                          0.0, 0.0, 1.0};
    const Mat2 P = assemble_P(g, k);
    const double closed = closed_form_det_P(g, k);
    worst = std::max(worst, std::abs(P.det() - closed) / std::abs(closed));
    if (check_gain_condition(g, k).ok) definite = definite && is_negative_definite(P);
  }
  const double s = t.seconds();
  led.line(1, "certificate oracle", worst <= 1e-12 && definite && s < 1.0,
           fmt("max rel det error %.2e over 1000 draws, P negative definite: ", worst) +
               (definite ? "yes" : "no"),
           s);
}

double sine_consistency(int N) {
  const Grid g = make_grid(pi, N);
  const SpatialOperator op = build_operator({1.0, 1.0, pi, 1.0}, g);
  std::vector<double> u(g.x.size());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = std::sin(g.x[j]);
  const auto Au = op.A.multiply(u);
  double err = 0.0;
  for (int j = 4; j < N - 4; ++j) {
    err = std::max(err, std::abs(Au[static_cast<std::size_t>(j)] - std::cos(g.x[static_cast<std::size_t>(j)])));
  }
  return err;
}

void stencil(Ledger& led) {
  Timer t;
  const Grid g = make_grid(1.0, 127);
  const SpatialOperator op = build_operator({1.0, 1.0, 1.0, 1.0}, g);
  std::vector<double> u(g.x.size());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = std::pow(g.x[j], 5);
  const auto v = op.D5.multiply(u);
  bool exact = true;
  for (std::size_t j = 4; j + 4 < v.size(); ++j) {
    exact = exact && v[j] == 120.0 && centered_d5([](double x) { return x * x * x * x * x; }, g.x[j], g.h) == 120.0;
  }
  const double e1 = sine_consistency(64), e2 = sine_consistency(128), e3 = sine_consistency(256);
  const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
  const double s = t.seconds();
  const bool ok = exact && o1 >= 1.8 && o1 <= 2.2 && o2 >= 1.8 && o2 <= 2.2 && s < 5.0;
  led.line(2, "stencil exactness", ok,
           std::string("x^5 -> 120 exactly: ") + (exact ? "yes" : "no") +
               fmt(", orders %.3f %.3f", o1, o2),
           s);
}

void mms(Ledger& led) {
  Timer t;
  double e[3];
  int i = 0;
  for (int N : {64, 128, 256}) {
    SimConfig c = reference();
    c.mms = true;
    c.N = N;
    c.T_end = 1.0;
    const double h = pi / (N + 1);
    c.dt = 1.0 / std::ceil(1.0 / h);
    const Simulator sim(c);
    SimState st = sim.initial_state();
    for (long k = 0; k < c.step_count(); ++k) sim.step(st);
    e[i++] = mms_error_l2(sim, st);
  }
  const double o1 = std::log2(e[0] / e[1]), o2 = std::log2(e[1] / e[2]);
  const double s = t.seconds();
  led.line(3, "manufactured solution", o1 >= 1.8 && o1 <= 2.2 && o2 >= 1.8 && o2 <= 2.2 && s < 60.0,
           fmt("dt ~ h, errors %.3e %.3e %.3e", e[0], e[1], e[2]) + fmt(", orders %.3f %.3f", o1, o2),
           s);
}

void monotone(Ledger& led) {
  Timer t;
  SimConfig c = reference();
  c.linear_only = true;
  c.record_every = 1;
  const auto res = Simulator(c).run();
  led.sandwich(res.records, c);
  const Check m = check_monotone(res.records);
  const double s = t.seconds();
  led.line(4, "energy monotonicity", m.pass && s < 30.0,
           fmt("max of E(t_k+1) - E(t_k) - 1e-10 E(0) is %.3e over %.0f records", m.lhs - m.rhs,
               static_cast<double>(res.records.size())),
           s);
}

void decay(Ledger& led) {
  Timer t;
  const RunConfig rc = reference_config();
  const SimConfig c = rc.to_sim();
  const auto res = Simulator(c).run();
  led.sandwich(res.records, c);
  const Certificate cert = config_certificate(rc);
  const DecayFit fit = fit_decay(res.records, 5.0, 30.0);
  const double mu = cert.mu_guaranteed.value_or(std::nan(""));
  const double s = t.seconds();
  led.line(5, "guaranteed decay rate", cert.all_ok() && fit.rate >= mu && fit.r2 >= 0.98 && s < 60.0,
           fmt("rate %.5f >= mu %.4e, r2 %.6f", fit.rate, mu, fit.r2), s);
}

// Criterion 7: the plain identity, C frozen at dt and re-verified at dt/2.
struct IdentityRun {
  double identity_err{0.0};
  double balance_err{0.0};
  double scale{0.0};
  double dt{0.0};
  double h{0.0};
};

IdentityRun identity_run(double dt, Ledger& led) {
  SimConfig c = reference();
  c.linear_only = true;
  c.record_every = 1;
  c.dt = dt;
  const auto res = Simulator(c).run();
  led.sandwich(res.records, c);
  IdentityRun out{0.0, 0.0, 0.0, dt, c.params.L / (c.N + 1)};
  for (const auto& s : dissipation_samples(res.records, c, 20)) {
    out.identity_err = std::max(out.identity_err, std::abs(s.dE_dt - s.qform));
    out.balance_err = std::max(out.balance_err, std::abs(s.dE_dt - s.balance));
    out.scale = std::max(out.scale, std::abs(s.dE_dt));
  }
  return out;
}

void dissipation(Ledger& led) {
  Timer t;
  const IdentityRun cal = identity_run(0.01, led);
  const IdentityRun ver = identity_run(0.005, led);
  const double C = cal.identity_err / ((cal.dt + cal.h * cal.h) * cal.scale);
  const double bound = C * (ver.dt + ver.h * ver.h) * ver.scale;
  const bool halves = ver.identity_err <= 0.5 * cal.identity_err * (1 + 1e-9);
  const double s = t.seconds();
  led.line(7, "dissipation identity", halves && ver.identity_err <= bound,
           fmt("C = %.3e; error %.3e at dt, %.3e at dt/2", C, cal.identity_err, ver.identity_err) +
               fmt(" (bound %.3e, ratio %.3f)", bound, ver.identity_err / cal.identity_err),
           s);
  // Supplementary: the same samples against the full energy balance.
  const double rel = std::max(cal.balance_err / cal.scale, ver.balance_err / ver.scale);
  std::printf("%s 7b dissipation balance: max relative error %.3e (threshold 5e-2)\n",
              rel <= 0.05 ? "PASS" : "FAIL", rel);
  if (rel > 0.05) ++led.failed;
}

void apriori(Ledger& led) {
  Timer t;
  SimConfig c = reference();
  c.linear_only = true;
  c.record_every = 1;
  c.T_end = 5.0;
  Lcg rng(reference_config().seed);
  std::vector<std::uint64_t> seeds(20);
  for (auto& s : seeds) s = static_cast<std::uint64_t>(rng.uniform() * 0x1.0p53);
  std::vector<AprioriReport> reps(seeds.size());
  std::vector<Check> sandwiches(seeds.size());
  parallel_for(seeds.size(), 4, [&](std::size_t k) {
    const SimConfig ck = random_unit_data(c, seeds[k]);
    const auto res = Simulator(ck).run();
    reps[k] = check_apriori_estimates(res.records, ck);
    sandwiches[k] = check_sandwich(res.records, ck);
  });
  bool ok = true;
  double w3 = 0.0, w4 = 0.0;
  for (std::size_t k = 0; k < reps.size(); ++k) {
    ok = ok && !reps[k].skipped && reps[k].pass();
    w3 = std::max(w3, reps[k].est3.lhs / reps[k].est3.rhs * 1.05);
    w4 = std::max(w4, reps[k].est4.lhs / reps[k].est4.rhs * 1.05);
    led.sandwich_ok = led.sandwich_ok && sandwiches[k].pass;
    led.sandwich_worst = std::max(led.sandwich_worst, sandwiches[k].lhs - sandwiches[k].rhs);
    ++led.sandwich_runs;
  }
  led.line(8, "a priori inequalities", ok,
           fmt("20 random runs, max lhs/rhs est3 %.3f est4 %.3f", w3, w4), t.seconds());
}

void observability(Ledger& led) {
  Timer t;
  SimConfig c = reference();
  c.linear_only = true;
  c.T_end = 5.0;
  const auto a = estimate_observability(c, 20, 7, 4);
  c.N *= 2;
  const auto b = estimate_observability(c, 20, 7, 4);
  const double drift = std::abs(b.c_obs / a.c_obs - 1.0);
  led.line(9, "observability evidence", a.c_obs > 0.0 && b.c_obs > 0.0 && drift <= 0.2,
           fmt("min ratio %.6f at N = 128, %.6f at N = 256 (change %.2f%%)", a.c_obs, b.c_obs,
               100 * drift),
           t.seconds());
}

void spectral(Ledger& led) {
  Timer t;
  const auto res = spectral_lemma_test({1.0, 1.0, 1.0, 1.0}, {1.0, 2.0, pi}, 300, 50, 3);
  bool ok = res.size() == 3;
  std::string detail;
  for (const auto& r : res) {
    ok = ok && r.pass;
    detail += fmt("L = %.4f: %.4g > %.2g; ", r.L, r.residual, r.threshold);
  }
  const double s = t.seconds();
  led.line(10, "spectral lemma", ok && s < 120.0, detail.substr(0, detail.size() - 2), s);
}

void determinism(Ledger& led) {
  Timer t;
  const fs::path root = fs::temp_directory_path() / "kaw_acceptance";
  fs::remove_all(root);
  std::string csv[2];
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    CliOptions o;
    o.config_path = KAW_SOURCE_DIR "/configs/reference.json";
    o.out_dir = (root / std::to_string(k)).string();
    std::ostringstream out, err;
    codes[k] = cmd_run(o, out, err);
    std::ifstream in(root / std::to_string(k) / "series.csv", std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    csv[k] = s.str();
  }
  const bool ok = codes[0] == 0 && codes[1] == 0 && !csv[0].empty() && csv[0] == csv[1];
  led.line(11, "determinism", ok,
           fmt("series.csv %.0f bytes, identical: ", static_cast<double>(csv[0].size())) +
               (csv[0] == csv[1] ? "yes" : "no"),
           t.seconds());
}

}  // namespace

int main() {
  Ledger led;
  try {
    certificate_oracle(led);
    stencil(led);
    mms(led);
    monotone(led);
    decay(led);
    dissipation(led);
    apriori(led);
    led.line(6, "sandwich inequality", led.sandwich_ok,
             fmt("%.0f runs, max excess %.3e", led.sandwich_runs, led.sandwich_worst), 0.0);
    observability(led);
    spectral(led);
    determinism(led);
  } catch (const std::exception& e) {
    std::printf("FAIL aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", led.failed);
  return led.failed == 0 ? 0 : 1;
}
