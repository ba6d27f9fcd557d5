#include "kaw/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

namespace kaw {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << content;
  f.flush();
  if (!f) throw IoError("write failed: " + path.string());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

int resolve_workers(int flag) {
  if (const char* env = std::getenv("KAW_WORKERS")) {
    int v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [p, ec] = std::from_chars(env, end, v);
    if (ec == std::errc() && p == end && v > 0) return v;
  }
  if (flag > 0) return flag;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_series_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records) {
  os << "t,E,E1,E2,xi,w0,F,qform,l2,h2seminorm\n";
  for (const auto& r : records) {
    const double row[] = {r.t, r.E, r.E1, r.E2, r.xi, r.w0, r.F, r.qform, r.l2, r.h2seminorm};
    for (std::size_t k = 0; k < std::size(row); ++k) {
      if (k) os << ',';
      os << format_double(row[k]);
    }
    os << '\n';
  }
}

Certificate config_certificate(const RunConfig& config) {
  const SimConfig sc = config.to_sim();
  double radius = 0.0;
  try {
    const Simulator sim(sc);
    radius = std::sqrt(h_norm_squared(sim.initial_state(), sc));
  } catch (const CertificateError&) {
    // radius_fraction needs r_max; the length failure is reported by the certificate.
  }
  return make_certificate(sc.params, sc.gains, sc.kernel, radius);
}

json certificate_json(const Certificate& c) {
  auto mat = [](const Mat2& m) { return json::array({{m.a11, m.a12}, {m.a21, m.a22}}); };
  json j;
  j["gain_condition_value"] = c.gain_condition_value;
  j["gain_condition_ok"] = c.gain_condition_ok;
  j["critical_length"] = c.critical_length;
  j["length_ok"] = c.length_ok;
  j["P"] = mat(c.P);
  j["P_star"] = mat(c.P_star);
  j["T"] = mat(c.T);
  j["detP"] = c.detP;
  j["trP"] = c.trP;
  j["detT"] = c.detT;
  j["trT"] = c.trT;
  j["T_negative_definite"] = c.T_negative_definite;
  j["r_max"] = c.r_max ? json(*c.r_max) : json(nullptr);
  j["data_radius"] = c.data_radius;
  j["mu_guaranteed"] = c.mu_guaranteed ? json(*c.mu_guaranteed) : json(nullptr);
  if (!c.mu_failure.empty()) j["mu_failure"] = c.mu_failure;
  j["failed"] = c.failures();
  j["pass"] = c.all_ok();
  return j;
}

json check_json(const Check& c) {
  json j{{"check_name", c.name}, {"lhs", num(c.lhs)}, {"rhs", num(c.rhs)},
         {"margin", num(c.margin)}, {"pass", c.pass}};
  if (c.informational) j["informational"] = true;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

DecayFit fit_run(const std::vector<DiagnosticsRecord>& records, const RunConfig& config) {
  const double t_end = config.numerics.T_end;
  const double t_start = t_end > config.numerics.fit_start ? config.numerics.fit_start : 0.0;
  return fit_decay(records, t_start, t_end);
}

int cmd_check(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(opts.config_path);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const Certificate cert = config_certificate(cfg);
  const json j = certificate_json(cert);
  out << j.dump(2) << '\n';
  if (opts.out_dir != ".") {
    try {
      write_file(prepare_out(opts.out_dir) / "certificate.json", j.dump(2) + "\n");
    } catch (const IoError& e) {
      err << "i/o error: " << e.what() << '\n';
      return kExitIo;
    }
  }
  if (!cert.all_ok()) {
    for (const auto& f : cert.failures()) err << "certificate failed: " << f << '\n';
    return kExitCertificate;
  }
  return kExitOk;
}

int cmd_run(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(opts.config_path);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  fs::path dir;
  try {
    dir = prepare_out(opts.out_dir);
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }

  const Certificate cert = config_certificate(cfg);
  const SimConfig sc = cfg.to_sim();
  std::optional<Simulator> sim;
  try {
    sim.emplace(sc);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  Simulator::Result res{{}, sim->initial_state()};
  json report;
  report["certificate"] = certificate_json(cert);
  report["mu_guaranteed"] = cert.mu_guaranteed ? json(*cert.mu_guaranteed) : json(nullptr);
  int code = kExitOk;
  try {
    res = sim->run();
    if (sc.mms) report["mms_error"] = mms_error_l2(*sim, res.final_state);
  } catch (const SolverError& e) {
    err << "solver aborted at step " << e.step() << " (t = " << e.time() << "): " << e.what()
        << '\n';
    report["abort"] = {{"step", e.step()}, {"t", e.time()}, {"message", e.what()}};
    code = kExitSolver;
  }

  report["steps"] = sc.step_count();
  report["records"] = res.records.size();
  try {
    const DecayFit fit = fit_run(res.records, cfg);
    report["fit"] = {{"t_start", fit.t_start}, {"t_end", fit.t_end}, {"rate", num(fit.rate)},
                     {"r2", num(fit.r2)},      {"kappa_hat", num(fit.kappa_hat)},
                     {"points", fit.points}};
    report["rate"] = num(fit.rate);
  } catch (const InvalidArgument& e) {
    report["fit"] = {{"error", e.what()}};
    report["rate"] = nullptr;
  }
  json checks = json::array();
  checks.push_back(check_json(check_sandwich(res.records, sc)));
  Check mono = check_monotone(res.records);
  mono.informational = !sc.linear_only;
  checks.push_back(check_json(mono));
  if (cert.mu_guaranteed) {
    Check ly = check_lyapunov(res.records, *cert.mu_guaranteed);
    ly.informational = true;
    checks.push_back(check_json(ly));
  }
  report["checks"] = checks;
  report["config"] = to_json(cfg);

  try {
    std::ostringstream csv;
    write_series_csv(csv, res.records);
    write_file(dir / cfg.outputs.csv, csv.str());
    write_file(dir / cfg.outputs.report, report.dump(2) + "\n");
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  out << "wrote " << (dir / cfg.outputs.csv).string() << " (" << res.records.size()
      << " records)\n";
  return code;
}

namespace {

struct SweepRow {
  double value{0.0};
  std::string status{"ok"};
  std::string message;
  bool certified{false};
  double gain_value{std::numeric_limits<double>::quiet_NaN()};
  bool gain_ok{false};
  bool length_ok{false};
  bool T_ok{false};
  double r_max{std::numeric_limits<double>::quiet_NaN()};
  double mu{std::numeric_limits<double>::quiet_NaN()};
  double rate{std::numeric_limits<double>::quiet_NaN()};
  double r2{std::numeric_limits<double>::quiet_NaN()};
  double mms_error{std::numeric_limits<double>::quiet_NaN()};
};

std::string opt_num(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

}  // namespace

int cmd_sweep(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(opts.config_path);
    check_axis(cfg, opts.axis);
    if (opts.values.empty()) throw ConfigError("--values must list at least one value");
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  fs::path dir;
  try {
    dir = prepare_out(opts.out_dir);
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }

  std::vector<double> values = opts.values;
  std::stable_sort(values.begin(), values.end());
  std::vector<SweepRow> rows(values.size());
  parallel_for(values.size(), resolve_workers(opts.workers), [&](std::size_t k) {
    SweepRow& row = rows[k];
    row.value = values[k];
    try {
      const RunConfig c = with_axis_value(cfg, opts.axis, values[k]);
      const Certificate cert = config_certificate(c);
      row.certified = cert.all_ok();
      row.gain_value = cert.gain_condition_value;
      row.gain_ok = cert.gain_condition_ok;
      row.length_ok = cert.length_ok;
      row.T_ok = cert.T_negative_definite;
      if (cert.r_max) row.r_max = *cert.r_max;
      if (cert.mu_guaranteed) row.mu = *cert.mu_guaranteed;
      const Simulator sim(c.to_sim());
      const auto res = sim.run();
      if (c.numerics.mms) row.mms_error = mms_error_l2(sim, res.final_state);
      try {
        const DecayFit fit = fit_run(res.records, c);
        row.rate = fit.rate;
        row.r2 = fit.r2;
      } catch (const InvalidArgument& e) {
        row.message = e.what();
      }
    } catch (const std::exception& e) {
      row.status = "aborted";
      row.message = e.what();
    }
  });

  std::ostringstream csv;
  csv << "value,status,certified,gain_condition_value,gain_condition_ok,length_ok,"
         "T_negative_definite,r_max,mu_guaranteed,rate,r2,mms_error,message\n";
  int ok = 0;
  for (const auto& r : rows) {
    if (r.status == "ok") ++ok;
    csv << format_double(r.value) << ',' << r.status << ',' << (r.certified ? "true" : "false")
        << ',' << opt_num(r.gain_value) << ',' << (r.gain_ok ? "true" : "false") << ','
        << (r.length_ok ? "true" : "false") << ',' << (r.T_ok ? "true" : "false") << ','
        << opt_num(r.r_max) << ',' << opt_num(r.mu) << ',' << opt_num(r.rate) << ','
        << opt_num(r.r2) << ',' << opt_num(r.mms_error) << ',' << csv_field(r.message) << '\n';
  }
  try {
    write_file(dir / "sweep.csv", csv.str());
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  out << "wrote " << (dir / "sweep.csv").string() << " (" << ok << "/" << rows.size()
      << " runs completed)\n";
  return ok > 0 ? kExitOk : kExitSolver;
}

bool VerifyReport::pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.informational || c.pass; });
}

VerifyReport run_verification(const RunConfig& config, int workers) {
  VerifyReport rep;
  const SimConfig base = config.to_sim();

  const Certificate cert = config_certificate(config);
  rep.details["certificate"] = certificate_json(cert);
  {
    Check g = make_check("gain_condition", cert.gain_condition_value, 1.0);
    g.pass = cert.gain_condition_ok;
    rep.checks.push_back(g);
    Check l = make_check("length_condition", config.model.L, cert.critical_length);
    l.pass = cert.length_ok;
    rep.checks.push_back(l);
    Check t = make_check("T_negative_definite", cert.trT, 0.0, "trace of T; det must be > 0");
    t.pass = cert.T_negative_definite;
    rep.checks.push_back(t);
    Check m = make_check("mu_guaranteed_positive", 0.0, cert.mu_guaranteed.value_or(0.0));
    m.pass = cert.mu_guaranteed && *cert.mu_guaranteed > 0.0;
    rep.checks.push_back(m);
  }
  const bool certified = cert.all_ok();

  // Linear trajectory of the configured data, every step recorded.
  {
    SimConfig c = base;
    c.linear_only = true;
    c.record_every = 1;
    const auto res = Simulator(c).run();
    Check mono = check_monotone(res.records);
    mono.name = "linear_monotone";
    mono.informational = !certified;
    rep.checks.push_back(mono);
    Check sw = check_sandwich(res.records, c);
    sw.name = "linear_sandwich";
    rep.checks.push_back(sw);
    const AprioriReport ap = check_apriori_estimates(res.records, c);
    rep.checks.push_back(ap.est3);
    rep.checks.push_back(ap.est4);
    rep.details["est1_constant"] = ap.est1_constant;

    const auto samples = dissipation_samples(res.records, c, 20);
    double worst_identity = 0.0, worst_balance = 0.0, scale = 0.0;
    for (const auto& s : samples) {
      worst_identity = std::max(worst_identity, std::abs(s.dE_dt - s.qform));
      worst_balance = std::max(worst_balance, std::abs(s.dE_dt - s.balance));
      scale = std::max(scale, std::abs(s.dE_dt));
    }
    const double h = c.params.L / (c.N + 1);
    Check id = make_check("dissipation_identity", worst_identity, (c.dt + h * h) * scale,
                          "|dE/dt - <PV,V>| against (dt + h^2) max|dE/dt|");
    id.informational = true;
    rep.checks.push_back(id);
    Check bal = make_check("dissipation_balance", worst_balance, 0.05 * scale,
                           "|dE/dt - (<PV,V> - |beta| CS gap - penalty^2 - closure)|");
    rep.checks.push_back(bal);
  }

  if (!base.linear_only) {
    const auto res = Simulator(base).run();
    Check sw = check_sandwich(res.records, base);
    sw.name = "nonlinear_sandwich";
    rep.checks.push_back(sw);
    if (cert.mu_guaranteed) {
      Check ly = check_lyapunov(res.records, *cert.mu_guaranteed);
      ly.informational = !certified;
      rep.checks.push_back(ly);
      try {
        const DecayFit fit = fit_run(res.records, config);
        Check rate = make_check("decay_rate", *cert.mu_guaranteed, fit.rate);
        rate.pass = fit.rate >= *cert.mu_guaranteed && fit.r2 >= 0.98;
        rate.informational = !certified;
        rate.note = "r2 = " + format_double(fit.r2);
        rep.checks.push_back(rate);
        rep.details["fit"] = {{"rate", fit.rate}, {"r2", fit.r2}, {"kappa_hat", fit.kappa_hat}};
      } catch (const InvalidArgument& e) {
        Check rate = make_check("decay_rate", 0.0, 0.0, e.what());
        rate.pass = false;
        rep.checks.push_back(rate);
      }
    }
  } else {
    Check skip = make_check("nonlinear_suite", 0.0, 0.0, "skipped (linear_only)");
    skip.informational = true;
    rep.checks.push_back(skip);
  }

  // Seeded random linear runs for the a priori inequalities.
  {
    SimConfig c = base;
    c.linear_only = true;
    c.record_every = 1;
    c.T_end = config.verify.horizon;
    const auto n = static_cast<std::size_t>(config.verify.random_runs);
    std::vector<AprioriReport> reps(n);
    std::vector<std::uint64_t> seeds(n);
    Lcg rng(config.seed);
    for (auto& s : seeds) s = static_cast<std::uint64_t>(rng.uniform() * 0x1.0p53);
    parallel_for(n, workers, [&](std::size_t k) {
      const SimConfig ck = random_unit_data(c, seeds[k]);
      reps[k] = check_apriori_estimates(Simulator(ck).run().records, ck);
    });
    double w3 = -std::numeric_limits<double>::infinity(), w4 = w3;
    double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
    bool p3 = true, p4 = true;
    for (const auto& r : reps) {
      w3 = std::max(w3, r.est3.lhs / r.est3.rhs);
      w4 = std::max(w4, r.est4.lhs / r.est4.rhs);
      p3 = p3 && r.est3.pass;
      p4 = p4 && r.est4.pass;
      cmin = std::min(cmin, r.est1_constant);
      cmax = std::max(cmax, r.est1_constant);
    }
    Check c3 = make_check("random_est3", w3, 1.0, "max lhs/((1+slack) rhs) over random runs");
    c3.pass = p3;
    Check c4 = make_check("random_est4", w4, 1.0, "max lhs/((1+slack) rhs) over random runs");
    c4.pass = p4;
    rep.checks.push_back(c3);
    rep.checks.push_back(c4);
    rep.details["est1_constant_range"] = {cmin, cmax};
  }

  {
    SimConfig c = base;
    c.linear_only = true;
    c.T_end = config.verify.horizon;
    const ObservabilityResult obs =
        estimate_observability(c, config.verify.samples, config.seed + 1, workers);
    Check oc = make_check("observability", 0.0, obs.c_obs, "c_obs > 0 is evidence, not proof");
    oc.pass = obs.c_obs > 0.0;
    rep.checks.push_back(oc);
    json samples = json::array();
    for (const auto& s : obs.samples) samples.push_back({{"seed", s.seed}, {"ratio", s.ratio}});
    rep.details["observability"] = {{"c_obs", obs.c_obs}, {"samples", samples}};
  }

  {
    PhysicalParams p = config.model;
    p.a = 1.0;
    p.b = 1.0;
    const auto spec = spectral_lemma_test(p, {config.model.L}, config.verify.spectral_N, 50, workers);
    for (const auto& s : spec) {
      Check sc = make_check("spectral_lemma", s.threshold, s.residual,
                            s.error.empty() ? "a = b = 1" : s.error);
      sc.pass = s.pass;
      rep.checks.push_back(sc);
      rep.details["spectral"] = {{"L", s.L},
                                 {"N", s.N},
                                 {"residual", s.residual},
                                 {"residual_coarse", s.residual_coarse},
                                 {"threshold", s.threshold}};
    }
  }
  return rep;
}

int cmd_verify(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(opts.config_path);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  fs::path dir;
  try {
    dir = prepare_out(opts.out_dir);
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  VerifyReport rep;
  try {
    rep = run_verification(cfg, resolve_workers(opts.workers));
  } catch (const SolverError& e) {
    err << "solver aborted at step " << e.step() << ": " << e.what() << '\n';
    return kExitSolver;
  }
  json j;
  j["checks"] = json::array();
  for (const auto& c : rep.checks) {
    j["checks"].push_back(check_json(c));
    out << (c.pass ? "PASS " : (c.informational ? "INFO " : "FAIL ")) << c.name << '\n';
  }
  j["details"] = rep.details;
  j["pass"] = rep.pass();
  try {
    write_file(dir / cfg.outputs.report, j.dump(2) + "\n");
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  return rep.pass() ? kExitOk : kExitCertificate;
}

}  // namespace kaw
