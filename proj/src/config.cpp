#include "kaw/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace kaw {

using nlohmann::json;

bool operator==(const PhysicalParams& x, const PhysicalParams& y) {
  return x.a == y.a && x.b == y.b && x.L == y.L && x.p == y.p;
}
bool operator==(const FeedbackGains& x, const FeedbackGains& y) {
  return x.alpha == y.alpha && x.beta == y.beta && x.mu1 == y.mu1 && x.mu2 == y.mu2 &&
         x.delta == y.delta;
}
bool operator==(const RunConfig& x, const RunConfig& y) {
  return x.model == y.model && x.gains == y.gains && x.kernel == y.kernel &&
         x.numerics == y.numerics && x.u0 == y.u0 && x.z0 == y.z0 && x.normalize == y.normalize &&
         x.outputs == y.outputs && x.verify == y.verify && x.seed == y.seed;
}

MemoryKernel KernelSpec::build() const {
  if (form == "constant") return MemoryKernel(tau1, tau2, ConstantForm{c});
  if (form == "exponential") return MemoryKernel(tau1, tau2, ExponentialForm{c, sigma});
  if (form == "tabulated") return MemoryKernel(tau1, tau2, TabulatedForm{s, values});
  throw ConfigError("kernel.form must be constant|exponential|tabulated");
}

SimConfig RunConfig::to_sim() const {
  SimConfig s;
  s.params = model;
  s.gains = gains;
  s.kernel = kernel.build();
  s.N = numerics.N;
  s.dt = numerics.dt;
  s.T_end = numerics.T_end;
  s.record_every = numerics.record_every;
  s.linear_only = numerics.linear_only;
  s.mms = numerics.mms;
  s.startup_steps = numerics.startup_steps;
  s.u0 = u0;
  s.z0 = z0;
  s.normalization = normalize;
  return s;
}

void RunConfig::validate() const {
  try {
    to_sim().validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (verify.samples < 1) throw ConfigError("verify.samples must be >= 1");
  if (verify.random_runs < 1) throw ConfigError("verify.random_runs must be >= 1");
  if (!(verify.horizon > 0.0)) throw ConfigError("verify.horizon must be > 0");
  if (verify.spectral_N < 100) throw ConfigError("verify.spectral_N must be >= 100");
  if (outputs.csv.empty() || outputs.report.empty()) throw ConfigError("outputs paths must be non-empty");
}

namespace {

class Reader {
public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  double number(const std::string& key, double def, bool allow_pi = false) {
    const json* v = find(key);
    if (!v) return def;
    if (allow_pi && v->is_string() && v->get<std::string>() == "pi") return std::numbers::pi;
    if (!v->is_number()) throw ConfigError(field(key) + ": expected a number");
    return v->get<double>();
  }

  int integer(const std::string& key, int def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
    return v->get<int>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_number_unsigned()) throw ConfigError(field(key) + ": expected a non-negative integer");
    return v->get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_boolean()) throw ConfigError(field(key) + ": expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_string()) throw ConfigError(field(key) + ": expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = find(key);
    if (!v) return {};
    if (!v->is_array()) throw ConfigError(field(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) throw ConfigError(field(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Reader child(const std::string& key) {
    const json* v = find(key);
    static const json empty = json::object();
    return Reader(v ? *v : empty, field(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown key");
    }
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  Reader root(j, "");
  {
    Reader m = root.child("model");
    c.model.a = m.number("a", c.model.a);
    c.model.b = m.number("b", c.model.b);
    c.model.L = m.number("L", c.model.L, true);
    c.model.p = m.number("p", c.model.p);
    m.finish();
  }
  {
    Reader g = root.child("gains");
    c.gains.alpha = g.number("alpha", c.gains.alpha);
    c.gains.beta = g.number("beta", c.gains.beta);
    c.gains.mu1 = g.number("mu1", c.gains.mu1);
    c.gains.mu2 = g.number("mu2", c.gains.mu2);
    c.gains.delta = g.number("delta", c.gains.delta);
    g.finish();
  }
  {
    Reader k = root.child("kernel");
    c.kernel.form = k.string("form", c.kernel.form);
    c.kernel.tau1 = k.number("tau1", c.kernel.tau1);
    c.kernel.tau2 = k.number("tau2", c.kernel.tau2);
    Reader p = k.child("params");
    if (c.kernel.form == "constant") {
      c.kernel.c = p.number("c", c.kernel.c);
    } else if (c.kernel.form == "exponential") {
      c.kernel.c = p.number("c", c.kernel.c);
      c.kernel.sigma = p.number("sigma", c.kernel.sigma);
    } else if (c.kernel.form == "tabulated") {
      c.kernel.s = p.numbers("s");
      c.kernel.values = p.numbers("values");
    } else {
      throw ConfigError("kernel.form: expected constant|exponential|tabulated");
    }
    p.finish();
    k.finish();
  }
  {
    Reader n = root.child("numerics");
    c.numerics.N = n.integer("N", c.numerics.N);
    c.numerics.dt = n.number("dt", c.numerics.dt);
    c.numerics.T_end = n.number("T_end", c.numerics.T_end);
    c.numerics.record_every = n.integer("record_every", c.numerics.record_every);
    c.numerics.linear_only = n.boolean("linear_only", c.numerics.linear_only);
    c.numerics.mms = n.boolean("mms", c.numerics.mms);
    c.numerics.startup_steps = n.integer("startup_steps", c.numerics.startup_steps);
    c.numerics.fit_start = n.number("fit_start", c.numerics.fit_start);
    n.finish();
  }
  {
    Reader in = root.child("initial");
    Reader u = in.child("u0");
    c.u0.kind = u.string("kind", c.u0.kind);
    c.u0.amplitude = u.number("amplitude", c.u0.amplitude);
    c.u0.mode = u.integer("mode", c.u0.mode);
    c.u0.x = u.numbers("x");
    c.u0.values = u.numbers("values");
    c.u0.seed = u.unsigned_integer("seed", c.u0.seed);
    c.u0.modes = u.integer("modes", c.u0.modes);
    u.finish();
    Reader z = in.child("z0");
    c.z0.kind = z.string("kind", c.z0.kind);
    c.z0.value = z.number("value", c.z0.value);
    c.z0.amplitude = z.number("amplitude", c.z0.amplitude);
    c.z0.omega = z.number("omega", c.z0.omega);
    c.z0.phase = z.number("phase", c.z0.phase);
    c.z0.t = z.numbers("t");
    c.z0.values = z.numbers("values");
    z.finish();
    Reader nz = in.child("normalize");
    c.normalize.kind = nz.string("kind", c.normalize.kind);
    c.normalize.value = nz.number("value", c.normalize.value);
    nz.finish();
    in.finish();
  }
  {
    Reader o = root.child("outputs");
    c.outputs.csv = o.string("csv", c.outputs.csv);
    c.outputs.report = o.string("report", c.outputs.report);
    o.finish();
  }
  {
    Reader v = root.child("verify");
    c.verify.samples = v.integer("samples", c.verify.samples);
    c.verify.random_runs = v.integer("random_runs", c.verify.random_runs);
    c.verify.horizon = v.number("horizon", c.verify.horizon);
    c.verify.spectral_N = v.integer("spectral_N", c.verify.spectral_N);
    v.finish();
  }
  c.seed = root.unsigned_integer("seed", c.seed);
  root.finish();
  c.validate();
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line:column.
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "line " << line << ", column " << col << ": malformed JSON (" << e.what() << ")";
    throw ConfigError(os.str());
  }
  return parse_config(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json to_json(const RunConfig& c) {
  json j;
  j["model"] = {{"a", c.model.a}, {"b", c.model.b}, {"L", c.model.L}, {"p", c.model.p}};
  j["gains"] = {{"alpha", c.gains.alpha},
                {"beta", c.gains.beta},
                {"mu1", c.gains.mu1},
                {"mu2", c.gains.mu2},
                {"delta", c.gains.delta}};
  json params;
  if (c.kernel.form == "constant") {
    params = {{"c", c.kernel.c}};
  } else if (c.kernel.form == "exponential") {
    params = {{"c", c.kernel.c}, {"sigma", c.kernel.sigma}};
  } else {
    params = {{"s", c.kernel.s}, {"values", c.kernel.values}};
  }
  j["kernel"] = {{"form", c.kernel.form},
                 {"tau1", c.kernel.tau1},
                 {"tau2", c.kernel.tau2},
                 {"params", params}};
  j["numerics"] = {{"N", c.numerics.N},
                   {"dt", c.numerics.dt},
                   {"T_end", c.numerics.T_end},
                   {"record_every", c.numerics.record_every},
                   {"linear_only", c.numerics.linear_only},
                   {"mms", c.numerics.mms},
                   {"startup_steps", c.numerics.startup_steps},
                   {"fit_start", c.numerics.fit_start}};
  j["initial"] = {
      {"u0",
       {{"kind", c.u0.kind},
        {"amplitude", c.u0.amplitude},
        {"mode", c.u0.mode},
        {"x", c.u0.x},
        {"values", c.u0.values},
        {"seed", c.u0.seed},
        {"modes", c.u0.modes}}},
      {"z0",
       {{"kind", c.z0.kind},
        {"value", c.z0.value},
        {"amplitude", c.z0.amplitude},
        {"omega", c.z0.omega},
        {"phase", c.z0.phase},
        {"t", c.z0.t},
        {"values", c.z0.values}}},
      {"normalize", {{"kind", c.normalize.kind}, {"value", c.normalize.value}}}};
  j["outputs"] = {{"csv", c.outputs.csv}, {"report", c.outputs.report}};
  j["verify"] = {{"samples", c.verify.samples},
                 {"random_runs", c.verify.random_runs},
                 {"horizon", c.verify.horizon},
                 {"spectral_N", c.verify.spectral_N}};
  j["seed"] = c.seed;
  return j;
}

namespace {

json::json_pointer axis_pointer(const json& j, const std::string& axis) {
  std::string pointer = "/" + axis;
  for (char& ch : pointer) {
    if (ch == '.') ch = '/';
  }
  if (axis.empty()) throw ConfigError("sweep axis is empty");
  try {
    const json::json_pointer ptr(pointer);
    if (j.contains(ptr) && j.at(ptr).is_number()) return ptr;
  } catch (const json::exception&) {
  }
  throw ConfigError("sweep axis '" + axis + "' does not name a scalar config field");
}

}  // namespace

void check_axis(const RunConfig& config, const std::string& axis) {
  axis_pointer(to_json(config), axis);
}

RunConfig with_axis_value(const RunConfig& config, const std::string& axis, double value) {
  json j = to_json(config);
  const json::json_pointer ptr = axis_pointer(j, axis);
  if (j.at(ptr).is_number_integer()) {
    if (value != std::floor(value)) throw ConfigError("sweep axis '" + axis + "' needs integers");
    if (j.at(ptr).is_number_unsigned()) {
      if (value < 0) throw ConfigError("sweep axis '" + axis + "' needs non-negative integers");
      j[ptr] = static_cast<std::uint64_t>(value);
    } else {
      j[ptr] = static_cast<long long>(value);
    }
  } else {
    j[ptr] = value;
  }
  return parse_config(j);
}

RunConfig reference_config() {
  RunConfig c;
  c.model = {1.0, 1.0, std::numbers::pi, 1.0};
  c.gains = {0.5, 0.25, 0.01, 0.01, 1.0};
  c.kernel = KernelSpec{};
  c.numerics = NumericsSpec{};
  c.u0 = U0Spec{};
  c.u0.kind = "sine";
  c.z0 = Z0Spec{};
  c.normalize = Normalization{"radius_fraction", 0.5};
  return c;
}

}  // namespace kaw
