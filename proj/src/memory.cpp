#include "kaw/memory.hpp"

#include "kaw/errors.hpp"

#include <cmath>
#include <string>

namespace kaw {

namespace {

// Snap t/dt to the nearest integer when within rounding noise.
double grid_position(double t, double dt) {
  const double q = t / dt;
  const double r = std::round(q);
  return std::abs(q - r) < 1e-9 * std::max(1.0, std::abs(q)) ? r : q;
}

}  // namespace

HistoryBuffer::HistoryBuffer(double dt, double tau2, const std::function<double(double)>& z0,
                             int margin)
    : dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("history: dt must be > 0");
  if (!(tau2 > 0.0)) throw InvalidArgument("history: tau2 must be > 0");
  if (margin < 0) throw InvalidArgument("history: margin must be >= 0");
  const auto lags = static_cast<std::size_t>(std::ceil(grid_position(tau2, dt)));
  data_.resize(lags + 1 + static_cast<std::size_t>(margin));
  count_ = data_.size();
  head_ = 0;
  // data_[(head_ + k) % n] is the sample at t_now − k·dt.
  for (std::size_t k = 0; k < count_; ++k) {
    data_[k] = z0(-static_cast<double>(k) * dt);
  }
}

void HistoryBuffer::push(double w_new) {
  head_ = (head_ + data_.size() - 1) % data_.size();
  data_[head_] = w_new;
  ++steps_;
}

double HistoryBuffer::sample(std::size_t k) const {
  if (k >= count_) throw HistoryError("history sample " + std::to_string(k) + " evicted");
  return data_[(head_ + k) % data_.size()];
}

double HistoryBuffer::lookup(double t) const {
  const double lag = grid_position(t_now() - t, dt_);
  if (lag < 0.0 || lag > static_cast<double>(count_ - 1)) {
    throw HistoryError("history lookup outside stored span");
  }
  const auto k = static_cast<std::size_t>(std::floor(lag));
  const double frac = lag - static_cast<double>(k);
  if (frac == 0.0) return sample(k);
  return (1.0 - frac) * sample(k) + frac * sample(k + 1);
}

namespace {

// Trapezoid nodes σ in [lo, hi]: the sample lags of t_eval plus both endpoints.
std::vector<double> lag_nodes(const HistoryBuffer& buf, double t_eval, double lo, double hi) {
  const double dt = buf.dt();
  const double off = grid_position(t_eval - buf.t_now(), dt);  // in units of dt
  std::vector<double> nodes{lo};
  // Sample k sits at σ = (off + k)·dt.
  const double k_lo = std::floor(lo / dt - off) + 1.0;
  for (double k = k_lo;; k += 1.0) {
    const double s = (off + k) * dt;
    if (s >= hi - 1e-9 * dt) break;
    if (s > lo + 1e-9 * dt) nodes.push_back(s);
  }
  nodes.push_back(hi);
  return nodes;
}

double w_at(const HistoryBuffer& buf, double t) { return buf.lookup(t); }

// Squares interpolate between samples, so extra trapezoid nodes leave sums unchanged.
double w2_at(const HistoryBuffer& buf, double t) {
  const double lag = grid_position(buf.t_now() - t, buf.dt());
  if (lag < 0.0 || lag > static_cast<double>(buf.size() - 1)) {
    throw HistoryError("history lookup outside stored span");
  }
  const auto k = static_cast<std::size_t>(std::floor(lag));
  const double frac = lag - static_cast<double>(k);
  const double a = buf.sample(k);
  if (frac == 0.0) return a * a;
  const double b = buf.sample(k + 1);
  return (1.0 - frac) * a * a + frac * b * b;
}

}  // namespace

double lag_integral(const HistoryBuffer& buf, const MemoryKernel& kernel, double t_eval,
                    const std::function<double(double)>& weight, int power) {
  if (t_eval - kernel.tau1() > buf.t_now() + 1e-9 * buf.dt()) {
    throw HistoryError("memory window reaches beyond the newest sample");
  }
  if (t_eval - kernel.tau2() < buf.t_now() - buf.span() - 1e-9 * buf.dt()) {
    throw HistoryError("insufficient history span for the memory window");
  }
  const std::vector<double> s = lag_nodes(buf, t_eval, kernel.tau1(), kernel.tau2());
  auto f = [&](double sigma) {
    const double w = power == 2 ? w2_at(buf, t_eval - sigma) : w_at(buf, t_eval - sigma);
    return weight(sigma) * kernel(sigma) * w;
  };
  double sum = 0.0;
  double prev = f(s[0]);
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double cur = f(s[i]);
    sum += 0.5 * (s[i] - s[i - 1]) * (prev + cur);
    prev = cur;
  }
  return sum;
}

double memory_integral(const HistoryBuffer& buf, const MemoryKernel& kernel) {
  return memory_integral(buf, kernel, buf.t_now());
}

double memory_integral(const HistoryBuffer& buf, const MemoryKernel& kernel, double t_eval) {
  return lag_integral(buf, kernel, t_eval, [](double) { return 1.0; }, 1);
}

namespace {

double nested_energy(const HistoryBuffer& buf, const MemoryKernel& kernel,
                     const std::function<double(double)>& weight) {
  const double t = buf.t_now();
  if (kernel.tau2() > buf.span() + 1e-9 * buf.dt()) {
    throw HistoryError("insufficient history span for the memory energy");
  }
  // Inner cumulative trapezoid on [0, τ₂] with τ₁ inserted as a node.
  std::vector<double> s = lag_nodes(buf, t, 0.0, kernel.tau2());
  bool has_tau1 = false;
  for (double v : s) has_tau1 = has_tau1 || std::abs(v - kernel.tau1()) <= 1e-9 * buf.dt();
  if (!has_tau1) {
    std::size_t pos = 0;
    while (s[pos] < kernel.tau1()) ++pos;
    s.insert(s.begin() + static_cast<long>(pos), kernel.tau1());
  }
  auto g = [&](double sigma) { return weight(sigma) * w2_at(buf, t - sigma); };
  std::vector<double> cumulative(s.size(), 0.0);
  double prev = g(s[0]);
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double cur = g(s[i]);
    cumulative[i] = cumulative[i - 1] + 0.5 * (s[i] - s[i - 1]) * (prev + cur);
    prev = cur;
  }
  double sum = 0.0;
  bool started = false;
  double s_prev = 0.0, f_prev = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < kernel.tau1() - 1e-9 * buf.dt()) continue;
    const double f = kernel(s[i]) * cumulative[i];
    if (started) sum += 0.5 * (s[i] - s_prev) * (f + f_prev);
    started = true;
    s_prev = s[i];
    f_prev = f;
  }
  return sum;
}

}  // namespace

double z_energy(const HistoryBuffer& buf, const MemoryKernel& kernel, PlainWeight) {
  return nested_energy(buf, kernel, [](double) { return 1.0; });
}

double z_energy(const HistoryBuffer& buf, const MemoryKernel& kernel, ExpWeight weight) {
  const double d = weight.delta;
  return nested_energy(buf, kernel, [d](double s) { return std::exp(-d * s); });
}

double z_boundary_norm(const HistoryBuffer& buf, const MemoryKernel& kernel, double delta) {
  return lag_integral(
      buf, kernel, buf.t_now(), [delta](double s) { return std::exp(-delta * s); }, 2);
}

}  // namespace kaw
