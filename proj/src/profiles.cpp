#include "kaw/profiles.hpp"

#include "kaw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace kaw {

namespace {

using Mmix = std::linear_congruential_engine<std::uint64_t, 6364136223846793005ULL,
                                             1442695040888963407ULL, 0ULL>;

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x < xs.front() || x > xs.back()) return 0.0;
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.end()) return ys.back();
  const auto k = static_cast<std::size_t>(it - xs.begin());
  const double th = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
  return (1.0 - th) * ys[k - 1] + th * ys[k];
}

void check_table(const std::vector<double>& xs, const std::vector<double>& ys, const char* what) {
  if (xs.size() < 2 || xs.size() != ys.size()) {
    throw InvalidArgument(std::string(what) + ": need >= 2 nodes and matching values");
  }
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (!(xs[k] > xs[k - 1])) throw InvalidArgument(std::string(what) + ": nodes must increase");
  }
}

}  // namespace

Lcg::Lcg(std::uint64_t seed) : state_(seed) {}

double Lcg::uniform() {
  Mmix engine(state_);
  state_ = engine();
  return static_cast<double>(state_ >> 11) * 0x1.0p-53;
}

void validate(const U0Spec& spec) {
  if (spec.kind == "zero" || spec.kind == "bump") return;
  if (spec.kind == "sine") {
    if (spec.mode < 1) throw InvalidArgument("initial.u0.mode must be >= 1");
    return;
  }
  if (spec.kind == "tabulated") {
    check_table(spec.x, spec.values, "initial.u0");
    return;
  }
  if (spec.kind == "random") {
    if (spec.modes < 1) throw InvalidArgument("initial.u0.modes must be >= 1");
    return;
  }
  throw InvalidArgument("initial.u0.kind must be zero|sine|bump|tabulated|random");
}

void validate(const Z0Spec& spec) {
  if (spec.kind == "zero" || spec.kind == "constant" || spec.kind == "sinusoid") return;
  if (spec.kind == "tabulated") {
    check_table(spec.t, spec.values, "initial.z0");
    return;
  }
  throw InvalidArgument("initial.z0.kind must be zero|constant|sinusoid|tabulated");
}

std::vector<double> sample_u0(const U0Spec& spec, const std::vector<double>& x, double L) {
  validate(spec);
  const double pi = std::numbers::pi;
  std::vector<double> u(x.size(), 0.0);
  if (spec.kind == "sine") {
    for (std::size_t j = 0; j < x.size(); ++j) {
      u[j] = spec.amplitude * std::sin(spec.mode * pi * x[j] / L);
    }
  } else if (spec.kind == "bump") {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double q = x[j] * (L - x[j]);
      u[j] = spec.amplitude * q * q * std::sin(pi * x[j] / L);
    }
  } else if (spec.kind == "tabulated") {
    for (std::size_t j = 0; j < x.size(); ++j) u[j] = interp(spec.x, spec.values, x[j]);
  } else if (spec.kind == "random") {
    Lcg rng(spec.seed);
    std::vector<double> c(static_cast<std::size_t>(spec.modes));
    for (int k = 0; k < spec.modes; ++k) c[static_cast<std::size_t>(k)] = rng.uniform(-1.0, 1.0) / (k + 1);
    const double L4 = L * L * L * L;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double q = x[j] * (L - x[j]);
      double s = 0.0;
      for (int k = 0; k < spec.modes; ++k) {
        s += c[static_cast<std::size_t>(k)] * std::sin((k + 1) * pi * x[j] / L);
      }
      u[j] = spec.amplitude * q * q / L4 * s;
    }
  }
  return u;
}

double eval_z0(const Z0Spec& spec, double t) {
  if (spec.kind == "constant") return spec.value;
  if (spec.kind == "sinusoid") return spec.amplitude * std::sin(spec.omega * t + spec.phase);
  if (spec.kind == "tabulated") return interp(spec.t, spec.values, t);
  return 0.0;
}

double signed_pow(double u, double p) {
  if (p == 1.0) return u;
  if (p == 2.0) return u * u;
  const double m = std::pow(std::abs(u), p);
  return u < 0.0 ? -m : m;
}

ManufacturedSolution::ManufacturedSolution(double a, double b, double L, double p)
    : a_(a), b_(b), L_(L), p_(p) {}

double ManufacturedSolution::value(double x, double t) const { return dx(0, x, t); }

double ManufacturedSolution::dx(int k, double x, double t) const {
  // Leibniz on q(x) = L²x² − 2Lx³ + x⁴ and s(x) = sin(πx/L).
  const double L = L_;
  const double q[5] = {L * L * x * x - 2 * L * x * x * x + x * x * x * x,
                       2 * L * L * x - 6 * L * x * x + 4 * x * x * x,
                       2 * L * L - 12 * L * x + 12 * x * x, -12 * L + 24 * x, 24.0};
  const double w = std::numbers::pi / L;
  auto s = [&](int m) {
    const double wm = std::pow(w, m);
    switch (m % 4) {
      case 0: return wm * std::sin(w * x);
      case 1: return wm * std::cos(w * x);
      case 2: return -wm * std::sin(w * x);
      default: return -wm * std::cos(w * x);
    }
  };
  static const int binom[6][6] = {{1}, {1, 1}, {1, 2, 1}, {1, 3, 3, 1}, {1, 4, 6, 4, 1},
                                  {1, 5, 10, 10, 5, 1}};
  if (k < 0 || k > 5) throw InvalidArgument("ManufacturedSolution::dx: order must be 0..5");
  double sum = 0.0;
  for (int j = 0; j <= std::min(k, 4); ++j) sum += binom[k][j] * q[j] * s(k - j);
  return std::exp(-t) * sum;
}

double ManufacturedSolution::forcing(double x, double t) const {
  const double u = dx(0, x, t);
  const double ux = dx(1, x, t);
  return -u + a_ * ux + b_ * dx(3, x, t) - dx(5, x, t) + signed_pow(u, p_) * ux;
}

}  // namespace kaw
