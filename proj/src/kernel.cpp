#include "kaw/kernel.hpp"

#include "kaw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace kaw {
namespace {

// ∫_a^b s^m e^{-k s} ds for m ∈ {0, 1}, stable for small k.
double exp_moment(int m, double k, double a, double b) {
  const double scale = std::abs(k) * std::max(std::abs(a), std::abs(b));
  if (scale < 1e-3) {
    double sum = 0.0;
    double coeff = 1.0;  // (-k)^n / n!
    for (int n = 0; n < 16; ++n) {
      const int p = n + m + 1;
      sum += coeff * (std::pow(b, p) - std::pow(a, p)) / p;
      coeff *= -k / (n + 1);
    }
    return sum;
  }
  if (m == 0) {
    return (std::exp(-k * a) - std::exp(-k * b)) / k;
  }
  auto antideriv = [k](double s) { return -std::exp(-k * s) * (s / k + 1.0 / (k * k)); };
  return antideriv(b) - antideriv(a);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        double& achieved) {
  struct Panel {
    double a, b, fa, fm, fb, whole, tol;
    int depth;
  };
  auto simpson = [](double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  std::vector<Panel> stack{{a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 0}};
  double total = 0.0;
  achieved = 0.0;
  bool converged = true;
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double lm = f(0.5 * (p.a + m));
    const double rm = f(0.5 * (m + p.b));
    const double left = simpson(p.a, m, p.fa, lm, p.fm);
    const double right = simpson(m, p.b, p.fm, rm, p.fb);
    const double err = std::abs(left + right - p.whole) / 15.0;
    if (err <= p.tol || p.depth >= 40) {
      if (err > p.tol) {
        converged = false;
      }
      total += left + right + (left + right - p.whole) / 15.0;
      achieved += err;
      continue;
    }
    stack.push_back({p.a, m, p.fa, lm, p.fm, left, 0.5 * p.tol, p.depth + 1});
    stack.push_back({m, p.b, p.fm, rm, p.fb, right, 0.5 * p.tol, p.depth + 1});
  }
  if (!converged) {
    throw QuadratureError("adaptive quadrature did not converge; achieved " +
                              std::to_string(achieved),
                          achieved);
  }
  return total;
}

void validate_tabulated(const TabulatedForm& t, double tau1, double tau2) {
  if (t.s.size() < 2 || t.s.size() != t.values.size()) {
    throw InvalidArgument("tabulated kernel needs >= 2 nodes and matching value count");
  }
  for (std::size_t k = 1; k < t.s.size(); ++k) {
    if (!(t.s[k] > t.s[k - 1])) {
      throw InvalidArgument("tabulated kernel nodes must be strictly increasing");
    }
  }
  if (t.s.front() > tau1 || t.s.back() < tau2) {
    throw InvalidArgument("tabulated kernel nodes must cover [tau1, tau2]");
  }
  for (double v : t.values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument("tabulated kernel values must be finite and non-negative");
    }
  }
  for (std::size_t k = 1; k < t.s.size(); ++k) {
    const bool inside = t.s[k] > tau1 && t.s[k - 1] < tau2;
    if (inside && t.values[k] == 0.0 && t.values[k - 1] == 0.0) {
      throw InvalidArgument("tabulated kernel vanishes on a sub-interval of (tau1, tau2)");
    }
  }
}

double tabulated_value(const TabulatedForm& t, double s) {
  auto it = std::upper_bound(t.s.begin(), t.s.end(), s);
  if (it == t.s.begin()) {
    return t.values.front();
  }
  if (it == t.s.end()) {
    return t.values.back();
  }
  const std::size_t k = static_cast<std::size_t>(it - t.s.begin());
  const double s0 = t.s[k - 1], s1 = t.s[k];
  const double th = (s - s0) / (s1 - s0);
  return (1.0 - th) * t.values[k - 1] + th * t.values[k];
}

// Visit the linear pieces of a tabulated kernel clipped to [lo, hi]:
// fn(p, q, λ(p), λ(q)).
template <typename Fn>
void for_each_piece(const TabulatedForm& t, double lo, double hi, Fn&& fn) {
  for (std::size_t k = 1; k < t.s.size(); ++k) {
    const double p = std::max(lo, t.s[k - 1]);
    const double q = std::min(hi, t.s[k]);
    if (q <= p) {
      continue;
    }
    fn(p, q, tabulated_value(t, p), tabulated_value(t, q));
  }
}

}  // namespace

MemoryKernel::MemoryKernel(double tau1, double tau2, KernelForm form)
    : tau1_(tau1), tau2_(tau2), form_(std::move(form)) {
  if (!(std::isfinite(tau1) && std::isfinite(tau2)) || !(tau1 > 0.0) || !(tau2 > tau1)) {
    throw InvalidArgument("memory kernel requires 0 < tau1 < tau2");
  }
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, ConstantForm>) {
          if (!std::isfinite(f.c) || !(f.c > 0.0)) {
            throw InvalidArgument("constant kernel requires c > 0");
          }
        } else if constexpr (std::is_same_v<F, ExponentialForm>) {
          if (!std::isfinite(f.c) || !(f.c > 0.0) || !std::isfinite(f.sigma)) {
            throw InvalidArgument("exponential kernel requires c > 0 and finite sigma");
          }
        } else {
          validate_tabulated(f, tau1_, tau2_);
        }
      },
      form_);
  lambda_integral_ = moment(UnitWeight{});
  s_lambda_integral_ = moment(LinearWeight{});
  if (!(lambda_integral_ > 0.0)) {
    throw InvalidArgument("memory kernel must have positive integral");
  }
}

double MemoryKernel::operator()(double s) const {
  if (s < tau1_ || s > tau2_) {
    return 0.0;
  }
  return std::visit(
      [s](const auto& f) -> double {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, ConstantForm>) {
          return f.c;
        } else if constexpr (std::is_same_v<F, ExponentialForm>) {
          return f.c * std::exp(-f.sigma * s);
        } else {
          return tabulated_value(f, s);
        }
      },
      form_);
}

double MemoryKernel::moment(const MomentWeight& weight) const {
  const double a = tau1_, b = tau2_;
  // Exponent k and polynomial degree m of the weight: w(s) = s^m e^{-k s}.
  int m = 0;
  double k = 0.0;
  if (std::holds_alternative<LinearWeight>(weight)) {
    m = 1;
  } else if (const auto* d = std::get_if<DecayingLinearWeight>(&weight)) {
    m = 1;
    k = d->delta * d->rho;
  }
  return std::visit(
      [&](const auto& f) -> double {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, ConstantForm>) {
          return f.c * exp_moment(m, k, a, b);
        } else if constexpr (std::is_same_v<F, ExponentialForm>) {
          return f.c * exp_moment(m, k + f.sigma, a, b);
        } else {
          double total = 0.0;
          if (k == 0.0) {
            for_each_piece(f, a, b, [&](double p, double q, double lp, double lq) {
              const double slope = (lq - lp) / (q - p);
              const double icpt = lp - slope * p;
              if (m == 0) {
                total += 0.5 * (lp + lq) * (q - p);
              } else {
                total += icpt * (q * q - p * p) / 2.0 + slope * (q * q * q - p * p * p) / 3.0;
              }
            });
            return total;
          }
          for_each_piece(f, a, b, [&](double p, double q, double lp, double lq) {
            auto integrand = [&](double s) {
              const double lam = lp + (lq - lp) * (s - p) / (q - p);
              return s * std::exp(-k * s) * lam;
            };
            double achieved = 0.0;
            total += adaptive_simpson(integrand, p, q, 1e-10 * (q - p) / (b - a), achieved);
          });
          return total;
        }
      },
      form_);
}

double kernel_moment(const MemoryKernel& kernel, const MomentWeight& weight) {
  return kernel.moment(weight);
}

}  // namespace kaw
