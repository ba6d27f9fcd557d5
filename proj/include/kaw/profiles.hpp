#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kaw {

/// Initial profile u0 on (0, L).
struct U0Spec {
  /// zero | sine | bump | tabulated | random
  std::string kind{"sine"};
  double amplitude{1.0};
  int mode{1};
  /// tabulated: piecewise-linear through (x, values), zero outside.
  std::vector<double> x;
  std::vector<double> values;
  /// random: Σ_k c_k·x²(L−x)²·sin(kπx/L)/L⁴ with c_k uniform in [−1, 1]/k.
  std::uint64_t seed{0};
  int modes{4};

  friend bool operator==(const U0Spec&, const U0Spec&) = default;
};

/// Initial history z0(t) on (−τ₂, 0].
struct Z0Spec {
  /// zero | constant | sinusoid | tabulated
  std::string kind{"zero"};
  double value{0.0};
  double amplitude{0.0};
  double omega{1.0};
  double phase{0.0};
  std::vector<double> t;
  std::vector<double> values;

  friend bool operator==(const Z0Spec&, const Z0Spec&) = default;
};

/// Joint rescaling of (u0, z0) so that ‖(u0, z0)‖_H hits a target.
struct Normalization {
  /// none | norm | radius_fraction
  std::string kind{"none"};
  /// Target norm, or fraction of r_max.
  double value{1.0};

  friend bool operator==(const Normalization&, const Normalization&) = default;
};

void validate(const U0Spec& spec);
void validate(const Z0Spec& spec);

std::vector<double> sample_u0(const U0Spec& spec, const std::vector<double>& x, double L);
double eval_z0(const Z0Spec& spec, double t);

/// Uniform doubles in [0, 1) from the 64-bit MMIX linear congruential generator.
class Lcg {
public:
  explicit Lcg(std::uint64_t seed);
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::uint64_t state_;
};

/// u*(x,t) = e^{−t}·x²(L−x)²·sin(πx/L) and its residual under the Kawahara operator.
class ManufacturedSolution {
public:
  ManufacturedSolution(double a, double b, double L, double p);

  double value(double x, double t) const;
  /// ∂ᵏu*/∂xᵏ for k = 0..5.
  double dx(int k, double x, double t) const;
  /// u*_t + a u*_x + b u*_xxx − u*_xxxxx + (u*)^p u*_x.
  double forcing(double x, double t) const;

private:
  double a_, b_, L_, p_;
};

/// u^p with sign(u)|u|^p for non-integer p.
double signed_pow(double u, double p);

}  // namespace kaw
