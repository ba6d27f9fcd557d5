#pragma once

#include <variant>
#include <vector>

namespace kaw {

/// λ(s) = c on (τ₁, τ₂).
struct ConstantForm {
  double c{1.0};
};

/// λ(s) = c·e^{−σs} on (τ₁, τ₂).
struct ExponentialForm {
  double c{1.0};
  double sigma{0.0};
};

/// Piecewise-linear interpolation through (s_k, λ_k); the nodes must cover [τ₁, τ₂].
struct TabulatedForm {
  std::vector<double> s;
  std::vector<double> values;
};

using KernelForm = std::variant<ConstantForm, ExponentialForm, TabulatedForm>;

/// Weight w(s) multiplying λ(s) in a kernel moment.
struct UnitWeight {};
struct LinearWeight {};
/// w(s) = s·e^{−δρs}.
struct DecayingLinearWeight {
  double delta{0.0};
  double rho{0.0};
};
using MomentWeight = std::variant<UnitWeight, LinearWeight, DecayingLinearWeight>;

/**
 * Memory kernel λ supported on the lag window (τ₁, τ₂).
 *
 * Construction validates positivity and boundedness and caches ∫λ and ∫sλ.
 * Instances are immutable.
 */
class MemoryKernel {
public:
  MemoryKernel(double tau1, double tau2, KernelForm form);

  double tau1() const { return tau1_; }
  double tau2() const { return tau2_; }
  const KernelForm& form() const { return form_; }

  /// λ(s); zero outside [τ₁, τ₂].
  double operator()(double s) const;

  double lambda_integral() const { return lambda_integral_; }
  double s_lambda_integral() const { return s_lambda_integral_; }

  /// ∫_{τ₁}^{τ₂} w(s)·λ(s) ds. Throws QuadratureError if the adaptive rule
  /// cannot reach 1e-10 for tabulated kernels.
  double moment(const MomentWeight& weight) const;

private:
  double tau1_;
  double tau2_;
  KernelForm form_;
  double lambda_integral_{0.0};
  double s_lambda_integral_{0.0};
};

/// ∫_{τ₁}^{τ₂} w(s)λ(s) ds (free-function spelling of MemoryKernel::moment).
double kernel_moment(const MemoryKernel& kernel, const MomentWeight& weight);

}  // namespace kaw
