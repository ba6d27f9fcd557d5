#pragma once

#include "kaw/kernel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kaw {

/// Coefficients of u_t + a u_x + b u_xxx − u_xxxxx + u^p u_x = 0 on (0, L).
struct PhysicalParams {
  double a{1.0};
  double b{1.0};
  double L{1.0};
  double p{1.0};

  /// Throws InvalidArgument unless a, b, L > 0 and 1 ≤ p ≤ 2.
  void validate() const;
};

/// Boundary feedback gains and the Lyapunov weights used by the certificates.
struct FeedbackGains {
  double alpha{0.5};
  double beta{0.25};
  double mu1{0.0};
  double mu2{0.0};
  double delta{1.0};

  void validate() const;
};

/// Symmetric 2×2 matrix [[a11, a12], [a21, a22]].
struct Mat2 {
  double a11{0.0};
  double a12{0.0};
  double a21{0.0};
  double a22{0.0};

  double det() const { return a11 * a22 - a12 * a21; }
  double trace() const { return a11 + a22; }
  /// ⟨M v, v⟩ for v = (v1, v2).
  double quadratic_form(double v1, double v2) const {
    return a11 * v1 * v1 + (a12 + a21) * v1 * v2 + a22 * v2 * v2;
  }
  friend Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.a11 + y.a11, x.a12 + y.a12, x.a21 + y.a21, x.a22 + y.a22};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

struct GainCheck {
  double value{0.0};
  bool ok{false};
};

/// |α| + |β|·∫λ and whether it is strictly below one.
GainCheck check_gain_condition(const FeedbackGains& gains, const MemoryKernel& kernel);

/// sqrt(3b/a)·π.
double critical_length(const PhysicalParams& params);

/// Dissipation matrix of the feedback quadratic form:
/// [[α² − 1 + |β|∫λ, αβ], [αβ, β² − |β|/∫λ]].
Mat2 assemble_P(const FeedbackGains& gains, const MemoryKernel& kernel);

/// Adjoint counterpart of P: off-diagonal α|β|.
Mat2 assemble_P_star(const FeedbackGains& gains, const MemoryKernel& kernel);

/// |β|(∫λ)^{-1}{[1 − |β|∫λ]² − α²}, the closed-form determinant of P.
double closed_form_det_P(const FeedbackGains& gains, const MemoryKernel& kernel);

/// P + μ₁L·[[α², αβ], [αβ, β²]] + μ₂·[[|β|∫λ, 0], [0, 0]].
Mat2 assemble_T(const FeedbackGains& gains, const MemoryKernel& kernel,
                const PhysicalParams& params);

/// det M > 0 and tr M < 0. Throws InvalidArgument when |a12 − a21| > 1e-12.
bool is_negative_definite(const Mat2& m);

/// Largest admissible data radius for the Lyapunov decay estimate:
/// ((p+2)(3π²b − aL²) / (2π² L^{2−p/2}))^{1/p}.
/// Throws CertificateError("length_condition") when L ≥ critical_length.
double r_max(const PhysicalParams& params);

/// Supremum of the guaranteed decay rate μ for data radius r ∈ [0, r_max]:
/// min{ μ₂|β|e^{−δτ₂}δ / (2(1+μ₁|β|)),
///      μ₁ [(p+2)(3π²b − aL²) − 2π²L^{2−p/2} r^p] / (2L²(1+Lμ₁)(p+2)) }.
/// Throws CertificateError naming the first violated precondition.
double mu_guaranteed(const PhysicalParams& params, const FeedbackGains& gains,
                     const MemoryKernel& kernel, double r);

/// Every closed-form condition evaluated for one configuration.
struct Certificate {
  double gain_condition_value{0.0};
  bool gain_condition_ok{false};
  double critical_length{0.0};
  bool length_ok{false};
  Mat2 P;
  Mat2 P_star;
  Mat2 T;
  double detP{0.0};
  double trP{0.0};
  double detT{0.0};
  double trT{0.0};
  bool T_negative_definite{false};
  /// Unset when the length condition fails.
  std::optional<double> r_max;
  double data_radius{0.0};
  /// Unset when a precondition fails; see mu_failure.
  std::optional<double> mu_guaranteed;
  std::string mu_failure;

  /// Names of the failed conditions, in evaluation order.
  std::vector<std::string> failures() const;
  bool all_ok() const { return failures().empty(); }
};

Certificate make_certificate(const PhysicalParams& params, const FeedbackGains& gains,
                             const MemoryKernel& kernel, double data_radius);

/// Halve (μ₁, μ₂) starting from `start` until T(μ₁, μ₂) is negative definite.
/// Returns the number of halvings, or nullopt if `max_halvings` is exceeded.
std::optional<int> halvings_to_certify(FeedbackGains gains, const MemoryKernel& kernel,
                                       const PhysicalParams& params, double start = 1.0,
                                       int max_halvings = 60);

}  // namespace kaw
