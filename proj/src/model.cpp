#include "kaw/model.hpp"

#include "kaw/errors.hpp"

#include <cmath>
#include <numbers>

namespace kaw {

void PhysicalParams::validate() const {
  if (!(std::isfinite(a) && a > 0.0)) throw InvalidArgument("model.a must be > 0");
  if (!(std::isfinite(b) && b > 0.0)) throw InvalidArgument("model.b must be > 0");
  if (!(std::isfinite(L) && L > 0.0)) throw InvalidArgument("model.L must be > 0");
  if (!(p >= 1.0 && p <= 2.0)) throw InvalidArgument("model.p must lie in [1, 2]");
}

void FeedbackGains::validate() const {
  if (!std::isfinite(alpha) || alpha == 0.0) throw InvalidArgument("gains.alpha must be nonzero");
  if (!std::isfinite(beta) || beta == 0.0) throw InvalidArgument("gains.beta must be nonzero");
  if (!(mu1 >= 0.0) || !std::isfinite(mu1)) throw InvalidArgument("gains.mu1 must be >= 0");
  if (!(mu2 >= 0.0) || !std::isfinite(mu2)) throw InvalidArgument("gains.mu2 must be >= 0");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("gains.delta must be > 0");
}

GainCheck check_gain_condition(const FeedbackGains& gains, const MemoryKernel& kernel) {
  const double value = std::abs(gains.alpha) + std::abs(gains.beta) * kernel.lambda_integral();
  return {value, value < 1.0};
}

double critical_length(const PhysicalParams& params) {
  return std::sqrt(3.0 * params.b / params.a) * std::numbers::pi;
}

Mat2 assemble_P(const FeedbackGains& gains, const MemoryKernel& kernel) {
  const double I = kernel.lambda_integral();
  if (!(I > 0.0)) {
    throw InvalidArgument("assemble_P: kernel integral must be positive");
  }
  const double al = gains.alpha, be = gains.beta, ab = std::abs(be);
  const double off = al * be;
  return {al * al - 1.0 + ab * I, off, off, be * be - ab / I};
}

Mat2 assemble_P_star(const FeedbackGains& gains, const MemoryKernel& kernel) {
  Mat2 m = assemble_P(gains, kernel);
  m.a12 = m.a21 = gains.alpha * std::abs(gains.beta);
  return m;
}

double closed_form_det_P(const FeedbackGains& gains, const MemoryKernel& kernel) {
  const double I = kernel.lambda_integral();
  const double ab = std::abs(gains.beta);
  const double q = 1.0 - ab * I;
  return ab / I * (q * q - gains.alpha * gains.alpha);
}

Mat2 assemble_T(const FeedbackGains& gains, const MemoryKernel& kernel,
                const PhysicalParams& params) {
  if (gains.mu1 < 0.0 || gains.mu2 < 0.0) {
    throw InvalidArgument("assemble_T: weights must be non-negative");
  }
  const Mat2 P = assemble_P(gains, kernel);
  const double al = gains.alpha, be = gains.beta;
  const double w1 = gains.mu1 * params.L;
  const Mat2 P_mu1{w1 * al * al, w1 * al * be, w1 * al * be, w1 * be * be};
  const Mat2 P_mu2{gains.mu2 * std::abs(be) * kernel.lambda_integral(), 0.0, 0.0, 0.0};
  return P + P_mu1 + P_mu2;
}

bool is_negative_definite(const Mat2& m) {
  if (std::abs(m.a12 - m.a21) > 1e-12) {
    throw InvalidArgument("is_negative_definite: matrix is not symmetric");
  }
  return m.det() > 0.0 && m.trace() < 0.0;
}

double r_max(const PhysicalParams& params) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double margin = 3.0 * pi2 * params.b - params.a * params.L * params.L;
  if (!(params.L < critical_length(params)) || !(margin > 0.0)) {
    throw CertificateError("length_condition", "length condition violated: L >= sqrt(3b/a)*pi");
  }
  const double p = params.p;
  const double base = (p + 2.0) * margin / (2.0 * pi2 * std::pow(params.L, 2.0 - p / 2.0));
  return std::pow(base, 1.0 / p);
}

double mu_guaranteed(const PhysicalParams& params, const FeedbackGains& gains,
                     const MemoryKernel& kernel, double r) {
  if (!check_gain_condition(gains, kernel).ok) {
    throw CertificateError("gain_condition", "gain condition |alpha| + |beta| int(lambda) < 1 fails");
  }
  const double rm = r_max(params);
  if (!is_negative_definite(assemble_T(gains, kernel, params))) {
    throw CertificateError("T_negative_definite", "T(mu1, mu2) is not negative definite");
  }
  if (!(r >= 0.0) || r > rm) {
    throw CertificateError("data_radius", "data radius must lie in [0, r_max]");
  }
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double p = params.p, L = params.L;
  const double ab = std::abs(gains.beta);
  const double memory_term = gains.mu2 * ab * std::exp(-gains.delta * kernel.tau2()) * gains.delta /
                             (2.0 * (1.0 + gains.mu1 * ab));
  // The bracket vanishes at r = r_max; clamp the rounding residue there.
  const double bracket = std::max(0.0, (p + 2.0) * (3.0 * pi2 * params.b - params.a * L * L) -
                                           2.0 * pi2 * std::pow(L, 2.0 - p / 2.0) * std::pow(r, p));
  const double length_term =
      gains.mu1 / (2.0 * L * L * (1.0 + L * gains.mu1) * (p + 2.0)) * bracket;
  return std::min(memory_term, length_term);
}

std::vector<std::string> Certificate::failures() const {
  std::vector<std::string> out;
  if (!gain_condition_ok) out.emplace_back("gain_condition");
  if (!length_ok) out.emplace_back("length_condition");
  if (!T_negative_definite) out.emplace_back("T_negative_definite");
  if (!r_max || !(*r_max > 0.0)) out.emplace_back("r_max");
  if (!mu_guaranteed || !(*mu_guaranteed > 0.0)) out.emplace_back("mu_guaranteed");
  return out;
}

Certificate make_certificate(const PhysicalParams& params, const FeedbackGains& gains,
                             const MemoryKernel& kernel, double data_radius) {
  Certificate c;
  const GainCheck g = check_gain_condition(gains, kernel);
  c.gain_condition_value = g.value;
  c.gain_condition_ok = g.ok;
  c.critical_length = critical_length(params);
  c.length_ok = params.L < c.critical_length;
  c.P = assemble_P(gains, kernel);
  c.P_star = assemble_P_star(gains, kernel);
  c.T = assemble_T(gains, kernel, params);
  c.detP = c.P.det();
  c.trP = c.P.trace();
  c.detT = c.T.det();
  c.trT = c.T.trace();
  c.T_negative_definite = is_negative_definite(c.T);
  c.data_radius = data_radius;
  if (c.length_ok) {
    c.r_max = r_max(params);
  }
  try {
    c.mu_guaranteed = mu_guaranteed(params, gains, kernel, data_radius);
  } catch (const CertificateError& e) {
    c.mu_failure = e.condition();
  }
  return c;
}

std::optional<int> halvings_to_certify(FeedbackGains gains, const MemoryKernel& kernel,
                                       const PhysicalParams& params, double start,
                                       int max_halvings) {
  gains.mu1 = start;
  gains.mu2 = start;
  for (int k = 0; k <= max_halvings; ++k) {
    if (is_negative_definite(assemble_T(gains, kernel, params))) {
      return k;
    }
    gains.mu1 *= 0.5;
    gains.mu2 *= 0.5;
  }
  return std::nullopt;
}

}  // namespace kaw
