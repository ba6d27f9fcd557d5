#pragma once

#include "kaw/kernel.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace kaw {

/**
 * Samples of the boundary trace w(t) = u_xx(t, 0) at times t_now − k·dt.
 *
 * Holds ceil(τ₂/dt) + 1 + margin samples; older values are evicted on push.
 */
class HistoryBuffer {
public:
  /// Samples z0 at t = −k·dt (k = 0 is t = 0).
  HistoryBuffer(double dt, double tau2, const std::function<double(double)>& z0, int margin = 2);

  double dt() const { return dt_; }
  double t_now() const { return static_cast<double>(steps_) * dt_; }
  long steps() const { return steps_; }
  std::size_t size() const { return count_; }
  std::size_t capacity() const { return data_.size(); }
  /// Time span covered by the stored samples.
  double span() const { return static_cast<double>(count_ - 1) * dt_; }

  /// Advance t_now by dt and store w(t_now) = w_new.
  void push(double w_new);

  /// Sample at t_now − k·dt.
  double sample(std::size_t k) const;

  /// Linear interpolation at time t; HistoryError outside the stored span.
  double lookup(double t) const;

private:
  double dt_;
  long steps_{0};
  std::vector<double> data_;
  std::size_t head_{0};  // index of the newest sample
  std::size_t count_{0};
};

/// ∫_{τ₁}^{τ₂} λ(σ) w(t_eval − σ) dσ (no β factor). t_eval defaults to t_now
/// and may exceed it by at most τ₁.
double memory_integral(const HistoryBuffer& buf, const MemoryKernel& kernel);
double memory_integral(const HistoryBuffer& buf, const MemoryKernel& kernel, double t_eval);

/// Weight W(σ) in the memory energies.
struct PlainWeight {};
struct ExpWeight {
  double delta{0.0};
};

/// ∫_{τ₁}^{τ₂} λ(s) ∫₀^s W(σ) w²(t_now − σ) dσ ds (no |β| factor).
double z_energy(const HistoryBuffer& buf, const MemoryKernel& kernel, PlainWeight);
double z_energy(const HistoryBuffer& buf, const MemoryKernel& kernel, ExpWeight weight);

/// ∫_{τ₁}^{τ₂} e^{−δs} λ(s) w²(t_now − s) ds.
double z_boundary_norm(const HistoryBuffer& buf, const MemoryKernel& kernel, double delta);

/// ∫_{τ₁}^{τ₂} W(s) λ(s) w(t_eval − s)^power ds, trapezoid on the sample grid
/// with interpolated endpoints. power is 1 or 2.
double lag_integral(const HistoryBuffer& buf, const MemoryKernel& kernel, double t_eval,
                    const std::function<double(double)>& weight, int power);

}  // namespace kaw
