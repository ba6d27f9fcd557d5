#pragma once

#include "kaw/banded.hpp"
#include "kaw/model.hpp"

#include <vector>

namespace kaw {

/// Uniform grid on (0, L): interior nodes x_j = j·h, j = 1..N, h = L/(N+1).
struct Grid {
  int N{0};
  double L{0.0};
  double h{0.0};
  std::vector<double> x;
};

/// Throws InvalidArgument when N < 12 or L ≤ 0.
Grid make_grid(double L, int N);

/**
 * Semi-discrete Kawahara operator: du/dt = A u + g_F·F(t).
 *
 * A discretizes −(a∂_x + b∂³_x − ∂⁵_x) with u = u_x = 0 at both ends. The
 * fifth-order part is the summation-by-parts product K·D·G, where G is the
 * second difference onto nodes 0..N+1, D a one-sided-closed first difference
 * and K the adjoint of G. u_xx(L) = F enters as the penalty g_F·(F − traceL·u),
 * whose homogeneous half lives inside A.
 */
struct SpatialOperator {
  Grid grid;
  double a{0.0};
  double b{0.0};
  BandMatrix A;
  BandMatrix D1;
  BandMatrix D3;
  BandMatrix D5;
  std::vector<double> g_F;
  std::vector<double> trace0;
  std::vector<double> traceL;
};

SpatialOperator build_operator(const PhysicalParams& params, const Grid& grid);

/// u_xx(0) from interior values, using u(0) = u_x(0) = 0: 2u₁/h².
double trace_uxx0(const SpatialOperator& op, const std::vector<double>& u);
/// u_xx(L) from interior values: 2u_N/h².
double trace_uxxL(const SpatialOperator& op, const std::vector<double>& u);

/// Second differences of u on nodes 0..N+1 (mirror ghosts at both ends).
std::vector<double> second_difference(const Grid& grid, const std::vector<double>& u);

/// Trapezoid ‖u_xx‖² built from second_difference.
double h2_seminorm(const Grid& grid, const std::vector<double>& u);

struct Masses {
  double l2{0.0};
  double weighted{0.0};
};

/// Composite trapezoid (‖u‖², ∫x u² dx) with zero boundary values.
Masses mass_and_weighted_mass(const std::vector<double>& u, const Grid& grid);

/// Centered interior stencils applied to a function sampled at x + k·h.
template <class F>
double centered_d1(const F& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}
template <class F>
double centered_d3(const F& f, double x, double h) {
  return (f(x + 2 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2 * h)) / (2.0 * h * h * h);
}
template <class F>
double centered_d5(const F& f, double x, double h) {
  const double h5 = h * h * h * h * h;
  return (f(x + 3 * h) - 4.0 * f(x + 2 * h) + 5.0 * f(x + h) - 5.0 * f(x - h) +
          4.0 * f(x - 2 * h) - f(x - 3 * h)) /
         (2.0 * h5);
}

}  // namespace kaw
