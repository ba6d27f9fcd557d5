#include "kaw/discretization.hpp"

#include "kaw/errors.hpp"

#include <cmath>

namespace kaw {

Grid make_grid(double L, int N) {
  if (N < 12) throw InvalidArgument("N too small for stencil closure (need N >= 12)");
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("grid length must be > 0");
  Grid g;
  g.N = N;
  g.L = L;
  g.h = L / (N + 1);
  g.x.resize(static_cast<std::size_t>(N));
  for (int j = 1; j <= N; ++j) g.x[static_cast<std::size_t>(j - 1)] = j * g.h;
  return g;
}

std::vector<double> second_difference(const Grid& grid, const std::vector<double>& u) {
  const int N = grid.N;
  const double ih2 = 1.0 / (grid.h * grid.h);
  auto at = [&](int k) { return (k >= 1 && k <= N) ? u[static_cast<std::size_t>(k - 1)] : 0.0; };
  std::vector<double> v(static_cast<std::size_t>(N + 2));
  v[0] = 2.0 * at(1) * ih2;
  v[static_cast<std::size_t>(N + 1)] = 2.0 * at(N) * ih2;
  for (int k = 1; k <= N; ++k) {
    v[static_cast<std::size_t>(k)] = (at(k + 1) - 2.0 * at(k) + at(k - 1)) * ih2;
  }
  return v;
}

namespace {

std::vector<double> boundary_weights(const Grid& grid) {
  std::vector<double> w(static_cast<std::size_t>(grid.N + 2), grid.h);
  w.front() = w.back() = 0.5 * grid.h;
  return w;
}

// SBP first difference on nodes 0..N+1.
std::vector<double> sbp_d1(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  std::vector<double> out(n);
  out[0] = (v[1] - v[0]) / h;
  out[n - 1] = (v[n - 1] - v[n - 2]) / h;
  for (std::size_t k = 1; k + 1 < n; ++k) out[k] = (v[k + 1] - v[k - 1]) / (2.0 * h);
  return out;
}

// K = H_u⁻¹ Gᵀ H_v.
std::vector<double> adjoint_second_difference(const Grid& grid, const std::vector<double>& y) {
  const int N = grid.N;
  const double ih2 = 1.0 / (grid.h * grid.h);
  const std::vector<double> w = boundary_weights(grid);
  std::vector<double> z(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) z[k] = w[k] * y[k];
  std::vector<double> out(static_cast<std::size_t>(N), 0.0);
  for (int j = 1; j <= N; ++j) {
    double s = -2.0 * z[static_cast<std::size_t>(j)];
    if (j - 1 >= 1) s += z[static_cast<std::size_t>(j - 1)];
    if (j + 1 <= N) s += z[static_cast<std::size_t>(j + 1)];
    if (j == 1) s += 2.0 * z[0];
    if (j == N) s += 2.0 * z[static_cast<std::size_t>(N + 1)];
    out[static_cast<std::size_t>(j - 1)] = s * ih2 / grid.h;
  }
  return out;
}

}  // namespace

SpatialOperator build_operator(const PhysicalParams& params, const Grid& grid) {
  params.validate();
  const int N = grid.N;
  if (N < 12) throw InvalidArgument("N too small for stencil closure (need N >= 12)");
  const auto n = static_cast<std::size_t>(N);
  const double h = grid.h;

  SpatialOperator op;
  op.grid = grid;
  op.a = params.a;
  op.b = params.b;

  op.D1 = BandMatrix(n, 1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) op.D1.at(i, i - 1) = -1.0 / (2.0 * h);
    if (i + 1 < n) op.D1.at(i, i + 1) = 1.0 / (2.0 * h);
  }

  // Five-point third difference; u_x = 0 mirrors u_{-1} = u_1, u_{N+2} = u_N.
  op.D3 = BandMatrix(n, 2, 2);
  const int offsets[4] = {-2, -1, 1, 2};
  const double weights[4] = {-1.0, 2.0, -2.0, 1.0};
  const double c3 = 1.0 / (2.0 * h * h * h);
  for (int j = 1; j <= N; ++j) {
    for (int q = 0; q < 4; ++q) {
      int m = j + offsets[q];
      if (m == -1) m = 1;
      if (m == N + 2) m = N;
      if (m >= 1 && m <= N) {
        op.D3.at(static_cast<std::size_t>(j - 1), static_cast<std::size_t>(m - 1)) +=
            weights[q] * c3;
      }
    }
  }

  op.D5 = BandMatrix(n, 3, 3);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const std::vector<double> col =
        adjoint_second_difference(grid, sbp_d1(second_difference(grid, e), h));
    e[j] = 0.0;
    const std::size_t i0 = j >= 3 ? j - 3 : 0;
    const std::size_t i1 = std::min(n - 1, j + 3);
    for (std::size_t i = i0; i <= i1; ++i) op.D5.at(i, j) = col[i];
  }

  op.trace0.assign(n, 0.0);
  op.trace0.front() = 2.0 / (h * h);
  op.traceL.assign(n, 0.0);
  op.traceL.back() = 2.0 / (h * h);
  op.g_F.assign(n, 0.0);
  op.g_F.back() = op.traceL.back() / h;

  op.A = BandMatrix(n, 3, 3);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i >= 3 ? i - 3 : 0;
    const std::size_t j1 = std::min(n - 1, i + 3);
    for (std::size_t j = j0; j <= j1; ++j) {
      op.A.at(i, j) = -params.a * op.D1(i, j) - params.b * op.D3(i, j) + op.D5(i, j);
    }
  }
  op.A.at(n - 1, n - 1) -= op.g_F.back() * op.traceL.back();
  return op;
}

double trace_uxx0(const SpatialOperator& op, const std::vector<double>& u) {
  return dot(op.trace0, u);
}

double trace_uxxL(const SpatialOperator& op, const std::vector<double>& u) {
  return dot(op.traceL, u);
}

double h2_seminorm(const Grid& grid, const std::vector<double>& u) {
  const std::vector<double> v = second_difference(grid, u);
  const std::vector<double> w = boundary_weights(grid);
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += w[k] * v[k] * v[k];
  return s;
}

Masses mass_and_weighted_mass(const std::vector<double>& u, const Grid& grid) {
  Masses m;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double u2 = u[j] * u[j];
    m.l2 += u2;
    m.weighted += grid.x[j] * u2;
  }
  m.l2 *= grid.h;
  m.weighted *= grid.h;
  return m;
}

}  // namespace kaw
