#include "kaw/discretization.hpp"
#include "kaw/errors.hpp"
#include "kaw/profiles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace kaw;
using doctest::Approx;

namespace {

const double pi = std::numbers::pi;

std::vector<double> sample(const Grid& g, double (*f)(double)) {
  std::vector<double> u(g.x.size());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = f(g.x[j]);
  return u;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  Lcg rng(seed);
  std::vector<double> u(n);
  for (double& v : u) v = rng.uniform(-1.0, 1.0);
  return u;
}

// max |(A u)_j + (a u' + b u''' − u⁽⁵⁾)(x_j)| over rows at least 4 nodes from each end
double interior_consistency_error(int N) {
  const PhysicalParams p{1.0, 1.0, pi, 1.0};
  const Grid g = make_grid(pi, N);
  const SpatialOperator op = build_operator(p, g);
  const auto u = sample(g, [](double x) { return std::sin(x); });
  const auto Au = op.A.multiply(u);
  double err = 0.0;
  for (int j = 4; j < N - 4; ++j) {
    const double x = g.x[static_cast<std::size_t>(j)];
    // a u' + b u''' − u⁽⁵⁾ = cos x − cos x − cos x
    err = std::max(err, std::abs(Au[static_cast<std::size_t>(j)] - std::cos(x)));
  }
  return err;
}

double stencil_consistency_error(int N) {
  const Grid g = make_grid(pi, N);
  auto f = [](double x) { return std::sin(x); };
  double err = 0.0;
  for (double x : g.x) {
    const double v = centered_d1(f, x, g.h) + centered_d3(f, x, g.h) - centered_d5(f, x, g.h);
    err = std::max(err, std::abs(v + std::cos(x)));
  }
  return err;
}

}  // namespace

TEST_CASE("grid") {
  const Grid g = make_grid(pi, 128);
  CHECK(g.x.size() == 128);
  CHECK(std::abs(g.h * 129 - pi) < 1e-14);
  CHECK(g.x.front() == g.h);
  CHECK_THROWS_AS(make_grid(pi, 11), InvalidArgument);
  CHECK_THROWS_AS(make_grid(0.0, 64), InvalidArgument);
}

TEST_CASE("fifth difference is exact on x^5") {
  // h = 1/128 keeps every sample and stencil weight exact in binary.
  const Grid g = make_grid(1.0, 127);
  auto q = [](double x) { return x * x * x * x * x; };
  for (double x : g.x) CHECK(centered_d5(q, x, g.h) == 120.0);

  const SpatialOperator op = build_operator({1.0, 1.0, 1.0, 1.0}, g);
  const auto u = sample(g, [](double x) { return x * x * x * x * x; });
  const auto v = op.D5.multiply(u);
  for (int j = 3; j < 127 - 3; ++j) CHECK(v[static_cast<std::size_t>(j)] == 120.0);
}

TEST_CASE("interior rows are the centered stencils") {
  const Grid g = make_grid(pi, 64);
  const SpatialOperator op = build_operator({2.0, 0.5, pi, 1.0}, g);
  const double h = g.h, h3 = h * h * h, h5 = h3 * h * h;
  const double d1[7] = {0, 0, -0.5 / h, 0, 0.5 / h, 0, 0};
  const double d3[7] = {0, -0.5 / h3, 1.0 / h3, 0, -1.0 / h3, 0.5 / h3, 0};
  const double d5[7] = {-0.5 / h5, 2.0 / h5, -2.5 / h5, 0, 2.5 / h5, -2.0 / h5, 0.5 / h5};
  for (std::size_t i = 3; i + 3 < 64; ++i) {
    for (int k = -3; k <= 3; ++k) {
      const double want = -2.0 * d1[k + 3] - 0.5 * d3[k + 3] + d5[k + 3];
      CHECK(op.A(i, i + k) == Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("second-order consistency on sine") {
  const double e1 = interior_consistency_error(64);
  const double e2 = interior_consistency_error(128);
  const double e3 = interior_consistency_error(256);
  const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
  CHECK(o1 >= 1.8);
  CHECK(o1 <= 2.2);
  CHECK(o2 >= 1.8);
  CHECK(o2 <= 2.2);

  const double s1 = stencil_consistency_error(64);
  const double s2 = stencil_consistency_error(128);
  const double s3 = stencil_consistency_error(256);
  CHECK(std::log2(s1 / s2) == Approx(2.0).epsilon(0.1));
  CHECK(std::log2(s2 / s3) == Approx(2.0).epsilon(0.1));
}

TEST_CASE("boundary forcing and bandwidth") {
  const Grid g = make_grid(pi, 64);
  const SpatialOperator op = build_operator({1.0, 1.0, pi, 1.0}, g);
  for (std::size_t j = 0; j + 3 < op.g_F.size(); ++j) CHECK(op.g_F[j] == 0.0);
  CHECK(op.g_F.back() != 0.0);
  for (std::size_t i = 0; i < 64; ++i) CHECK(op.A.row_nonzeros(i) <= 9);

  // F = 0 leaves the homogeneous operator.
  const auto u = random_vector(64, 7);
  auto Au = op.A.multiply(u);
  auto with_F = Au;
  for (std::size_t j = 0; j < with_F.size(); ++j) with_F[j] += op.g_F[j] * 0.0;
  CHECK(with_F == Au);
}

TEST_CASE("discrete energy identity") {
  // 2⟨u, A u + g_F F⟩_h = F² − w0² − (F − u_xx(L))² − closure loss
  const Grid g = make_grid(2.5, 40);
  const SpatialOperator op = build_operator({1.3, 0.7, 2.5, 1.0}, g);
  const auto u = random_vector(40, 99);
  const double F = 0.37 * trace_uxx0(op, u) + 12.0;
  auto r = op.A.multiply(u);
  for (std::size_t j = 0; j < r.size(); ++j) r[j] += op.g_F[j] * F;
  const double lhs = 2.0 * g.h * dot(u, r);
  const double w0 = trace_uxx0(op, u), wl = trace_uxxL(op, u);
  const double closure = 2.0 * op.b * g.h * dot(u, op.D3.multiply(u));
  const double rhs = F * F - w0 * w0 - (F - wl) * (F - wl) - closure;
  CHECK(lhs == Approx(rhs).epsilon(1e-10));
  CHECK(closure >= 0.0);
  // Skew drift term contributes nothing.
  CHECK(std::abs(dot(u, op.D1.multiply(u))) < 1e-12 * dot(u, u) / g.h);
}

TEST_CASE("closed-loop operator is dissipative for |alpha| < 1") {
  const Grid g = make_grid(pi, 64);
  const SpatialOperator op = build_operator({1.0, 1.0, pi, 1.0}, g);
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const auto u = random_vector(64, s);
    auto r = op.A.multiply(u);
    const double F = 0.9 * trace_uxx0(op, u);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += op.g_F[j] * F;
    CHECK(dot(u, r) <= 0.0);
  }
}

TEST_CASE("fifth-order part is antisymmetric under reflection") {
  const Grid g = make_grid(pi, 48);
  const SpatialOperator op = build_operator({1.0, 1.0, pi, 1.0}, g);
  // Odd data about L/2 gives even fifth derivative.
  auto u = random_vector(48, 3);
  for (std::size_t j = 0; j < 24; ++j) u[47 - j] = -u[j];
  const auto v = op.D5.multiply(u);
  for (std::size_t j = 0; j < 24; ++j) CHECK(v[47 - j] == Approx(v[j]).epsilon(1e-10));
  for (std::size_t i = 0; i < 48; ++i) {
    for (std::size_t j = 0; j < 48; ++j) {
      CHECK(op.D5(47 - i, 47 - j) == Approx(-op.D5(i, j)).epsilon(1e-12).scale(1e-6));
    }
  }
}

TEST_CASE("boundary trace") {
  const Grid g = make_grid(pi, 64);
  const SpatialOperator op = build_operator({1.0, 1.0, pi, 1.0}, g);
  CHECK(trace_uxx0(op, std::vector<double>(64, 0.0)) == 0.0);
  // exact on c·x²
  auto quad = sample(g, [](double x) { return 3.0 * x * x; });
  CHECK(trace_uxx0(op, quad) == Approx(6.0).epsilon(1e-13));
  // x³: first-order truncation 2h → 0
  for (int N : {64, 128, 256}) {
    const Grid gn = make_grid(pi, N);
    const SpatialOperator on = build_operator({1.0, 1.0, pi, 1.0}, gn);
    const auto c = sample(gn, [](double x) { return x * x * x; });
    CHECK(trace_uxx0(on, c) == Approx(2.0 * gn.h).epsilon(1e-12));
  }
  // x²(x − L)²: q″(0) = 2L², leading error q‴(0)h/3 = −4Lh
  double prev = 1e300;
  for (int N : {64, 128, 256}) {
    const Grid gn = make_grid(pi, N);
    const SpatialOperator on = build_operator({1.0, 1.0, pi, 1.0}, gn);
    const auto c = sample(gn, [](double x) { return x * x * (x - pi) * (x - pi); });
    const double err = std::abs(trace_uxx0(on, c) - 2.0 * pi * pi);
    CHECK(err == Approx(4.0 * pi * gn.h).epsilon(0.01));
    CHECK(err < prev);
    prev = err;
  }
  // linearity
  const auto u = random_vector(64, 5), v = random_vector(64, 6);
  std::vector<double> w(64);
  for (std::size_t j = 0; j < 64; ++j) w[j] = 2.5 * u[j] - 0.75 * v[j];
  const double lin = 2.5 * trace_uxx0(op, u) - 0.75 * trace_uxx0(op, v);
  CHECK(std::abs(trace_uxx0(op, w) - lin) <= 1e-13 * std::max(1.0, std::abs(lin)));
}

TEST_CASE("mass and weighted mass") {
  const Grid g = make_grid(pi, 128);
  const auto z = mass_and_weighted_mass(std::vector<double>(128, 0.0), g);
  CHECK(z.l2 == 0.0);
  CHECK(z.weighted == 0.0);

  for (int N : {32, 64, 128}) {
    const Grid gn = make_grid(pi, N);
    const auto m = mass_and_weighted_mass(sample(gn, [](double x) { return std::sin(x); }), gn);
    CHECK(std::abs(m.l2 - pi / 2) <= 10 * gn.h * gn.h);
    CHECK(std::abs(m.weighted - pi * pi / 4) <= 10 * gn.h * gn.h);
  }

  auto u = sample(g, [](double x) { return std::sin(x); });
  const auto m1 = mass_and_weighted_mass(u, g);
  for (double& v : u) v *= 2.0;
  const auto m2 = mass_and_weighted_mass(u, g);
  CHECK(m2.l2 == 4.0 * m1.l2);
  CHECK(m2.weighted == 4.0 * m1.weighted);
}

TEST_CASE("second-derivative seminorm") {
  double prev = 1e300;
  for (int N : {64, 128, 256}) {
    const Grid g = make_grid(pi, N);
    const auto u = sample(g, [](double x) { return x * x * (x - pi) * (x - pi); });
    // ∫(12x² − 12πx + 2π²)² dx = 4π⁵/5
    const double err = std::abs(h2_seminorm(g, u) - 0.8 * std::pow(pi, 5));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-2 * std::pow(pi, 5));
}
