#pragma once

#include <cstddef>
#include <vector>

namespace kaw {

/// Square band matrix with kl sub- and ku super-diagonals (LAPACK band layout).
class BandMatrix {
public:
  BandMatrix() = default;
  BandMatrix(std::size_t n, int kl, int ku);

  std::size_t size() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  bool in_band(std::size_t i, std::size_t j) const;
  /// Entry (i, j); zero outside the band.
  double operator()(std::size_t i, std::size_t j) const;
  /// Mutable entry; (i, j) must lie inside the band.
  double& at(std::size_t i, std::size_t j);

  std::vector<double> multiply(const std::vector<double>& x) const;

  /// I·s + A·c, same band.
  BandMatrix scaled_plus_identity(double c, double s = 1.0) const;

  /// Number of structurally nonzero entries in row i.
  std::size_t row_nonzeros(std::size_t i) const;

  const std::vector<double>& storage() const { return ab_; }

private:
  std::size_t n_{0};
  int kl_{0};
  int ku_{0};
  std::vector<double> ab_;  // column-major, leading dimension kl + ku + 1
};

/// LU factorization of a band matrix with partial pivoting.
class BandedLU {
public:
  explicit BandedLU(const BandMatrix& a);
  std::vector<double> solve(const std::vector<double>& b) const;

private:
  std::size_t n_;
  int kl_;
  int ku_;
  std::vector<double> lu_;
  std::vector<int> ipiv_;
};

/**
 * Solver for (B + u vᵀ) x = r with B banded, via Sherman–Morrison on one
 * banded factorization. Throws InvalidArgument when 1 + vᵀB⁻¹u vanishes.
 */
class RankOneBandedSolver {
public:
  RankOneBandedSolver(const BandMatrix& b, std::vector<double> u, std::vector<double> v);
  std::vector<double> solve(const std::vector<double>& r) const;

private:
  BandedLU lu_;
  std::vector<double> v_;
  std::vector<double> binv_u_;
  double denom_{1.0};
};

double dot(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kaw
