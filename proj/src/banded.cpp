#include "kaw/banded.hpp"

#include "kaw/errors.hpp"

#include <lapacke.h>

#include <cmath>
#include <string>

namespace kaw {

BandMatrix::BandMatrix(std::size_t n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ab_(static_cast<std::size_t>(kl + ku + 1) * n, 0.0) {
  if (n == 0 || kl < 0 || ku < 0) throw InvalidArgument("BandMatrix: bad dimensions");
}

bool BandMatrix::in_band(std::size_t i, std::size_t j) const {
  const long d = static_cast<long>(i) - static_cast<long>(j);
  return i < n_ && j < n_ && d <= kl_ && -d <= ku_;
}

double BandMatrix::operator()(std::size_t i, std::size_t j) const {
  if (!in_band(i, j)) return 0.0;
  const std::size_t ld = static_cast<std::size_t>(kl_ + ku_ + 1);
  return ab_[j * ld + static_cast<std::size_t>(ku_) + i - j];
}

double& BandMatrix::at(std::size_t i, std::size_t j) {
  if (!in_band(i, j)) throw InvalidArgument("BandMatrix: entry outside band");
  const std::size_t ld = static_cast<std::size_t>(kl_ + ku_ + 1);
  return ab_[j * ld + static_cast<std::size_t>(ku_) + i - j];
}

std::vector<double> BandMatrix::multiply(const std::vector<double>& x) const {
  if (x.size() != n_) throw InvalidArgument("BandMatrix::multiply: size mismatch");
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > static_cast<std::size_t>(kl_) ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + static_cast<std::size_t>(ku_));
    double s = 0.0;
    for (std::size_t j = j0; j <= j1; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

BandMatrix BandMatrix::scaled_plus_identity(double c, double s) const {
  BandMatrix out = *this;
  for (double& v : out.ab_) v *= c;
  for (std::size_t i = 0; i < n_; ++i) out.at(i, i) += s;
  return out;
}

std::size_t BandMatrix::row_nonzeros(std::size_t i) const {
  std::size_t count = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    if (in_band(i, j) && (*this)(i, j) != 0.0) ++count;
  }
  return count;
}

BandedLU::BandedLU(const BandMatrix& a)
    : n_(a.size()), kl_(a.kl()), ku_(a.ku()), ipiv_(a.size()) {
  // dgbtrf needs kl extra rows above the band for fill-in.
  const std::size_t ld = static_cast<std::size_t>(2 * kl_ + ku_ + 1);
  lu_.assign(ld * n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) {
      if (a.in_band(i, j)) lu_[j * ld + static_cast<std::size_t>(kl_ + ku_) + i - j] = a(i, j);
    }
  }
  const lapack_int info =
      LAPACKE_dgbtrf(LAPACK_COL_MAJOR, static_cast<lapack_int>(n_), static_cast<lapack_int>(n_),
                     kl_, ku_, lu_.data(), static_cast<lapack_int>(ld), ipiv_.data());
  if (info != 0) {
    throw InvalidArgument("banded LU failed (dgbtrf info " + std::to_string(info) + ")");
  }
}

std::vector<double> BandedLU::solve(const std::vector<double>& b) const {
  if (b.size() != n_) throw InvalidArgument("BandedLU::solve: size mismatch");
  std::vector<double> x = b;
  const lapack_int ld = 2 * kl_ + ku_ + 1;
  const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(n_), kl_,
                                         ku_, 1, lu_.data(), ld, ipiv_.data(), x.data(),
                                         static_cast<lapack_int>(n_));
  if (info != 0) throw InvalidArgument("banded solve failed");
  return x;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

RankOneBandedSolver::RankOneBandedSolver(const BandMatrix& b, std::vector<double> u,
                                         std::vector<double> v)
    : lu_(b), v_(std::move(v)) {
  if (u.size() != b.size() || v_.size() != b.size()) {
    throw InvalidArgument("RankOneBandedSolver: size mismatch");
  }
  binv_u_ = lu_.solve(u);
  denom_ = 1.0 + dot(v_, binv_u_);
  if (!std::isfinite(denom_) || std::abs(denom_) < 1e-14) {
    throw InvalidArgument("rank-one update makes the system singular");
  }
}

std::vector<double> RankOneBandedSolver::solve(const std::vector<double>& r) const {
  std::vector<double> y = lu_.solve(r);
  const double c = dot(v_, y) / denom_;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= c * binv_u_[i];
  return y;
}

}  // namespace kaw
