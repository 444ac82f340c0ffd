#include "unbiascov/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "unbiascov/summation.hpp"

namespace unbiascov::linalg {

namespace {
constexpr double kRcondFloor = 1e-12;
constexpr double kPivotRelTolerance = 1e-14;
}  // namespace

std::vector<double> multiply(const Matrix& m, std::span<const double> x) {
  if (x.size() != m.dim()) throw LengthMismatch("matrix multiply: dimension mismatch");
  std::vector<double> y(m.dim(), 0.0);
  for (std::size_t i = 0; i < m.dim(); ++i) {
    CompensatedSum row;
    for (std::size_t j = 0; j < m.dim(); ++j) row.add(m(i, j) * x[j]);
    y[i] = row.value();
  }
  return y;
}

double norm_1(const Matrix& m) {
  double norm = 0.0;
  for (std::size_t j = 0; j < m.dim(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) col += std::abs(m(i, j));
    norm = std::max(norm, col);
  }
  return norm;
}

Factorization::Factorization(Matrix m) : original_(std::move(m)), lu_(original_), perm_(original_.dim()) {
  const std::size_t n = lu_.dim();
  if (n == 0) throw InvalidData("factorize: empty matrix");
  for (std::size_t i = 0; i < n * n; ++i) {
    if (!std::isfinite(original_.data()[i])) throw InvalidData("factorize: nonfinite entry");
  }
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});

  double max_abs = 0.0;
  for (double v : original_.data()) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs == 0.0) throw SingularMatrix("factorize: zero matrix");
  const double pivot_tolerance = kPivotRelTolerance * max_abs;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot_row = col;
    double pivot_mag = std::abs(lu_(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double mag = std::abs(lu_(r, col));
      if (mag > pivot_mag) {
        pivot_mag = mag;
        pivot_row = r;
      }
    }
    if (!(pivot_mag > pivot_tolerance)) {
      throw SingularMatrix("factorize: pivot " + std::to_string(pivot_mag) + " below tolerance at column " +
                           std::to_string(col));
    }
    if (pivot_row != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(col, j), lu_(pivot_row, j));
      std::swap(perm_[col], perm_[pivot_row]);
    }
    const double pivot = lu_(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = lu_(r, col) / pivot;
      lu_(r, col) = factor;
      for (std::size_t j = col + 1; j < n; ++j) lu_(r, j) -= factor * lu_(col, j);
    }
  }

  const double inv_norm = estimate_inverse_norm_1();
  const double norm = norm_1(original_);
  rcond_ = (inv_norm > 0.0) ? 1.0 / (norm * inv_norm) : 0.0;
  rcond_ = std::min(rcond_, 1.0);
}

std::vector<double> Factorization::substitute(std::span<const double> b) const {
  const std::size_t n = lu_.dim();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  // Ly = Pb, unit lower triangle.
  for (std::size_t i = 1; i < n; ++i) {
    CompensatedSum acc;
    acc.add(x[i]);
    for (std::size_t j = 0; j < i; ++j) acc.add(-lu_(i, j) * x[j]);
    x[i] = acc.value();
  }
  // Ux = y.
  for (std::size_t ii = n; ii-- > 0;) {
    CompensatedSum acc;
    acc.add(x[ii]);
    for (std::size_t j = ii + 1; j < n; ++j) acc.add(-lu_(ii, j) * x[j]);
    x[ii] = acc.value() / lu_(ii, ii);
  }
  return x;
}

std::vector<double> Factorization::substitute_transposed(std::span<const double> b) const {
  // M^T = U^T L^T P, so solve U^T y = b, L^T w = y, then undo the permutation.
  const std::size_t n = lu_.dim();
  std::vector<double> y(b.begin(), b.end());
  // U^T is lower triangular with the U diagonal.
  for (std::size_t i = 0; i < n; ++i) {
    CompensatedSum acc;
    acc.add(y[i]);
    for (std::size_t j = 0; j < i; ++j) acc.add(-lu_(j, i) * y[j]);
    y[i] = acc.value() / lu_(i, i);
  }
  // L^T is unit upper triangular.
  for (std::size_t ii = n; ii-- > 0;) {
    CompensatedSum acc;
    acc.add(y[ii]);
    for (std::size_t j = ii + 1; j < n; ++j) acc.add(-lu_(j, ii) * y[j]);
    y[ii] = acc.value();
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = y[i];
  return x;
}

double Factorization::estimate_inverse_norm_1() const {
  // Hager's power method on ||M^{-1}||_1 (a handful of solves).
  const std::size_t n = lu_.dim();
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  double estimate = 0.0;
  for (int iteration = 0; iteration < 5; ++iteration) {
    const std::vector<double> y = substitute(x);
    double norm = 0.0;
    for (double v : y) norm += std::abs(v);
    estimate = std::max(estimate, norm);

    std::vector<double> sign(n);
    for (std::size_t i = 0; i < n; ++i) sign[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
    const std::vector<double> z = substitute_transposed(sign);

    std::size_t best = 0;
    double best_mag = 0.0;
    CompensatedSum zx;
    for (std::size_t i = 0; i < n; ++i) {
      zx.add(z[i] * x[i]);
      if (std::abs(z[i]) > best_mag) {
        best_mag = std::abs(z[i]);
        best = i;
      }
    }
    if (best_mag <= zx.value()) break;
    std::fill(x.begin(), x.end(), 0.0);
    x[best] = 1.0;
  }
  return estimate;
}

std::vector<double> Factorization::solve(std::span<const double> b, bool refine) const {
  if (b.size() != dim()) throw LengthMismatch("solve: right-hand side dimension mismatch");
  if (rcond_ < kRcondFloor) {
    throw IllConditioned("solve: reciprocal condition estimate " + std::to_string(rcond_) +
                         " below 1e-12");
  }
  std::vector<double> x = substitute(b);
  if (refine) {
    std::vector<double> residual(dim());
    const std::vector<double> mx = multiply(original_, x);
    for (std::size_t i = 0; i < dim(); ++i) residual[i] = b[i] - mx[i];
    const std::vector<double> delta = substitute(residual);
    for (std::size_t i = 0; i < dim(); ++i) x[i] += delta[i];
  }
  return x;
}

std::vector<double> Factorization::solve_transposed(std::span<const double> b) const {
  if (b.size() != dim()) throw LengthMismatch("solve_transposed: dimension mismatch");
  if (rcond_ < kRcondFloor) {
    throw IllConditioned("solve_transposed: reciprocal condition estimate " + std::to_string(rcond_) +
                         " below 1e-12");
  }
  return substitute_transposed(b);
}

}  // namespace unbiascov::linalg
