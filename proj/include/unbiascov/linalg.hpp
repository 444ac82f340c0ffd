#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "unbiascov/errors.hpp"

namespace unbiascov::linalg {

// Dense square matrix, row major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t dim() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> data() const { return data_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

std::vector<double> multiply(const Matrix& m, std::span<const double> x);
double norm_1(const Matrix& m);

// PM = LU with partial pivoting plus a 1-norm reciprocal-condition estimate.
// Immutable after construction; concurrent solves are safe.
class Factorization {
 public:
  explicit Factorization(Matrix m);  // throws SingularMatrix on pivot breakdown

  std::size_t dim() const { return original_.dim(); }
  double rcond() const { return rcond_; }
  const Matrix& original() const { return original_; }

  // Solve Mx = b. Throws IllConditioned if rcond < 1e-12.
  // refine runs one step of iterative refinement on the residual.
  std::vector<double> solve(std::span<const double> b, bool refine = false) const;

  // Solve M^T x = b (same conditioning gate).
  std::vector<double> solve_transposed(std::span<const double> b) const;

 private:
  std::vector<double> substitute(std::span<const double> b) const;
  std::vector<double> substitute_transposed(std::span<const double> b) const;
  double estimate_inverse_norm_1() const;

  Matrix original_;
  Matrix lu_;
  std::vector<std::size_t> perm_;
  double rcond_ = 0.0;
};

inline Factorization factorize(Matrix m) { return Factorization(std::move(m)); }

}  // namespace unbiascov::linalg
