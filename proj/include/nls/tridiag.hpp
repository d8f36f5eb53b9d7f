#pragma once

#include <span>
#include <vector>

namespace nls {

/// General tridiagonal matrix: lower[i] = A(i+1, i), diag[i] = A(i, i), upper[i] = A(i, i+1).
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  explicit Tridiagonal(std::size_t n = 0) : lower(n ? n - 1 : 0), diag(n), upper(n ? n - 1 : 0) {}
  std::size_t size() const noexcept { return diag.size(); }

  std::vector<double> apply(std::span<const double> x) const;
};

/// Solves A x = b by Gaussian elimination with partial pivoting (the matrix need not be definite).
/// Throws precondition on an exactly singular pivot.
std::vector<double> solve_tridiagonal(const Tridiagonal& A, std::span<const double> b);

}  // namespace nls
