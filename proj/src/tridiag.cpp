#include "nls/tridiag.hpp"

#include <cmath>
#include <utility>

#include "nls/error.hpp"

namespace nls {

std::vector<double> Tridiagonal::apply(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += lower[i - 1] * x[i - 1];
    if (i + 1 < n) s += upper[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

std::vector<double> solve_tridiagonal(const Tridiagonal& A, std::span<const double> b) {
  const std::size_t n = A.size();
  if (b.size() != n) throw Error(Errc::precondition, "tridiagonal right-hand side has the wrong size");
  if (n == 0) return {};
  // row i holds d[i] on the diagonal, u1[i], u2[i] on the two superdiagonals after pivoting
  std::vector<double> d(A.diag);
  std::vector<double> u1(n, 0.0);
  std::vector<double> u2(n, 0.0);
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i + 1 < n; ++i) u1[i] = A.upper[i];
  std::vector<double> sub(A.lower);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    double next_d = d[i + 1];
    double next_u1 = i + 2 < n ? u1[i + 1] : 0.0;
    if (std::abs(sub[i]) > std::abs(d[i])) {
      // swap rows i and i+1
      const double f = d[i] / sub[i];
      d[i] = sub[i];
      const double old_u1 = u1[i];
      u1[i] = next_d;
      u2[i] = next_u1;
      std::swap(x[i], x[i + 1]);
      d[i + 1] = old_u1 - f * next_d;
      if (i + 2 < n) u1[i + 1] = -f * next_u1;
      x[i + 1] -= f * x[i];
    } else {
      if (d[i] == 0.0) throw Error(Errc::precondition, "singular tridiagonal matrix");
      const double f = sub[i] / d[i];
      u2[i] = 0.0;
      d[i + 1] = next_d - f * u1[i];
      x[i + 1] -= f * x[i];
    }
  }
  if (d[n - 1] == 0.0) throw Error(Errc::precondition, "singular tridiagonal matrix");
  x[n - 1] /= d[n - 1];
  if (n >= 2) x[n - 2] = (x[n - 2] - u1[n - 2] * x[n - 1]) / d[n - 2];
  for (std::size_t k = n >= 2 ? n - 2 : 0; k-- > 0;) x[k] = (x[k] - u1[k] * x[k + 1] - u2[k] * x[k + 2]) / d[k];
  return x;
}

}  // namespace nls
