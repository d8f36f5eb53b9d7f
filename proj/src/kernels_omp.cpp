#include <vector>

#include "kernels_impl.hpp"

#ifdef NLS_HAVE_OPENMP
#include <omp.h>
#endif

namespace nls::kernels::omp {

using namespace detail;

namespace {

// below this the fork/join costs more than the loop
constexpr std::ptrdiff_t min_parallel = 4096;

template <class F>
double blocked_sum(std::size_t n, F&& term) {
  const auto nb = static_cast<std::ptrdiff_t>(block_count(n));
  std::vector<double> parts(static_cast<std::size_t>(nb), 0.0);
#pragma omp parallel for schedule(static) if (static_cast<std::ptrdiff_t>(n) > min_parallel)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    double part = 0.0;
    const std::size_t end = std::min(n, static_cast<std::size_t>(b + 1) * block);
    for (std::size_t i = static_cast<std::size_t>(b) * block; i < end; ++i) part += term(i);
    parts[static_cast<std::size_t>(b)] = part;
  }
  double total = 0.0;
  for (double part : parts) total += part;
  return total;
}

}  // namespace

void stiffness_apply(std::span<const double> cond, double robin, std::span<const double> u, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static) if (n > min_parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = flux_sum(cond, robin, u, static_cast<std::size_t>(i));
}

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
  return blocked_sum(w.size(), [&](std::size_t i) { return w[i] * a[i] * b[i]; });
}

double weighted_sum(std::span<const double> w, std::span<const double> f) {
  return blocked_sum(w.size(), [&](std::size_t i) { return w[i] * f[i]; });
}

void nonlinearity(const NodeCoefficients& c, std::span<const double> u, std::span<double> g, std::span<double> dg) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  const bool with_dg = !dg.empty();
#pragma omp parallel for schedule(static) if (n > min_parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    g[i] = g_at(c, i, u[i]);
    if (with_dg) dg[i] = dg_at(c, i, u[i]);
  }
}

double potential_energy(const NodeCoefficients& c, std::span<const double> mass, std::span<const double> u) {
  return blocked_sum(u.size(), [&](std::size_t i) { return mass[i] * G_at(c, i, u[i]); });
}

void residual(double eps2, std::span<const double> cond, double robin, std::span<const double> mass,
              std::span<const double> V, std::span<const double> g, std::span<const double> u,
              std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static) if (n > min_parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    out[i] = eps2 * flux_sum(cond, robin, u, i) / mass[i] + V[i] * u[i] - g[i];
  }
}

}  // namespace nls::kernels::omp
