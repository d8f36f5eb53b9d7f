#include <cstdlib>
#include <cstring>
#include <vector>

#include "kernels_impl.hpp"

namespace nls::kernels {

bool openmp_available() {
#ifdef NLS_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

Backend default_backend() {
  const char* mode = std::getenv("NLS_SEED_DETERMINISM");
  if (mode != nullptr && std::strcmp(mode, "strict") == 0) return Backend::serial;
  return openmp_available() ? Backend::openmp : Backend::serial;
}

namespace serial {

using namespace detail;

void stiffness_apply(std::span<const double> cond, double robin, std::span<const double> u, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = flux_sum(cond, robin, u, i);
}

namespace {

template <class F>
double blocked_sum(std::size_t n, F&& term) {
  double total = 0.0;
  for (std::size_t b = 0; b < block_count(n); ++b) {
    double part = 0.0;
    const std::size_t end = std::min(n, (b + 1) * block);
    for (std::size_t i = b * block; i < end; ++i) part += term(i);
    total += part;
  }
  return total;
}

}  // namespace

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
  return blocked_sum(w.size(), [&](std::size_t i) { return w[i] * a[i] * b[i]; });
}

double weighted_sum(std::span<const double> w, std::span<const double> f) {
  return blocked_sum(w.size(), [&](std::size_t i) { return w[i] * f[i]; });
}

void nonlinearity(const NodeCoefficients& c, std::span<const double> u, std::span<double> g, std::span<double> dg) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    g[i] = g_at(c, i, u[i]);
    if (!dg.empty()) dg[i] = dg_at(c, i, u[i]);
  }
}

double potential_energy(const NodeCoefficients& c, std::span<const double> mass, std::span<const double> u) {
  return blocked_sum(u.size(), [&](std::size_t i) { return mass[i] * G_at(c, i, u[i]); });
}

void residual(double eps2, std::span<const double> cond, double robin, std::span<const double> mass,
              std::span<const double> V, std::span<const double> g, std::span<const double> u,
              std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = eps2 * flux_sum(cond, robin, u, i) / mass[i] + V[i] * u[i] - g[i];
}

}  // namespace serial
}  // namespace nls::kernels
