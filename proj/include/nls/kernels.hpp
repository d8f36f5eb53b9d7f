#pragma once

#include <cstddef>
#include <span>

namespace nls::kernels {

// Nodal kernels behind the radial solver. Each exists as a plain loop (serial) and an
// OpenMP loop; reductions sum fixed blocks of `block` entries and then add the block
// partials in order, so both backends return bit-identical results for any thread count.

enum class Backend { serial, openmp };

inline constexpr std::size_t block = 1024;

/// openmp, unless NLS_SEED_DETERMINISM=strict or OpenMP is unavailable.
Backend default_backend();
bool openmp_available();

struct NodeCoefficients {
  std::span<const double> K;
  std::span<const double> e2h;  // eps^2 H
  std::span<const unsigned char> inside;
  double p = 2.0;
};

#define NLS_KERNEL_DECLS                                                                                  \
  void stiffness_apply(std::span<const double> cond, double robin, std::span<const double> u,            \
                       std::span<double> out);                                                           \
  double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b);  \
  double weighted_sum(std::span<const double> w, std::span<const double> f);                             \
  void nonlinearity(const NodeCoefficients& c, std::span<const double> u, std::span<double> g,           \
                    std::span<double> dg);                                                               \
  double potential_energy(const NodeCoefficients& c, std::span<const double> mass,                       \
                          std::span<const double> u);                                                    \
  void residual(double eps2, std::span<const double> cond, double robin, std::span<const double> mass,   \
                std::span<const double> V, std::span<const double> g, std::span<const double> u,         \
                std::span<double> out);

namespace serial {
NLS_KERNEL_DECLS
}
namespace omp {
NLS_KERNEL_DECLS
}

#undef NLS_KERNEL_DECLS

// out_i = sum of edge fluxes c_e (u_i - u_j) over the edges at node i, plus robin * u_n at the end.
inline void stiffness_apply(Backend b, std::span<const double> cond, double robin, std::span<const double> u,
                            std::span<double> out) {
  b == Backend::openmp ? omp::stiffness_apply(cond, robin, u, out) : serial::stiffness_apply(cond, robin, u, out);
}

// sum w_i a_i b_i
inline double weighted_dot(Backend b, std::span<const double> w, std::span<const double> x,
                           std::span<const double> y) {
  return b == Backend::openmp ? omp::weighted_dot(w, x, y) : serial::weighted_dot(w, x, y);
}

inline double weighted_sum(Backend b, std::span<const double> w, std::span<const double> f) {
  return b == Backend::openmp ? omp::weighted_sum(w, f) : serial::weighted_sum(w, f);
}

// g and, when dg is nonempty, its branch derivative at every node
inline void nonlinearity(Backend b, const NodeCoefficients& c, std::span<const double> u, std::span<double> g,
                         std::span<double> dg) {
  b == Backend::openmp ? omp::nonlinearity(c, u, g, dg) : serial::nonlinearity(c, u, g, dg);
}

// sum M_i G(u_i)
inline double potential_energy(Backend b, const NodeCoefficients& c, std::span<const double> mass,
                               std::span<const double> u) {
  return b == Backend::openmp ? omp::potential_energy(c, mass, u) : serial::potential_energy(c, mass, u);
}

// out_i = (eps2 (S u)_i + M_i (V_i u_i - g_i)) / M_i
inline void residual(Backend b, double eps2, std::span<const double> cond, double robin,
                     std::span<const double> mass, std::span<const double> V, std::span<const double> g,
                     std::span<const double> u, std::span<double> out) {
  b == Backend::openmp ? omp::residual(eps2, cond, robin, mass, V, g, u, out)
                       : serial::residual(eps2, cond, robin, mass, V, g, u, out);
}

}  // namespace nls::kernels
