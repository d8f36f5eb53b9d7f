#pragma once

#include <cstddef>
#include <span>

#include "nls/kernels.hpp"
#include "nls/penalization.hpp"

namespace nls::kernels::detail {

inline double flux_sum(std::span<const double> cond, double robin, std::span<const double> u, std::size_t i) {
  const std::size_t n = u.size();
  double s = 0.0;
  if (i > 0) s += cond[i - 1] * (u[i] - u[i - 1]);
  if (i + 1 < n) s += cond[i] * (u[i] - u[i + 1]);
  else s += robin * u[i];
  return s;
}

inline double g_at(const NodeCoefficients& c, std::size_t i, double s) {
  return pointwise::g(c.K[i], c.e2h[i], c.inside[i] != 0, c.p, s);
}

inline double dg_at(const NodeCoefficients& c, std::size_t i, double s) {
  return pointwise::dg(c.K[i], c.e2h[i], c.inside[i] != 0, c.p, s);
}

inline double G_at(const NodeCoefficients& c, std::size_t i, double s) {
  return pointwise::G(c.K[i], c.e2h[i], c.inside[i] != 0, c.p, s);
}

inline std::size_t block_count(std::size_t n) { return (n + block - 1) / block; }

}  // namespace nls::kernels::detail
