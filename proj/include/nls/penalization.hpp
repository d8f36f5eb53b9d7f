#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "nls/problem.hpp"

namespace nls {

struct PenalizationParams {
  double kappa = 0.0;
  double beta = 1.0;
  double rho0 = 0.0;
  double rho = 0.0;

  bool operator==(const PenalizationParams&) const = default;
};

/// Largest admissible kappa for the given beta, rho0, rho (strict bound).
double kappa_bound(const PenalizationParams& params, int N);

/// Exponent on the logarithm in H: 1 + beta for N >= 3, 2 + beta in the plane.
inline double log_exponent(const PenalizationParams& params, int N) {
  return N >= 3 ? 1.0 + params.beta : 2.0 + params.beta;
}

/// rho = half the inradius, rho0 = rho / e, beta = 1, kappa = safety * bound.
PenalizationParams select_params(const ProblemSpec& spec, double safety = 0.5);

/// Throws config on malformed params, invalid_region when B(0, rho) is not inside the
/// region, and form_not_positive when kappa reaches the bound.
void validate_params(const PenalizationParams& params, const DomainLambda& region, int N);

double hardy_potential(const PenalizationParams& params, const DomainLambda& region, int N, double r);

namespace pointwise {

// Nodal nonlinearity with the node data already evaluated: K, e2h = eps^2 H, inside = chi_Lambda.
// Negative s is treated as zero.

inline double g(double K, double e2h, bool inside, double p, double s) {
  if (s <= 0.0 || K <= 0.0) return 0.0;
  const double ksp1 = K * std::pow(s, p - 1.0);
  if (inside) return ksp1 * s;
  return std::min(e2h, ksp1) * s;
}

inline double dg(double K, double e2h, bool inside, double p, double s) {
  if (s <= 0.0 || K <= 0.0) return 0.0;
  const double ksp1 = K * std::pow(s, p - 1.0);
  if (inside || ksp1 < e2h) return p * ksp1;
  return e2h;
}

inline double G(double K, double e2h, bool inside, double p, double s) {
  if (s <= 0.0 || K <= 0.0) return 0.0;
  if (inside) return K * std::pow(s, p + 1.0) / (p + 1.0);
  if (e2h <= 0.0) return 0.0;
  // threshold s* = (e2h / K)^(1/(p-1)), kept as a logarithm
  const double log_star = (std::log(e2h) - std::log(K)) / (p - 1.0);
  if (std::log(s) <= log_star) return K * std::pow(s, p + 1.0) / (p + 1.0);
  const double star2 = std::exp(2.0 * log_star);
  return e2h * star2 / (p + 1.0) + 0.5 * e2h * (s * s - star2);
}

}  // namespace pointwise

/// g_eps(r, s); throws domain for s < 0.
double g_eps(const ProblemSpec& spec, const PenalizationParams& params, double eps, double r, double s);
/// Closed-form antiderivative of g_eps in s.
double G_eps(const ProblemSpec& spec, const PenalizationParams& params, double eps, double r, double s);

struct GSample {
  double r = 0.0;
  double s = 0.0;
};

struct GViolation {
  std::string property;
  double r = 0.0;
  double s = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct GPropertyReport {
  bool g1 = true;
  bool g2 = true;
  bool g3 = true;
  bool g4 = true;
  std::size_t checked = 0;
  std::vector<GViolation> violations;

  bool ok() const noexcept { return g1 && g2 && g3 && g4; }
};

GPropertyReport verify_g_properties(const ProblemSpec& spec, const PenalizationParams& params, double eps,
                                    std::span<const GSample> samples);

/// Planar form constraint eps^2 C <= inf_{B(0, rho)} V.
struct PlanarEpsReport {
  double C = 0.0;
  double inf_V = 0.0;
  double eps_max = 0.0;
  bool satisfied = false;
};

PlanarEpsReport planar_eps_constraint(const ProblemSpec& spec, const PenalizationParams& params, double eps);

}  // namespace nls
