#include "nls/penalization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nls/error.hpp"

namespace nls {

double kappa_bound(const PenalizationParams& params, int N) {
  const double L = std::log(params.rho / params.rho0);
  if (N >= 3) return 0.25 * (N - 2.0) * (N - 2.0) * std::pow(L, 1.0 + params.beta);
  return 0.25 * std::pow(L, params.beta);
}

PenalizationParams select_params(const ProblemSpec& spec, double safety) {
  if (!(safety > 0.0 && safety < 1.0)) throw Error(Errc::config, "safety must lie in (0, 1)");
  const double inradius = spec.lambda.inradius_about_origin();
  if (!(inradius > 0.0)) throw Error(Errc::invalid_region, "Lambda contains no ball about the origin");
  PenalizationParams params;
  params.rho = 0.5 * inradius;
  params.rho0 = params.rho / std::exp(1.0);
  params.beta = 1.0;
  params.kappa = safety * kappa_bound(params, spec.N);
  return params;
}

void validate_params(const PenalizationParams& params, const DomainLambda& region, int N) {
  if (!(params.rho0 > 0.0) || !(params.rho > params.rho0))
    throw Error(Errc::config, "penalization needs 0 < rho0 < rho");
  if (!(params.beta > 0.0)) throw Error(Errc::config, "penalization needs beta > 0");
  if (!(params.kappa >= 0.0)) throw Error(Errc::config, "penalization needs kappa >= 0");
  if (!(params.rho < region.inradius_about_origin()))
    throw Error(Errc::invalid_region, "closed ball B(0, rho) must lie inside Lambda");
  const double bound = kappa_bound(params, N);
  if (!(params.kappa < bound))
    throw Error(Errc::form_not_positive, "kappa = " + std::to_string(params.kappa) +
                                             " is not below the bound " + std::to_string(bound));
}

double hardy_potential(const PenalizationParams& params, const DomainLambda& region, int N, double r) {
  if (region.contains(r)) return 0.0;
  if (r <= params.rho0)
    throw Error(Errc::inconsistent_region, "point outside Lambda lies within rho0 of the origin");
  const double L = std::log(r / params.rho0);
  return params.kappa / (r * r * std::pow(L, log_exponent(params, N)));
}

namespace {

struct NodeData {
  double K;
  double e2h;
  bool inside;
};

NodeData node_data(const ProblemSpec& spec, const PenalizationParams& params, double eps, double r) {
  const bool inside = spec.lambda.contains(r);
  const double e2h = inside ? 0.0 : eps * eps * hardy_potential(params, spec.lambda, spec.N, r);
  return {spec.K(r), e2h, inside};
}

}  // namespace

double g_eps(const ProblemSpec& spec, const PenalizationParams& params, double eps, double r, double s) {
  if (s < 0.0) throw Error(Errc::domain, "g_eps is defined for s >= 0");
  const NodeData d = node_data(spec, params, eps, r);
  return pointwise::g(d.K, d.e2h, d.inside, spec.p, s);
}

double G_eps(const ProblemSpec& spec, const PenalizationParams& params, double eps, double r, double s) {
  if (s < 0.0) throw Error(Errc::domain, "G_eps is defined for s >= 0");
  const NodeData d = node_data(spec, params, eps, r);
  return pointwise::G(d.K, d.e2h, d.inside, spec.p, s);
}

GPropertyReport verify_g_properties(const ProblemSpec& spec, const PenalizationParams& params, double eps,
                                    std::span<const GSample> samples) {
  GPropertyReport rep;
  const double p = spec.p;
  constexpr double tol = 1e-12;
  auto fail = [&rep](bool& flag, const char* what, const GSample& x, double lhs, double rhs) {
    flag = false;
    rep.violations.push_back({what, x.r, x.s, lhs, rhs});
  };
  // a <= b up to roundoff relative to the larger magnitude
  auto le = [](double a, double b) { return a <= b + tol * std::max({std::abs(a), std::abs(b), 1e-300}); };

  for (const GSample& x : samples) {
    ++rep.checked;
    const NodeData d = node_data(spec, params, eps, x.r);
    const double s = x.s;
    const double gv = pointwise::g(d.K, d.e2h, d.inside, p, s);
    const double Gv = pointwise::G(d.K, d.e2h, d.inside, p, s);
    const double sg = s * gv;
    if (d.inside) {
      if (!le(0.0, Gv)) fail(rep.g3, "g3: G >= 0", x, 0.0, Gv);
      if (!le((p + 1.0) * Gv, sg)) fail(rep.g3, "g3: (p+1)G <= s g", x, (p + 1.0) * Gv, sg);
    } else {
      if (!le(0.0, Gv)) fail(rep.g4, "g4: G >= 0", x, 0.0, Gv);
      if (!le(2.0 * Gv, sg)) fail(rep.g4, "g4: 2G <= s g", x, 2.0 * Gv, sg);
      if (!le(sg, d.e2h * s * s)) fail(rep.g4, "g4: s g <= eps^2 H s^2", x, sg, d.e2h * s * s);
    }

    // g/s -> 0 at the origin and g/s^p stays bounded at infinity, sampled
    const auto ratio0 = [&](double t) { return pointwise::g(d.K, d.e2h, d.inside, p, t) / t; };
    const auto ratioinf = [&](double t) { return pointwise::g(d.K, d.e2h, d.inside, p, t) / std::pow(t, p); };
    const double a = ratio0(1e-6);
    const double b = ratio0(1e-4);
    if (!le(a, b) || !(a <= std::max(d.K, 1.0) * std::pow(1e-6, std::min(p - 1.0, 1.0))))
      fail(rep.g1, "g1: g/s -> 0", x, a, b);
    const double c = ratioinf(1e2);
    const double e = ratioinf(1e4);
    if (!le(e, c) || !std::isfinite(c)) fail(rep.g2, "g2: g/s^p bounded", x, e, c);
  }
  return rep;
}

namespace {

// C^2 profile: 1 for t <= 0, sqrt(t) for t >= 1, quintic bridge between.
double theta_dd_ratio(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 0.25 / (t * t);
  const double th = 1.0 - 2.125 * t * t * t + 3.75 * t * t * t * t - 1.625 * t * t * t * t * t;
  const double thdd = -12.75 * t + 45.0 * t * t - 32.5 * t * t * t;
  return std::max(-thdd, 0.0) / th;
}

}  // namespace

PlanarEpsReport planar_eps_constraint(const ProblemSpec& spec, const PenalizationParams& params, double eps) {
  double c_prime = 0.0;
  constexpr int n = 20000;
  for (int k = 0; k <= n; ++k) c_prime = std::max(c_prime, theta_dd_ratio(static_cast<double>(k) / n));
  const double L = std::log(params.rho / params.rho0);
  PlanarEpsReport rep;
  rep.C = c_prime / (params.rho0 * params.rho0 * L * L);
  rep.inf_V = minimize_on_region(DomainLambda::ball(params.rho), [&spec](double r) { return spec.V(r); }).value;
  rep.eps_max = rep.inf_V > 0.0 ? std::sqrt(rep.inf_V / rep.C) : 0.0;
  rep.satisfied = eps * eps * rep.C <= rep.inf_V;
  return rep;
}

}  // namespace nls
