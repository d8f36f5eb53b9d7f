#include "nls/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nls/error.hpp"
#include "nls/tridiag.hpp"
#include "nls/verify.hpp"

namespace nls {

MinimalSolution minimal_solution_w(const PenalizationParams& params, const DomainLambda& region, int N,
                                   GridPtr grid) {
  if (!region.is_ball()) throw Error(Errc::precondition, "minimal solution needs a ball region");
  if (N < 2) throw Error(Errc::dimension_unsupported, "minimal solution needs N >= 2");
  if (!grid || grid->dim() != N) throw Error(Errc::precondition, "grid dimension differs from N");
  validate_params(params, region, N);

  const auto& r = grid->r();
  const auto& m = grid->mass();
  const auto& c = grid->conductance();
  const std::size_t n = r.size();
  const double RL = region.r2;
  const std::size_t k0 = grid->lower_index(RL);
  if (k0 + 3 >= n) throw Error(Errc::geometry, "grid ends too close to the region boundary");

  const double wb = N >= 3 ? std::pow(RL / r[k0], N - 2.0) : 1.0;
  const std::size_t unknowns = n - 1 - k0;
  Tridiagonal T(unknowns);
  std::vector<double> rhs(unknowns, 0.0);
  for (std::size_t j = 0; j < unknowns; ++j) {
    const std::size_t i = k0 + 1 + j;
    const double H = hardy_potential(params, region, N, r[i]);
    T.diag[j] = c[i - 1] + (i + 1 < n ? c[i] : grid->far_field_coupling()) - m[i] * H;
    if (j > 0) T.lower[j - 1] = -c[i - 1];
    if (i + 1 < n) T.upper[j] = -c[i];
  }
  rhs[0] = c[k0] * wb;
  std::vector<double> x = solve_tridiagonal(T, rhs);
  // two rounds of refinement with the residual in extended precision
  for (int round = 0; round < 2; ++round) {
    std::vector<double> res(unknowns);
    for (std::size_t j = 0; j < unknowns; ++j) {
      long double a = static_cast<long double>(rhs[j]) - static_cast<long double>(T.diag[j]) * x[j];
      if (j > 0) a -= static_cast<long double>(T.lower[j - 1]) * x[j - 1];
      if (j + 1 < unknowns) a -= static_cast<long double>(T.upper[j]) * x[j + 1];
      res[j] = static_cast<double>(a);
    }
    const std::vector<double> dx = solve_tridiagonal(T, res);
    for (std::size_t j = 0; j < unknowns; ++j) x[j] += dx[j];
  }

  MinimalSolution out;
  std::vector<double> w(n, 1.0);
  w[k0] = wb;
  std::copy(x.begin(), x.end(), w.begin() + static_cast<std::ptrdiff_t>(k0 + 1));
  out.c = std::numeric_limits<double>::infinity();
  out.C = 0.0;
  for (std::size_t i = k0; i < n; ++i) {
    const double s = w[i] * std::pow(r[i], N - 2.0);
    out.c = std::min(out.c, s);
    out.C = std::max(out.C, s);
  }
  const double h1 = r[k0 + 1] - r[k0];
  const double h2 = r[k0 + 2] - r[k0];
  out.boundary_slope = -(h1 + h2) / (h1 * h2) * w[k0] + h2 / (h1 * (h2 - h1)) * w[k0 + 1] -
                       h1 / (h2 * (h2 - h1)) * w[k0 + 2];
  out.boundary_radius = RL;
  out.w = RadialField(std::move(grid), std::move(w));
  return out;
}

SupersolutionValue supersolution_W(const PenalizationParams& params, int N, double r) {
  if (!(r > params.rho0)) throw Error(Errc::domain, "supersolution needs |x| > rho0");
  if (N < 2) throw Error(Errc::dimension_unsupported, "supersolution needs N >= 2");
  const double L = std::log(r / params.rho0);
  const double b = params.beta;
  const double k = params.kappa;
  SupersolutionValue out;
  if (N >= 3) {
    const double rN = std::pow(r, N);
    out.value = std::pow(r, 2.0 - N) * ((N - 2.0) * b - k * std::pow(L, -b));
    out.minus_laplacian = k * (N - 2.0) * b / (rN * std::pow(L, 1.0 + b)) + k * b * (b + 1.0) / (rN * std::pow(L, 2.0 + b));
    const double H = k / (r * r * std::pow(L, 1.0 + b));
    out.residual = out.minus_laplacian - H * out.value;
  } else {
    out.value = b * (b + 1.0) - k * std::pow(L, -b);
    out.minus_laplacian = k * b * (b + 1.0) / (r * r * std::pow(L, b + 2.0));
    const double H = k / (r * r * std::pow(L, 2.0 + b));
    out.residual = out.minus_laplacian - H * out.value;
  }
  return out;
}

double log_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

namespace {

double smoothstep5(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

// positive C^2 extension of w into the region: 1 deeper than r_bar, blended to the harmonic
// continuation of w across the boundary
struct Extension {
  int N;
  double RL;
  double r_bar;
  double a;
  double b;

  double inner(double r) const { return N >= 3 ? a + b * std::pow(r, 2.0 - N) : a + b * std::log(r); }

  double operator()(double r) const {
    if (r <= RL - r_bar) return 1.0;
    const double s = smoothstep5((RL - r) / r_bar);
    return s + (1.0 - s) * inner(r);
  }
};

Extension make_extension(const MinimalSolution& ms, int N, double r_bar) {
  const double R = ms.boundary_radius;
  const double d = ms.boundary_slope;
  Extension e{N, R, r_bar, 0.0, 0.0};
  if (N >= 3) {
    e.b = d * std::pow(R, N - 1.0) / (2.0 - N);
    e.a = 1.0 - e.b * std::pow(R, 2.0 - N);
  } else {
    e.b = d * R;
    e.a = 1.0 - e.b * std::log(R);
  }
  return e;
}

}  // namespace

BarrierFamily barrier_W_eps(const ProblemSpec& spec, const PenalizationParams& params, double eps, double x_eps,
                            double R, GridPtr grid, const BarrierOptions& opt) {
  if (x_eps != 0.0) throw Error(Errc::precondition, "barrier is built about the origin only");
  if (!spec.lambda.is_ball()) throw Error(Errc::precondition, "barrier needs a ball region");
  if (!(opt.nu > 0.0 && opt.nu < 1.0)) throw Error(Errc::precondition, "nu must lie in (0, 1)");
  if (!(eps > 0.0) || !(R > 0.0)) throw Error(Errc::precondition, "barrier needs eps > 0 and R > 0");
  const int N = spec.N;
  const double inf_V = minimize_on_region(spec.lambda, [&spec](double r) { return spec.V(r); }).value;
  const double cap = (1.0 - opt.nu) * inf_V;
  const double mu = opt.mu > 0.0 ? opt.mu : 0.9 * std::sqrt(cap);
  if (!(mu * mu < cap)) throw Error(Errc::precondition, "mu^2 must stay below (1 - nu) inf V");
  const double dist = spec.lambda.distance_to_complement(x_eps);
  const double r_bar = opt.r_bar > 0.0 ? opt.r_bar : 0.4 * dist;
  if (!(2.0 * r_bar < dist)) throw Error(Errc::geometry, "B(x_eps, 2 r_bar) must lie inside the region");
  if (!(eps * R < r_bar)) throw Error(Errc::geometry, "eps R reaches the gluing radius");

  const MinimalSolution ms = minimal_solution_w(params, spec.lambda, N, grid);
  const Extension ext = make_extension(ms, N, r_bar);
  const double RL = spec.lambda.r2;
  const double log_norm = log_cosh(mu * (r_bar / eps - R));
  const auto& r = grid->r();
  const std::size_t n = r.size();

  BarrierFamily out;
  out.eps = eps;
  out.x_eps = x_eps;
  out.mu = mu;
  out.nu = opt.nu;
  out.r_bar = r_bar;
  out.R = R;
  out.delta0 = delta_zero(spec, opt.nu);

  const auto log_inner = [&](double d) { return log_cosh(mu * (r_bar - d) / eps); };
  std::vector<double> lw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = r[i];
    double v;
    if (d <= r_bar) v = log_inner(d);
    else if (d < RL) v = std::log(ext(d));
    else v = std::log(ms.w[i]);
    lw[i] = v - log_norm;
  }
  std::vector<double> W(n);
  for (std::size_t i = 0; i < n; ++i) W[i] = std::exp(lw[i]);
  out.log_field = RadialField(grid, lw);
  out.field = RadialField(grid, std::move(W));

  // residual / W from log differences so nothing underflows
  const auto& c = grid->conductance();
  const auto& m = grid->mass();
  const double e2 = eps * eps;
  const std::size_t k0 = grid->lower_index(RL);
  // W_j / W_i - 1, from w itself outside the region where the logs would cost digits
  const auto rel = [&](std::size_t j, std::size_t i) -> long double {
    if (i >= k0 && j >= k0)
      return (static_cast<long double>(ms.w[j]) - ms.w[i]) / static_cast<long double>(ms.w[i]);
    return std::expm1(lw[j] - lw[i]);
  };
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (r[i] < eps * R) continue;
    long double flux = 0.0L;
    if (i > 0) flux -= c[i - 1] * rel(i - 1, i);
    if (i + 1 < n) flux -= c[i] * rel(i + 1, i);
    else flux += grid->far_field_coupling();
    const double H = hardy_potential(params, spec.lambda, N, r[i]);
    const double res = e2 * (flux / m[i] - H) + (1.0 - opt.nu) * spec.V(r[i]);
    worst = std::min(worst, res);
  }
  out.min_residual = worst;

  const double dl = 1e-4 * r_bar;
  const auto outer = [&](double d) { return std::log(ext(d)); };
  const double left = (3.0 * log_inner(r_bar) - 4.0 * log_inner(r_bar - dl) + log_inner(r_bar - 2.0 * dl)) / (2.0 * dl);
  const double right = (-3.0 * outer(r_bar) + 4.0 * outer(r_bar + dl) - outer(r_bar + 2.0 * dl)) / (2.0 * dl);
  out.gluing_jump = right - left;

  const EnvelopeFit fit = decay_envelope_fit_log(*grid, out.log_field.values, x_eps, eps, R);
  out.lambda_fit = fit.lambda;
  out.C_fit = fit.C;
  return out;
}

double choose_barrier_radius(const RadialField& u, double x_eps, double eps, double delta0) {
  const auto& r = u.grid->r();
  std::size_t k = u.size();
  for (std::size_t i = u.size(); i-- > 0;) {
    if (u[i] > delta0) break;
    k = i;
  }
  if (k == u.size()) throw Error(Errc::precondition, "u exceeds delta0 at the last node");
  return std::max(std::abs(r[k] - x_eps), 0.0) / eps;
}

ComparisonReport comparison_check(const RadialField& u, const BarrierFamily& barrier, const ProblemSpec& spec,
                                  const PenalizationParams& params, double eps, double tol) {
  require_same_grid(u, barrier.log_field);
  const RadialGrid& grid = *u.grid;
  const auto& r = grid.r();
  const std::size_t n = r.size();
  const double log_d0 = std::log(barrier.delta0);
  const double R = eps * barrier.R;

  ComparisonReport rep;
  double worst = -std::numeric_limits<double>::infinity();
  double umax = 0.0;
  for (std::size_t i = 0; i < n; ++i) umax = std::max(umax, u[i]);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(r[i] - barrier.x_eps) < R || !(u[i] > 0.0)) continue;
    const double v = std::log(u[i]) - log_d0 - barrier.log_field[i];
    if (v > worst) {
      worst = v;
      rep.worst_radius = r[i];
    }
  }
  rep.max_violation = worst > 0.0 ? std::expm1(std::min(worst, 700.0)) : 0.0;
  rep.holds = !(worst > 1e-12);

  const std::vector<double> su = stiffness_apply(grid, u.values, FarField::harmonic);
  const auto& m = grid.mass();
  double ineq = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(r[i] - barrier.x_eps) < R) continue;
    const double H = hardy_potential(params, spec.lambda, spec.N, r[i]);
    const double lhs = eps * eps * (su[i] / m[i] - H * u[i]) + (1.0 - barrier.nu) * spec.V(r[i]) * u[i];
    ineq = std::max(ineq, lhs);
  }
  rep.inequation_max = std::isfinite(ineq) ? ineq : 0.0;
  rep.inequation_holds = rep.inequation_max <= tol * umax;
  return rep;
}

double slow_barrier_log(double lambda, double eps, double r_bar, double d, double alpha) {
  if (!(alpha < 2.0)) throw Error(Errc::domain, "slow barrier needs alpha < 2");
  const double q = 1.0 - 0.5 * alpha;
  return lambda / eps * (std::pow(r_bar, q) - std::pow(d, q));
}

double borderline_barrier_log(double nu, double eps, double r_bar, double d) {
  return nu / eps * std::log(r_bar / d);
}

double tail_subsolution_residual(const Potential& V, int N, double delta, double r) {
  const double z = std::pow(r, 2.0 - N) * (1.0 + std::pow(r, -delta));
  return -delta * (N - 2.0 + delta) * std::pow(r, -N - delta) + V(r) * z;
}

}  // namespace nls
