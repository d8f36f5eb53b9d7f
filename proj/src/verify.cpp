#include "nls/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nls/error.hpp"

namespace nls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kNaN = std::numeric_limits<double>::quiet_NaN();

double phi(const EnvelopeVariant& v, double d) {
  switch (v.kind) {
    case EnvelopeKind::fast: return d / (1.0 + d);
    case EnvelopeKind::slow: return d / std::pow(1.0 + d, 0.5 * v.alpha);
    case EnvelopeKind::borderline: return std::log1p(d);
  }
  return 0.0;
}

double poly_log(int N, double r) { return -0.5 * (N - 2.0) * std::log1p(r * r); }

double excess_log(const RadialGrid& grid, std::span<const double> log_u, double x_eps, double eps, double anchor,
                  double log_C, double lambda, const EnvelopeVariant& v) {
  const auto& r = grid.r();
  double worst = -kInf;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = std::abs(r[i] - x_eps);
    if (d < anchor || !std::isfinite(log_u[i])) continue;
    const double env = log_C - lambda / eps * phi(v, d) + poly_log(grid.dim(), r[i]);
    worst = std::max(worst, log_u[i] - env);
  }
  return worst;
}

std::vector<double> logs(const RadialField& u) {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] > 0.0 ? std::log(u[i]) : -kInf;
  return out;
}

}  // namespace

SolvesOriginalReport check_solves_original(const RadialField& u, const ProblemSpec& spec,
                                           const PenalizationParams& params, double eps, FarField ff) {
  const RadialGrid& grid = *u.grid;
  const auto& r = grid.r();
  const auto& m = grid.mass();
  const std::vector<double> su = stiffness_apply(grid, u.values, ff);
  SolvesOriginalReport rep;
  rep.margin = kInf;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double K = spec.K(r[i]);
    const double ui = std::max(u[i], 0.0);
    const double orig = eps * eps * su[i] / m[i] + spec.V(r[i]) * u[i] - (K > 0.0 ? K * std::pow(ui, spec.p) : 0.0);
    rep.original_residual_max = std::max(rep.original_residual_max, std::abs(orig));
    if (spec.lambda.contains(r[i]) || !(K > 0.0) || !(ui > 0.0)) continue;
    const double e2h = eps * eps * hardy_potential(params, spec.lambda, spec.N, r[i]);
    const double margin = std::log(e2h) - std::log(K) - (spec.p - 1.0) * std::log(ui);
    rep.margin = std::min(rep.margin, margin);
  }
  rep.holds = rep.margin >= 0.0;
  return rep;
}

EnvelopeFit decay_envelope_fit_log(const RadialGrid& grid, std::span<const double> log_u, double x_eps, double eps,
                                   double R, const EnvelopeVariant& variant) {
  if (!(eps > 0.0) || !(R >= 0.0)) throw Error(Errc::precondition, "envelope fit needs eps > 0 and R >= 0");
  if (variant.kind == EnvelopeKind::slow && !(variant.alpha > 0.0 && variant.alpha < 2.0))
    throw Error(Errc::precondition, "slow envelope needs 0 < alpha < 2");
  const auto& r = grid.r();
  const int N = grid.dim();
  const double a = eps * R;

  std::size_t ia = r.size();
  double da = kInf;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = std::abs(r[i] - x_eps);
    if (d < a) continue;
    if (!std::isfinite(log_u[i])) throw Error(Errc::fit_impossible, "u is not positive on the far grid");
    if (d < da) {
      da = d;
      ia = i;
    }
  }
  if (ia == r.size()) throw Error(Errc::fit_impossible, "no nodes beyond eps R");

  const double pa = phi(variant, da);
  const double qa = poly_log(N, r[ia]);
  double lambda = kInf;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = std::abs(r[i] - x_eps);
    if (d < a || i == ia) continue;
    const double dp = phi(variant, d) - pa;
    if (!(dp > 0.0)) continue;
    lambda = std::min(lambda, eps * (log_u[ia] - log_u[i] + poly_log(N, r[i]) - qa) / dp);
  }
  if (!std::isfinite(lambda)) throw Error(Errc::fit_impossible, "envelope has no decay direction");

  double log_C = -kInf;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = std::abs(r[i] - x_eps);
    if (d < a) continue;
    log_C = std::max(log_C, log_u[i] + lambda / eps * phi(variant, d) - poly_log(N, r[i]));
  }
  log_C += 1e-12 * std::max(1.0, std::abs(log_C));

  EnvelopeFit fit;
  fit.lambda = lambda;
  fit.C = std::exp(log_C);
  fit.anchor = da;
  fit.max_log_excess = excess_log(grid, log_u, x_eps, eps, da, log_C, lambda, variant);
  fit.valid = lambda > 0.0 && fit.max_log_excess <= 0.0;
  return fit;
}

EnvelopeFit decay_envelope_fit(const RadialField& u, double x_eps, double eps, double R,
                               const EnvelopeVariant& variant, double tail_lo, double tail_hi) {
  EnvelopeFit fit = decay_envelope_fit_log(*u.grid, logs(u), x_eps, eps, R, variant);
  if (!(tail_hi > tail_lo)) {
    tail_lo = u.grid->R_max() / 20.0;
    tail_hi = 0.3 * u.grid->R_max();
  }
  fit.s_tail = tail_slope(u, tail_lo, tail_hi);
  return fit;
}

double envelope_excess(const RadialField& u, double x_eps, double eps, double anchor, double C, double lambda,
                       const EnvelopeVariant& variant) {
  return excess_log(*u.grid, logs(u), x_eps, eps, anchor, std::log(C), lambda, variant);
}

double tail_slope(const RadialField& u, double lo, double hi) {
  const auto& r = u.grid->r();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < lo || r[i] > hi) continue;
    if (!(u[i] > 0.0)) throw Error(Errc::fit_impossible, "u is not positive in the tail window");
    const double x = std::log(r[i]);
    const double y = std::log(u[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k < 2) throw Error(Errc::window, "tail window holds fewer than two nodes");
  const double n = static_cast<double>(k);
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SweepDiagnostics concentration_diagnostics(std::span<const SolveReport> sweep, const ProblemSpec& spec,
                                           const PenalizationParams& params, std::vector<double> R_values,
                                           double trend_tol) {
  if (sweep.size() < 3) throw Error(Errc::insufficient_sweep, "concentration diagnostics need three eps values");
  SweepDiagnostics out;
  out.R_values = std::move(R_values);
  out.inf_A = minimize_on_region(spec.lambda, [&spec](double r) { return eval_concentration(spec, r); }).value;
  const int N = spec.N;
  for (const SolveReport& rep : sweep) {
    SweepRow row;
    row.eps = rep.eps;
    row.x_eps = rep.x_eps;
    row.A_at_x_eps = eval_concentration(spec, rep.x_eps);
    row.J_over_epsN = rep.J_value / std::pow(rep.eps, N);
    row.norm_over_epsN2 = rep.norm_eps_value / std::pow(rep.eps, 0.5 * N);
    row.u_max = rep.u_max;
    const SolvesOriginalReport so = check_solves_original(rep.solution, spec, params, rep.eps);
    row.solves_original = so.holds;
    row.threshold_margin = so.margin;
    const auto& r = rep.solution.grid->r();
    for (double R : out.R_values) {
      double sup = kNaN;
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (!spec.lambda.contains(r[i]) || std::abs(r[i] - rep.x_eps) < rep.eps * R) continue;
        sup = std::isnan(sup) ? rep.solution[i] : std::max(sup, rep.solution[i]);
      }
      row.sup_outside.push_back(sup);
    }
    out.rows.push_back(std::move(row));
  }
  std::sort(out.rows.begin(), out.rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.eps > b.eps; });

  for (std::size_t k = 0; k < out.rows.size(); ++k) {
    const double A = out.rows[k].A_at_x_eps;
    if (A < out.inf_A * (1.0 - 1e-9)) out.A_trend = false;
    if (k > 0 && A > out.rows[k - 1].A_at_x_eps * (1.0 + trend_tol)) out.A_trend = false;
  }
  for (std::size_t j = 0; j < out.R_values.size(); ++j) {
    double prev = kNaN;
    for (const SweepRow& row : out.rows) {
      const double s = row.sup_outside[j];
      if (std::isnan(s)) continue;
      if (!std::isnan(prev) && s > prev * (1.0 + trend_tol)) out.sup_trend_eps = false;
      prev = s;
    }
  }
  for (const SweepRow& row : out.rows) {
    double prev = kNaN;
    for (double s : row.sup_outside) {
      if (std::isnan(s)) continue;
      if (!std::isnan(prev) && s > prev * (1.0 + trend_tol)) out.sup_trend_R = false;
      prev = s;
    }
  }
  return out;
}

double rescaled_error(const RadialField& u, double x_eps, double eps, const GroundState& gs,
                      const ProblemSpec& spec) {
  if (gs.N != spec.N || gs.p != spec.p) throw Error(Errc::precondition, "ground state has a different (N, p)");
  const auto& r = u.grid->r();
  if (x_eps + 10.0 * eps > r.back()) throw Error(Errc::window, "rescaled window leaves the grid");
  const double xbar =
      minimize_on_region(spec.lambda, [&spec](double x) { return eval_concentration(spec, x); }).argmin;
  const double V0 = spec.V(xbar);
  const double K0 = spec.K(xbar);
  const double amp = std::pow(V0 / K0, 1.0 / (spec.p - 1.0));
  const double k = std::sqrt(V0);
  const double v0 = amp * gs.w0;
  double err = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double y = std::abs(r[i] - x_eps) / eps;
    if (y > 10.0) continue;
    err = std::max(err, std::abs(u[i] - amp * gs.at(k * y)));
  }
  return err / v0;
}

TailReport tail_lower_bound(const RadialField& u, int N, double lo, double hi) {
  const auto& r = u.grid->r();
  if (!(lo > 0.0 && hi > lo)) throw Error(Errc::window, "tail window must satisfy 0 < lo < hi");
  if (hi > 0.9 * r.back()) throw Error(Errc::window, "tail window reaches the last 10% of the grid");
  TailReport rep;
  rep.min_scaled = kInf;
  double dmin = kInf;
  double dmax = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < lo || r[i] > hi) continue;
    const double s = std::pow(r[i], N - 2.0) * u[i];
    rep.min_scaled = std::min(rep.min_scaled, s);
    if (r[i] >= std::max(lo, 0.1 * hi)) {
      dmin = std::min(dmin, s);
      dmax = std::max(dmax, s);
    }
  }
  if (!std::isfinite(rep.min_scaled)) throw Error(Errc::window, "tail window holds no nodes");
  rep.flatness = dmin > 0.0 ? dmax / dmin : kInf;
  rep.holds = rep.min_scaled > 0.0 && rep.flatness < 3.0;
  return rep;
}

ThresholdReport locate_eps0(const ProblemSpec& spec, const PenalizationParams& params, GridPtr grid,
                            const GroundState& gs, double eps_hold, double eps_fail, int iterations,
                            const SolverOptions& opt) {
  if (!(eps_hold > 0.0 && eps_fail > eps_hold)) throw Error(Errc::precondition, "need 0 < eps_hold < eps_fail");
  SolveInit init;
  init.ground_state = &gs;
  const auto holds = [&](double e) {
    const SolveReport rep = solve_least_energy(spec, params, e, grid, init, opt);
    return check_solves_original(rep.solution, spec, params, e).holds;
  };
  if (!holds(eps_hold)) throw Error(Errc::precondition, "criterion fails at the lower eps");
  ThresholdReport out;
  double lo = eps_hold;
  double hi = eps_fail;
  for (int k = 0; holds(hi); ++k) {
    if (k == 4) {
      out.eps_hold = hi;
      return out;
    }
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
    out.iterations = it + 1;
  }
  out.found = true;
  out.eps_hold = lo;
  out.eps_fail = hi;
  return out;
}

}  // namespace nls
