#include "nls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <limits>
#include <optional>

#include "nls/error.hpp"
#include "nls/tridiag.hpp"

namespace nls {

PenalizedProblem::PenalizedProblem(const ProblemSpec& spec, const PenalizationParams& params, double eps,
                                   GridPtr grid, FarField ff)
    : spec_(spec), params_(params), eps_(eps), grid_(std::move(grid)) {
  if (!(eps > 0.0)) throw Error(Errc::domain, "eps must be positive");
  if (!grid_) throw Error(Errc::precondition, "penalized problem needs a grid");
  if (grid_->dim() != spec.N) throw Error(Errc::precondition, "grid dimension differs from N");
  robin_ = ff == FarField::harmonic ? grid_->far_field_coupling() : 0.0;
  const auto& r = grid_->r();
  const std::size_t n = r.size();
  V_.resize(n);
  K_.resize(n);
  e2h_.resize(n);
  inside_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    V_[i] = spec.V(r[i]);
    K_[i] = spec.K(r[i]);
    const bool in = spec.lambda.contains(r[i]);
    inside_[i] = in ? 1 : 0;
    e2h_[i] = in ? 0.0 : eps * eps * hardy_potential(params, spec.lambda, spec.N, r[i]);
  }
}

kernels::NodeCoefficients PenalizedProblem::coefficients() const { return {K_, e2h_, inside_, spec_.p}; }

double PenalizedProblem::quadratic(std::span<const double> u) const {
  std::vector<double> su(u.size());
  kernels::stiffness_apply(backend, grid_->conductance(), robin_, u, su);
  const double grad = kernels::weighted_dot(backend, su, u, std::vector<double>(u.size(), 1.0));
  std::vector<double> vu(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) vu[i] = V_[i] * u[i];
  return eps_ * eps_ * grad + kernels::weighted_dot(backend, grid_->mass(), vu, u);
}

double PenalizedProblem::J(std::span<const double> u) const {
  return 0.5 * quadratic(u) - kernels::potential_energy(backend, coefficients(), grid_->mass(), u);
}

std::vector<double> PenalizedProblem::residual(std::span<const double> u) const {
  const std::size_t n = u.size();
  std::vector<double> g(n);
  std::vector<double> out(n);
  kernels::nonlinearity(backend, coefficients(), u, g, {});
  kernels::residual(backend, eps_ * eps_, grid_->conductance(), robin_, grid_->mass(), V_, g, u, out);
  return out;
}

double functional_J(const RadialField& u, const ProblemSpec& spec, const PenalizationParams& params, double eps,
                    FarField ff) {
  return PenalizedProblem(spec, params, eps, u.grid, ff).J(u.values);
}

RadialField residual(const RadialField& u, const ProblemSpec& spec, const PenalizationParams& params, double eps,
                     FarField ff) {
  return RadialField(u.grid, PenalizedProblem(spec, params, eps, u.grid, ff).residual(u.values));
}

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sum_sq(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

struct NewtonResult {
  std::vector<double> u;
  int iters = 0;
  double residual_max = 0.0;
  std::vector<double> history;
};

NewtonResult newton(const PenalizedProblem& prob, std::vector<double> u, const SolverOptions& opt) {
  const std::size_t n = u.size();
  const auto& c = prob.grid()->conductance();
  const auto& m = prob.grid()->mass();
  const double e2 = prob.eps() * prob.eps();
  const auto coef = prob.coefficients();
  for (double& x : u) x = std::max(x, 0.0);

  NewtonResult res;
  std::vector<double> g(n), dg(n), F(n), trial(n), Ft(n), gt(n);
  kernels::nonlinearity(prob.backend, coef, u, g, dg);
  kernels::residual(prob.backend, e2, c, prob.robin(), m, prob.V(), g, u, F);
  double merit = sum_sq(F);

  for (int it = 0;; ++it) {
    const double rmax = max_abs(F);
    const double umax = *std::max_element(u.begin(), u.end());
    res.history.push_back(rmax);
    if (rmax <= opt.tol * umax || umax == 0.0) {
      res.iters = it;
      res.residual_max = rmax;
      res.u = std::move(u);
      return res;
    }
    if (it == opt.max_iters) throw SolverFailure("Newton did not converge", res.history);

    Tridiagonal Jm(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = e2 / m[i];
      double d = 0.0;
      if (i > 0) {
        d += c[i - 1];
        Jm.lower[i - 1] = -s * c[i - 1];
      }
      if (i + 1 < n) {
        d += c[i];
        Jm.upper[i] = -s * c[i];
      } else {
        d += prob.robin();
      }
      Jm.diag[i] = s * d + prob.V()[i] - dg[i];
    }
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -F[i];
    std::vector<double> d;
    try {
      d = solve_tridiagonal(Jm, rhs);
    } catch (const Error&) {
      throw SolverFailure("singular Newton system", res.history);
    }

    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = std::max(u[i] + t * d[i], 0.0);
      kernels::nonlinearity(prob.backend, coef, trial, gt, dg);
      kernels::residual(prob.backend, e2, c, prob.robin(), m, prob.V(), gt, trial, Ft);
      const double mt = sum_sq(Ft);
      if (mt <= (1.0 - 1e-4 * t) * merit) {
        merit = mt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // a stalled search at the rounding level of the stencil still counts as converged
      double floor = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double flux = (i > 0 ? c[i - 1] : 0.0) + (i + 1 < n ? c[i] : prob.robin());
        floor = std::max(floor, e2 * flux / m[i] * u[i]);
      }
      if (rmax <= 64.0 * std::numeric_limits<double>::epsilon() * floor) {
        res.iters = it;
        res.residual_max = rmax;
        res.u = std::move(u);
        return res;
      }
      throw SolverFailure("line search stalled", res.history);
    }
    u.swap(trial);
    F.swap(Ft);
    g.swap(gt);
  }
}

double region_argmin_A(const ProblemSpec& spec) {
  return minimize_on_region(spec.lambda, [&spec](double r) { return eval_concentration(spec, r); }).argmin;
}

// u_prev stretched from eps_from to eps_to about the concentration radius
std::vector<double> rescale_profile(const RadialField& prev, double center, double eps_from, double eps_to) {
  const auto& r = prev.grid->r();
  std::vector<double> out(r.size());
  const double q = eps_from / eps_to;
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = prev.at(std::max(center + (r[i] - center) * q, 0.0));
  return out;
}

SolveReport finish(const PenalizedProblem& prob, NewtonResult nr, double initial_residual, int steps) {
  SolveReport rep;
  rep.eps = prob.eps();
  rep.newton_iters = nr.iters;
  rep.residual_max = nr.residual_max;
  rep.initial_residual = initial_residual;
  rep.history = std::move(nr.history);
  rep.continuation_steps = steps;
  rep.J_value = prob.J(nr.u);
  rep.norm_eps_value = std::sqrt(std::max(prob.quadratic(nr.u), 0.0));
  rep.solution = RadialField(prob.grid(), std::move(nr.u));
  const std::size_t k = rep.solution.argmax();
  rep.u_max = rep.solution[k];
  rep.x_eps = rep.solution.r(k);
  return rep;
}

}  // namespace

RadialField ground_state_ansatz(const ProblemSpec& spec, double eps, const GroundState& gs, GridPtr grid) {
  if (gs.N != spec.N || gs.p != spec.p) throw Error(Errc::precondition, "ground state has a different (N, p)");
  const double x = region_argmin_A(spec);
  const double V0 = spec.V(x);
  const double K0 = spec.K(x);
  if (!(V0 > 0.0) || !(K0 > 0.0)) throw Error(Errc::undefined_concentration, "V or K vanishes at argmin A");
  const double amp = std::pow(V0 / K0, 1.0 / (spec.p - 1.0));
  const double k = std::sqrt(V0) / eps;
  return sample(std::move(grid), [&](double r) { return amp * gs.at(k * std::abs(r - x)); });
}

SolveReport solve_least_energy(const ProblemSpec& spec, const PenalizationParams& params, double eps,
                               GridPtr grid, const SolveInit& init, const SolverOptions& opt) {
  spec.validate();
  validate_params(params, spec.lambda, spec.N);
  if (!(eps > 0.0)) throw Error(Errc::domain, "eps must be positive");

  std::optional<GroundState> own;
  const GroundState* gs = init.ground_state;
  auto ground_state = [&]() -> const GroundState& {
    if (gs == nullptr) {
      own = solve_canonical(spec.N, spec.p);
      gs = &*own;
    }
    return *gs;
  };

  const auto attempt = [&](double e, std::vector<double> start) {
    PenalizedProblem prob(spec, params, e, grid, opt.far_field);
    const double r0 = max_abs(prob.residual(start));
    NewtonResult nr = newton(prob, std::move(start), opt);
    return std::make_pair(std::move(prob), std::make_pair(std::move(nr), r0));
  };

  const auto check = [&](SolveReport rep, double scale) {
    if (!(rep.u_max > 1e-6 * scale) || !(rep.J_value > 0.0))
      throw Error(Errc::degenerate_solution, "Newton converged to the trivial solution");
    return rep;
  };

  std::vector<double> start = init.field != nullptr ? init.field->values
                                                    : ground_state_ansatz(spec, eps, ground_state(), grid).values;
  const double scale = *std::max_element(start.begin(), start.end());
  std::vector<double> history;
  try {
    auto [prob, out] = attempt(eps, start);
    return check(finish(prob, std::move(out.first), out.second, 0), scale);
  } catch (const SolverFailure& f) {
    history = f.residual_history();
  }

  const double center = region_argmin_A(spec);
  for (int k = 1; k <= opt.continuation_steps; ++k) {
    double e = eps * std::pow(opt.continuation_factor, k);
    std::optional<SolveReport> prev;
    try {
      auto [prob, out] = attempt(e, ground_state_ansatz(spec, e, ground_state(), grid).values);
      prev = finish(prob, std::move(out.first), out.second, k);
    } catch (const SolverFailure& f) {
      history.insert(history.end(), f.residual_history().begin(), f.residual_history().end());
      continue;
    }
    const double first_residual = prev->initial_residual;
    for (int j = k - 1; j >= 0; --j) {
      const double next = eps * std::pow(opt.continuation_factor, j);
      std::vector<double> s = rescale_profile(prev->solution, center, e, next);
      try {
        auto [prob, out] = attempt(next, std::move(s));
        prev = finish(prob, std::move(out.first), j == 0 ? first_residual : out.second, k);
      } catch (const SolverFailure& f) {
        history.insert(history.end(), f.residual_history().begin(), f.residual_history().end());
        throw SolverFailure("continuation failed at eps = " + std::to_string(next), history);
      }
      e = next;
    }
    return check(std::move(*prev), scale);
  }
  throw SolverFailure("Newton diverged for every continuation start", history);
}

namespace {

template <class F>
double golden_max(F&& f, double a, double b, double rel_tol) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 300 && b - a > rel_tol * std::abs(b); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

std::function<double(double)> ray(const PenalizedProblem& prob, const std::vector<double>& u) {
  return [&prob, &u](double t) {
    std::vector<double> tu(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) tu[i] = t * u[i];
    return prob.J(tu);
  };
}

}  // namespace

std::pair<double, double> nehari_project(const RadialField& u, const ProblemSpec& spec,
                                         const PenalizationParams& params, double eps, FarField ff) {
  if (std::all_of(u.values.begin(), u.values.end(), [](double x) { return x == 0.0; }))
    throw Error(Errc::precondition, "Nehari projection of the zero field");
  PenalizedProblem prob(spec, params, eps, u.grid, ff);
  const auto f = ray(prob, u.values);
  double prev = f(std::ldexp(1.0, -40));
  double cur = f(std::ldexp(1.0, -39));
  for (int k = -39; k < 80; ++k) {
    const double next = f(std::ldexp(1.0, k + 1));
    if (next < cur && cur >= prev) {
      const double t = golden_max(f, std::ldexp(1.0, k - 1), std::ldexp(1.0, k + 1), 1e-12);
      return {t, f(t)};
    }
    prev = cur;
    cur = next;
  }
  throw Error(Errc::no_maximum, "J(t u) does not decrease along the ray");
}

double mountain_pass_level_estimate(const SolveReport& report, const ProblemSpec& spec,
                                    const PenalizationParams& params, FarField ff) {
  const auto& u = report.solution.values;
  if (u.empty() || std::all_of(u.begin(), u.end(), [](double x) { return x == 0.0; }))
    throw Error(Errc::precondition, "mountain-pass path through the zero field");
  PenalizedProblem prob(spec, params, report.eps, report.solution.grid, ff);
  const auto f = ray(prob, u);
  double t_end = 2.0;
  while (f(t_end) >= 0.0) {
    t_end *= 2.0;
    if (t_end > 1e9) throw Error(Errc::path_invalid, "J stays nonnegative along the ray");
  }
  constexpr int samples = 200;
  double best_t = 1.0;
  double best = f(1.0);
  for (int k = 1; k <= samples; ++k) {
    const double t = t_end * k / samples;
    const double v = f(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  const double step = t_end / samples;
  const double t = golden_max(f, std::max(best_t - step, 0.0), best_t + step, 1e-12);
  return std::max(best, f(t));
}

}  // namespace nls
