#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <vector>

#include "common.hpp"
#include "nls/error.hpp"
#include "nls/solver.hpp"

using namespace nls;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::precondition;
}

// smooth bump supported in the unit ball
RadialField inner_bump(const GridPtr& g, double a = 1.0) {
  return sample(g, [a](double r) { return r < 1.0 ? a * std::pow(1.0 - r * r, 3) : 0.0; });
}

}  // namespace

TEST_CASE("least-energy solution at eps = 0.1") {
  const auto& rep = test::plateau_solution(0.1);
  const double w0 = test::canonical(3, 4.0).w0;
  CHECK(w0 == doctest::Approx(5.2239).epsilon(1e-3));
  CHECK(rep.x_eps == 0.0);
  CHECK(std::abs(rep.u_max - w0) < 0.1 * w0);
  CHECK(rep.residual_max <= 1e-8 * rep.u_max);
  CHECK(rep.J_value > 0.0);
  for (double v : rep.solution.values) CHECK(v >= 0.0);
  // an independent recomputation of the residual
  const auto spec = test::plateau_spec();
  const auto res = residual(rep.solution, spec, select_params(spec), 0.1);
  double worst = 0.0;
  for (double v : res.values) worst = std::max(worst, std::abs(v));
  CHECK(worst <= 1e-8 * rep.u_max);
  CHECK(functional_J(rep.solution, spec, select_params(spec), 0.1) == rep.J_value);
}

TEST_CASE("starting from the solution takes no further steps") {
  const auto& rep = test::plateau_solution(0.1);
  const auto spec = test::plateau_spec();
  SolveInit init;
  init.field = &rep.solution;
  const auto again = solve_least_energy(spec, select_params(spec), 0.1, test::plateau_grid(), init);
  CHECK(again.newton_iters <= 1);
  if (again.newton_iters == 0) CHECK(again.solution.values == rep.solution.values);
  double diff = 0.0;
  for (std::size_t i = 0; i < rep.solution.size(); ++i)
    diff = std::max(diff, std::abs(again.solution[i] - rep.solution[i]));
  CHECK(diff <= 1e-8 * rep.u_max);
}

TEST_CASE("functional and residual vanish at zero") {
  const auto spec = test::plateau_spec();
  const auto params = select_params(spec);
  const RadialField zero(test::plateau_grid());
  CHECK(functional_J(zero, spec, params, 0.1) == 0.0);
  for (double v : residual(zero, spec, params, 0.1).values) CHECK(v == 0.0);
}

TEST_CASE("J along a ray for a field supported in the region") {
  const auto spec = test::plateau_spec();
  const auto params = select_params(spec);
  const auto g = test::plateau_grid();
  const double eps = 0.3;
  const auto u = inner_bump(g);
  PenalizedProblem prob(spec, params, eps, g);
  const double a = prob.quadratic(u.values);
  double b = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) b += g->mass()[i] * std::pow(u[i], spec.p + 1.0);
  const double p = spec.p;
  for (double t : {0.1, 0.5, 1.0, 1.7, 3.0}) {
    std::vector<double> tu(u.values);
    for (double& x : tu) x *= t;
    const double expect = 0.5 * t * t * a - std::pow(t, p + 1.0) / (p + 1.0) * b;
    CHECK(prob.J(tu) == doctest::Approx(expect).epsilon(1e-12));
  }

  const double t_star = std::pow(a / b, 1.0 / (p - 1.0));
  const auto [t, value] = nehari_project(u, spec, params, eps);
  CHECK(t == doctest::Approx(t_star).epsilon(1e-8));
  CHECK(value == doctest::Approx((0.5 - 1.0 / (p + 1.0)) * a * t_star * t_star).epsilon(1e-10));
  const auto [t2, value2] = nehari_project(inner_bump(g, 2.0), spec, params, eps);
  CHECK(t2 == doctest::Approx(0.5 * t_star).epsilon(1e-8));
  CHECK(value2 == doctest::Approx(value).epsilon(1e-10));
}

TEST_CASE("solutions lie on the Nehari set") {
  const auto spec = test::plateau_spec();
  for (double eps : {0.2, 0.1}) {
    const auto& rep = test::plateau_solution(eps);
    const auto [t, value] = nehari_project(rep.solution, spec, select_params(spec), eps);
    CHECK(std::abs(t - 1.0) < 1e-4);
    CHECK(value == doctest::Approx(rep.J_value).epsilon(1e-8));
  }
  const RadialField zero(test::plateau_grid());
  CHECK(code_of([&] { nehari_project(zero, spec, select_params(spec), 0.1); }) == Errc::precondition);
}

TEST_CASE("mountain-pass estimate matches the energy") {
  const auto spec = test::plateau_spec();
  const auto params = select_params(spec);
  for (double eps : {0.2, 0.1}) {
    const auto& rep = test::plateau_solution(eps);
    const double mp = mountain_pass_level_estimate(rep, spec, params);
    CHECK(mp >= rep.J_value - 1e-10 * std::abs(rep.J_value));
    CHECK(std::abs(mp - rep.J_value) <= 1e-4 * rep.J_value);
  }
  SolveReport empty = test::plateau_solution(0.1);
  std::fill(empty.solution.values.begin(), empty.solution.values.end(), 0.0);
  CHECK(code_of([&] { mountain_pass_level_estimate(empty, spec, params); }) == Errc::precondition);
}

TEST_CASE("J is unimodal along the ray through a solution") {
  const auto spec = test::plateau_spec();
  const auto params = select_params(spec);
  const auto& rep = test::plateau_solution(0.2);
  PenalizedProblem prob(spec, params, 0.2, rep.solution.grid);
  std::vector<double> vals;
  for (int k = 1; k <= 200; ++k) {
    std::vector<double> tu(rep.solution.values);
    for (double& x : tu) x *= 2.0 * k / 200.0;
    vals.push_back(prob.J(tu));
  }
  std::size_t peak = 0;
  for (std::size_t k = 1; k < vals.size(); ++k)
    if (vals[k] > vals[peak]) peak = k;
  CHECK(peak == 99);
  for (std::size_t k = 1; k <= peak; ++k) CHECK(vals[k] > vals[k - 1]);
  for (std::size_t k = peak + 1; k < vals.size(); ++k) CHECK(vals[k] < vals[k - 1]);
}

TEST_CASE("residual is the mass-weighted gradient of J") {
  const auto spec = test::plateau_spec();
  const auto params = select_params(spec);
  const auto g = test::plateau_grid();
  const double eps = 0.1;
  const auto u = ground_state_ansatz(spec, eps, test::canonical(3, 4.0), g);
  PenalizedProblem prob(spec, params, eps, g);
  const auto F = prob.residual(u.values);
  const double J0 = prob.J(u.values);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(0.0, 2.5), w(0.05, 0.6), amp(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double cc = c(rng), ww = w(rng), aa = amp(rng);
    const auto phi = sample(g, [&](double r) { return aa * std::exp(-(r - cc) * (r - cc) / (ww * ww)); });
    long double analytic = 0.0L;
    for (std::size_t i = 0; i < g->size(); ++i) analytic += static_cast<long double>(g->mass()[i]) * F[i] * phi[i];
    const double h = 1e-5;
    std::vector<double> up(u.values), um(u.values);
    for (std::size_t i = 0; i < g->size(); ++i) {
      up[i] += h * phi[i];
      um[i] -= h * phi[i];
    }
    const double fd = (prob.J(up) - prob.J(um)) / (2.0 * h);
    double scale = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) scale += g->mass()[i] * std::abs(F[i] * phi[i]);
    // rounding in the difference of two J values bounds what the quotient can resolve
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(J0) / h;
    CHECK(std::abs(fd - static_cast<double>(analytic)) <= 1e-5 * scale + floor);
  }
}

TEST_CASE("the ground-state ansatz is close but not exact") {
  const auto spec = test::plateau_spec();
  const auto& rep = test::plateau_solution(0.1);
  CHECK(rep.initial_residual > 1e-6);
  CHECK(rep.initial_residual < 0.5 * rep.u_max);
  CHECK(rep.newton_iters > 0);
  const auto ans = ground_state_ansatz(spec, 0.1, test::canonical(3, 4.0), test::plateau_grid());
  CHECK(ans[0] == doctest::Approx(test::canonical(3, 4.0).w0).epsilon(1e-12));
  CHECK(code_of([&] { ground_state_ansatz(spec, 0.1, test::canonical(3, 3.0), test::plateau_grid()); }) ==
        Errc::precondition);
}

TEST_CASE("serial and OpenMP solves agree bit for bit") {
  const auto spec = test::plateau_spec();
  const auto params = select_params(spec);
  SolveInit init;
  init.ground_state = &test::canonical(3, 4.0);
  ::setenv("NLS_SEED_DETERMINISM", "strict", 1);
  const auto serial = solve_least_energy(spec, params, 0.2, test::plateau_grid(), init);
  ::unsetenv("NLS_SEED_DETERMINISM");
  const auto parallel = solve_least_energy(spec, params, 0.2, test::plateau_grid(), init);
  CHECK(serial.solution.values == parallel.solution.values);
  CHECK(serial.J_value == parallel.J_value);
  CHECK(serial.history == parallel.history);
}

TEST_CASE("solver failure carries the residual history") {
  const auto spec = test::plateau_spec();
  SolveInit init;
  init.ground_state = &test::canonical(3, 4.0);
  SolverOptions opt;
  opt.max_iters = 0;
  opt.continuation_steps = 2;
  try {
    solve_least_energy(spec, select_params(spec), 0.1, test::plateau_grid(), init, opt);
    FAIL("expected a solver failure");
  } catch (const SolverFailure& f) {
    CHECK(f.code() == Errc::solver_failure);
    CHECK(f.residual_history().size() == 3);
    for (double r : f.residual_history()) CHECK(r > 0.0);
  }
}

TEST_CASE("input errors") {
  const auto spec = test::plateau_spec();
  const auto params = select_params(spec);
  CHECK(code_of([&] { solve_least_energy(spec, params, 0.0, test::plateau_grid()); }) == Errc::domain);
  CHECK(code_of([&] { solve_least_energy(spec, params, 0.1, build_grid(4.0, 256, 400.0, 2)); }) ==
        Errc::precondition);
  PenalizationParams bad = params;
  bad.kappa = 1.0;
  CHECK(code_of([&] { solve_least_energy(spec, bad, 0.1, test::plateau_grid()); }) == Errc::form_not_positive);
}
