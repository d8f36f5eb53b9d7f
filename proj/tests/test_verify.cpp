#include <doctest.h>

#include <cmath>
#include <vector>

#include "common.hpp"
#include "nls/barriers.hpp"
#include "nls/error.hpp"
#include "nls/verify.hpp"

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

std::vector<SolveReport> plateau_sweep() {
  return {test::plateau_solution(0.1), test::plateau_solution(0.2), test::plateau_solution(0.05)};
}

// int_0^x sqrt(1 + s^2) ds
double agmon(double x) { return 0.5 * (x * std::sqrt(1.0 + x * x) + std::asinh(x)); }

}  // namespace

TEST_CASE("solves-original check is vacuous without exterior mass") {
  const auto spec = test::plateau_spec();
  const auto params = select_params(spec);
  const auto g = test::plateau_grid();
  const RadialField zero(g);
  const auto z = check_solves_original(zero, spec, params, 0.1);
  CHECK(z.holds);
  CHECK(std::isinf(z.margin));
  CHECK(z.original_residual_max == 0.0);
  const auto bump = sample(g, [](double r) { return r < 1.0 ? std::pow(1.0 - r * r, 3) : 0.0; });
  const auto b = check_solves_original(bump, spec, params, 0.1);
  CHECK(b.holds);
  CHECK(std::isinf(b.margin));

  const auto big = sample(g, [](double) { return 10.0; });
  const auto fail = check_solves_original(big, spec, params, 0.1);
  CHECK_FALSE(fail.holds);
  CHECK(fail.margin < 0.0);
}

TEST_CASE("solving the original problem comes with a small original residual") {
  const auto spec = test::plateau_spec();
  const auto params = select_params(spec);
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto& rep = test::plateau_solution(eps);
    const auto so = check_solves_original(rep.solution, spec, params, eps);
    CHECK(so.holds);
    CHECK(so.margin > 0.0);
    CHECK(so.original_residual_max <= 1e-8 * rep.u_max);
  }
}

TEST_CASE("envelope fit recovers an exact envelope") {
  const auto g = test::plateau_grid();
  const double eps = 0.1;
  for (EnvelopeVariant v : {EnvelopeVariant{EnvelopeKind::fast, 2.0}, EnvelopeVariant{EnvelopeKind::slow, 1.0},
                            EnvelopeVariant{EnvelopeKind::borderline, 2.0}}) {
    const double lambda = 0.7, C = 2.0;
    const auto u = sample(g, [&](double r) {
      const double ph = v.kind == EnvelopeKind::fast   ? r / (1.0 + r)
                        : v.kind == EnvelopeKind::slow ? r / std::pow(1.0 + r, 0.5 * v.alpha)
                                                       : std::log1p(r);
      return C * std::exp(-lambda / eps * ph) / std::sqrt(1.0 + r * r);
    });
    const auto fit = decay_envelope_fit(u, 0.0, eps, 3.0, v, 50.0, 300.0);
    CHECK(fit.valid);
    CHECK(fit.lambda == doctest::Approx(lambda).epsilon(1e-9));
    CHECK(fit.C == doctest::Approx(C).epsilon(1e-9));
    CHECK(fit.anchor >= 0.3);
    CHECK(fit.anchor < 0.3 + 1e-3);
    CHECK(envelope_excess(u, 0.0, eps, fit.anchor, fit.C, 2.0 * fit.lambda, v) > 0.0);
  }
  EnvelopeVariant bad{EnvelopeKind::slow, 2.0};
  const auto u = sample(g, [](double r) { return std::exp(-r); });
  CHECK(code_of([&] { decay_envelope_fit(u, 0.0, eps, 3.0, bad); }) == Errc::precondition);
  const auto holes = sample(g, [](double r) { return r < 10.0 ? 1.0 : 0.0; });
  CHECK(code_of([&] { decay_envelope_fit(holes, 0.0, eps, 3.0); }) == Errc::fit_impossible);
}

TEST_CASE("envelope of the computed solution") {
  const auto spec = test::plateau_spec();
  const auto& rep = test::plateau_solution(0.05);
  const auto fit = decay_envelope_fit(rep.solution, rep.x_eps, 0.05, 5.0, {}, 50.0, 300.0);
  CHECK(fit.valid);
  CHECK(fit.max_log_excess <= 0.0);
  const double mu = 0.9 * std::sqrt(0.5);
  CHECK(fit.lambda >= 0.5 * mu * std::min(1.0, 0.4));
  CHECK(fit.s_tail >= -1.3);
  CHECK(fit.s_tail <= -0.7);
  CHECK(envelope_excess(rep.solution, rep.x_eps, 0.05, fit.anchor, fit.C, 2.0 * fit.lambda) > 0.0);
}

TEST_CASE("tail lower bound and slope") {
  const auto g = test::plateau_grid();
  const auto inv = sample(g, [](double r) { return 1.0 / std::max(r, 1e-300); });
  const auto t = tail_lower_bound(inv, 3, 50.0, 300.0);
  CHECK(t.holds);
  CHECK(t.min_scaled == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.flatness == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tail_slope(inv, 50.0, 300.0) == doctest::Approx(-1.0).epsilon(1e-12));

  const auto ex = sample(g, [](double r) { return std::exp(-r); });
  CHECK_FALSE(tail_lower_bound(ex, 3, 50.0, 300.0).holds);

  CHECK(code_of([&] { tail_lower_bound(inv, 3, 50.0, 950.0); }) == Errc::window);
  CHECK(code_of([&] { tail_lower_bound(inv, 3, 0.0, 300.0); }) == Errc::window);
  CHECK(code_of([&] { tail_lower_bound(inv, 3, 300.0, 50.0); }) == Errc::window);
  CHECK(code_of([&] { tail_slope(inv, 50.0, 50.0); }) == Errc::window);

  const auto& rep = test::plateau_solution(0.1);
  const auto sol = tail_lower_bound(rep.solution, 3, 50.0, 300.0);
  CHECK(sol.holds);
  CHECK(sol.min_scaled > 0.0);
}

TEST_CASE("rescaled error") {
  const auto spec = test::plateau_spec();
  const auto& gs = test::canonical(3, 4.0);
  const double eps = 0.1;
  // the limit profile itself, sampled on the problem grid
  const auto v = sample(test::plateau_grid(), [&](double r) { return gs.at(r / eps); });
  CHECK(rescaled_error(v, 0.0, eps, gs, spec) <= 1e-4);
  const auto& rep = test::plateau_solution(0.05);
  const double e = rescaled_error(rep.solution, rep.x_eps, 0.05, gs, spec);
  CHECK(e > 0.0);
  CHECK(e < 0.05);
  CHECK(code_of([&] { rescaled_error(v, 0.0, 200.0, gs, spec); }) == Errc::window);
  CHECK(code_of([&] { rescaled_error(v, 0.0, eps, test::canonical(3, 3.0), spec); }) == Errc::precondition);
}

TEST_CASE("concentration diagnostics") {
  const auto spec = test::plateau_spec();
  const auto params = select_params(spec);
  const auto sweep = plateau_sweep();
  CHECK(code_of([&] { concentration_diagnostics(std::span(sweep).first(2), spec, params); }) ==
        Errc::insufficient_sweep);

  const auto d = concentration_diagnostics(sweep, spec, params, {5.0, 10.0, 20.0, 1000.0});
  REQUIRE(d.rows.size() == 3);
  CHECK(d.rows[0].eps == 0.2);
  CHECK(d.rows[1].eps == 0.1);
  CHECK(d.rows[2].eps == 0.05);
  CHECK(d.inf_A == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(d.A_trend);
  CHECK(d.sup_trend_R);
  for (const auto& row : d.rows) {
    CHECK(row.solves_original);
    CHECK(row.A_at_x_eps == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(row.sup_outside.size() == 4);
    // eps R past the region boundary leaves nothing to take a sup over
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::isnan(row.sup_outside[j]) == (row.eps * d.R_values[j] >= 1.0));
    for (std::size_t j = 1; j < 3; ++j)
      if (!std::isnan(row.sup_outside[j])) CHECK(row.sup_outside[j] <= row.sup_outside[j - 1]);
    const double J = row.J_over_epsN;
    CHECK(std::abs(J - test::canonical(3, 4.0).energy_canonical) < 0.15 * test::canonical(3, 4.0).energy_canonical);
  }
}

TEST_CASE("sup outside the balls is stationary in eps when V is flat") {
  ProblemSpec spec = test::plateau_spec();
  spec.V = Potential::constant(1.0);
  const auto params = select_params(spec);
  SolveInit init;
  init.ground_state = &test::canonical(3, 4.0);
  std::vector<SolveReport> sweep;
  for (double eps : {0.2, 0.1, 0.05})
    sweep.push_back(solve_least_energy(spec, params, eps, test::plateau_grid(), init));
  const auto d = concentration_diagnostics(sweep, spec, params, {2.0, 4.0}, 0.05);
  CHECK(d.sup_trend_R);
  CHECK(d.sup_trend_eps);
  CHECK(d.A_trend);
}

TEST_CASE("log u is linear in 1/eps at a fixed radius") {
  const double r0 = 0.5;
  std::vector<double> x, y;
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto& rep = test::plateau_solution(eps);
    x.push_back(1.0 / eps);
    // the ground state decays like exp(-s) / s in three dimensions
    y.push_back(std::log(rep.solution.at(r0) * r0 / eps));
  }
  const double s1 = (y[1] - y[0]) / (x[1] - x[0]);
  const double s2 = (y[2] - y[1]) / (x[2] - x[1]);
  const double a = agmon(r0);
  CHECK(std::abs(s1 + a) < 0.1 * a);
  CHECK(std::abs(s2 + a) < 0.1 * a);
  CHECK(std::abs(s2 - s1) < 0.1 * a);
}

TEST_CASE("threshold search preconditions") {
  const auto spec = test::plateau_spec();
  const auto params = select_params(spec);
  const auto& gs = test::canonical(3, 4.0);
  CHECK(code_of([&] { locate_eps0(spec, params, test::plateau_grid(), gs, 0.2, 0.1); }) == Errc::precondition);
  CHECK(code_of([&] { locate_eps0(spec, params, test::plateau_grid(), gs, 0.0, 0.1); }) == Errc::precondition);
  CHECK(code_of([&] { locate_eps0(spec, params, test::plateau_grid(), gs, 2.5, 3.0); }) == Errc::precondition);
}

TEST_CASE("threshold search brackets the crossing") {
  const auto spec = test::plateau_spec();
  const auto params = select_params(spec);
  const auto rep = locate_eps0(spec, params, test::plateau_grid(), test::canonical(3, 4.0), 0.2, 0.4, 6);
  REQUIRE(rep.found);
  CHECK(rep.eps_hold < rep.eps_fail);
  CHECK(rep.iterations == 6);
  CHECK(rep.eps_hold > 1.0);
  CHECK(rep.eps_fail - rep.eps_hold <= (3.2 - 1.6) / 64.0 + 1e-12);
}
