#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "common.hpp"
#include "nls/error.hpp"
#include "nls/problem.hpp"

using namespace nls;

namespace {

std::vector<double> radii(double lo, double hi, int n) {
  std::vector<double> r;
  for (int k = 0; k < n; ++k) r.push_back(lo * std::pow(hi / lo, k / (n - 1.0)));
  return r;
}

}  // namespace

TEST_CASE("admissible exponent range") {
  auto [lo3, hi3] = admissible_p_range(3);
  CHECK(lo3 == 3.0);
  CHECK(hi3 == 5.0);
  auto [lo5, hi5] = admissible_p_range(5);
  CHECK(lo5 == doctest::Approx(5.0 / 3.0));
  CHECK(hi5 == doctest::Approx(7.0 / 3.0));
  auto [lo4, hi4] = admissible_p_range(4);
  CHECK(lo4 == 2.0);
  CHECK(hi4 == 3.0);
  try {
    admissible_p_range(2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dimension_unsupported);
  }
}

TEST_CASE("concentration function") {
  CHECK(concentration(3, 4.0, 1.0, 1.0) == 1.0);
  CHECK(concentration(5, 2.0, 1.0, 1.0) == 1.0);
  CHECK(concentration(3, 4.0, 4.0, 1.0) == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
  for (double p : {2.0, 3.0, 4.0}) {
    const double a = concentration(3, p, 1.7, 0.6);
    const double b = concentration(3, p, 1.7, 1.2);
    CHECK(b / a == doctest::Approx(std::pow(2.0, -2.0 / (p - 1.0))).epsilon(1e-12));
  }
}

TEST_CASE("concentration scales with a constant factor on V") {
  ProblemSpec s = test::plateau_spec();
  ProblemSpec t = s;
  const double c = 3.5;
  t.V = s.V.scaled(c);
  const double expo = concentration_exponent_V(s.N, s.p);
  for (double r : {0.0, 0.3, 0.7, 0.99}) {
    const double ratio = eval_concentration(t, r) / eval_concentration(s, r);
    CHECK(std::abs(ratio / std::pow(c, expo) - 1.0) < 1e-12);
    // pure evaluation
    CHECK(eval_concentration(s, r) == eval_concentration(s, r));
  }
}

TEST_CASE("smooth cutoff is a C2 step") {
  CHECK(smooth_cutoff(0.5, 1.0, 2.0) == 1.0);
  CHECK(smooth_cutoff(1.0, 1.0, 2.0) == 1.0);
  CHECK(smooth_cutoff(2.0, 1.0, 2.0) == 0.0);
  CHECK(smooth_cutoff(1.5, 1.0, 2.0) == doctest::Approx(0.5));
  const double h = 1e-4;
  for (double x : {1.0, 2.0}) {
    const double d1l = (smooth_cutoff(x, 1, 2) - smooth_cutoff(x - h, 1, 2)) / h;
    const double d1r = (smooth_cutoff(x + h, 1, 2) - smooth_cutoff(x, 1, 2)) / h;
    CHECK(std::abs(d1l) < 1e-6);
    CHECK(std::abs(d1r) < 1e-6);
    const double d2 = (smooth_cutoff(x + h, 1, 2) - 2 * smooth_cutoff(x, 1, 2) + smooth_cutoff(x - h, 1, 2)) / (h * h);
    CHECK(std::abs(d2) < 1e-2);
  }
  double prev = 1.0;
  for (double x = 1.0; x <= 2.0; x += 1e-3) {
    const double c = smooth_cutoff(x, 1.0, 2.0);
    CHECK(c <= prev);
    prev = c;
  }
}

TEST_CASE("potential families") {
  const Potential c = Potential::constant(2.5);
  CHECK(c(0.0) == 2.5);
  CHECK(c(1e6) == 2.5);
  const Potential pl = Potential::plateau({1.0, 0.0, 1.0}, 2.0, 3.0);
  CHECK(pl(0.0) == 1.0);
  CHECK(pl(1.5) == doctest::Approx(1.0 + 2.25));
  CHECK(pl(3.0) == 0.0);
  CHECK(pl(50.0) == 0.0);
  const Potential pd = Potential::power_decay(2.0, 3.0);
  CHECK(pd(1.0) == doctest::Approx(2.0 / 8.0));
  const Potential tab = Potential::tabulated({0.0, 1.0, 2.0}, {1.0, 3.0, 2.0});
  CHECK(tab(0.5) == doctest::Approx(2.0));
  CHECK(tab(1.5) == doctest::Approx(2.5));
  CHECK(tab(10.0) == 2.0);
  CHECK(pl.scaled(2.0)(1.0) == doctest::Approx(2.0 * pl(1.0)));
  CHECK(pl == Potential::plateau({1.0, 0.0, 1.0}, 2.0, 3.0));
  CHECK_FALSE(pl == pd);
}

TEST_CASE("domain helpers") {
  const auto b = DomainLambda::ball(1.0);
  CHECK(b.contains(0.0));
  CHECK(b.contains(0.999));
  CHECK_FALSE(b.contains(1.0));
  CHECK(b.distance_to_complement(0.25) == doctest::Approx(0.75));
  CHECK(b.inradius_about_origin() == 1.0);
  const auto a = DomainLambda::annulus(1.0, 2.0);
  CHECK_FALSE(a.contains(1.0));
  CHECK(a.contains(1.5));
  CHECK(a.distance_to_complement(1.2) == doctest::Approx(0.2));
  CHECK(a.inradius_about_origin() == 0.0);
}

TEST_CASE("assumption on K") {
  ProblemSpec s = test::plateau_spec();
  const auto r = radii(1e-3, 1e4, 200);

  SUBCASE("compactly supported K") {
    s.K = Potential::plateau({1.0}, 1.0, 2.0);
    s.M = 1.0;
    for (double sigma : {0.0, 0.5}) {
      s.sigma = sigma;
      CHECK(check_assumption_K(s, r).holds);
    }
  }
  SUBCASE("constant K needs sigma >= 0") {
    s.sigma = -0.5;
    CHECK_FALSE(check_assumption_K(s, r).holds);
    s.sigma = 0.0;
    const auto rep = check_assumption_K(s, r);
    CHECK(rep.holds);
    CHECK(rep.sigma_admissible);
  }
  SUBCASE("growing K fails") {
    s.K = Potential::power_decay(1.0, -2.0);
    for (double sigma : {-1.0, 0.0, 0.5, 0.99}) {
      s.sigma = sigma;
      CHECK_FALSE(check_assumption_K(s, r).holds);
    }
  }
  SUBCASE("sigma beyond the admissible bound") {
    s.sigma = 1.0;
    CHECK_FALSE(check_assumption_K(s, r).sigma_admissible);
  }
}

TEST_CASE("assumption on A") {
  ProblemSpec s = test::plateau_spec();
  SUBCASE("plateau holds") {
    const auto rep = check_assumption_A(s);
    CHECK(rep.holds);
    CHECK(rep.inf_interior == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.inf_boundary == doctest::Approx(std::pow(2.0, 1.0 / 6.0)).epsilon(1e-12));
    CHECK(rep.argmin < 1e-6);
    CHECK(s.lambda.distance_to_complement(rep.argmin) > 1e-4);
  }
  SUBCASE("constant V fails") {
    s.V = Potential::constant(1.0);
    const auto rep = check_assumption_A(s);
    CHECK_FALSE(rep.holds);
    CHECK(rep.inf_interior == doctest::Approx(rep.inf_boundary));
  }
  SUBCASE("V = 2 - r fails") {
    s.V = Potential::plateau({2.0, -1.0}, 1.2, 1.8);
    const auto rep = check_assumption_A(s);
    CHECK_FALSE(rep.holds);
    // independent oracle: A is decreasing in r, so its infimum sits on the boundary
    double best = 1e300;
    for (int k = 0; k <= 100000; ++k) best = std::min(best, eval_concentration(s, k * 1e-5));
    CHECK(rep.inf_interior == doctest::Approx(best).epsilon(1e-9));
    CHECK(rep.inf_boundary == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("region minimum by sampling and golden section") {
  const auto m = minimize_on_region(DomainLambda::ball(2.0), [](double r) { return (r - 0.7312) * (r - 0.7312) + 3.0; });
  CHECK(m.argmin == doctest::Approx(0.7312).epsilon(1e-8));
  CHECK(m.value == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("delta zero") {
  const ProblemSpec s = test::plateau_spec();
  CHECK(delta_zero(s, 0.5) == doctest::Approx(std::cbrt(0.5)).epsilon(1e-10));
  CHECK(delta_zero(s, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spec validation") {
  ProblemSpec s = test::plateau_spec();
  CHECK_NOTHROW(s.validate());
  auto code = [](const ProblemSpec& x) {
    try {
      x.validate();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::precondition;
  };
  ProblemSpec t = s;
  t.p = 6.0;
  CHECK(code(t) == Errc::domain);
  t = s;
  t.epsilons = {0.1, -0.1};
  CHECK(code(t) == Errc::config);
  t = s;
  t.M = 0.0;
  CHECK(code(t) == Errc::config);
  t = s;
  t.lambda = {2.0, 1.0};
  CHECK(code(t) == Errc::config);
}
