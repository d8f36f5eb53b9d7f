#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "common.hpp"
#include "nls/error.hpp"
#include "nls/groundstate.hpp"

using namespace nls;

TEST_CASE("one-dimensional ground state is sqrt(2) sech") {
  const auto& gs = test::canonical(1, 3.0);
  CHECK(gs.w0 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  double worst = 0.0;
  for (double x = 0.0; x <= 20.0; x += 1e-3) worst = std::max(worst, std::abs(gs.at(x) - std::sqrt(2.0) / std::cosh(x)));
  CHECK(worst < 1e-6);
  // int sech^2 = 2, int sech^2 tanh^2 = 2/3, int sech^4 = 4/3 over the line
  CHECK(gs.mass == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(gs.kinetic == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  CHECK(gs.potential == doctest::Approx(16.0 / 3.0).epsilon(1e-6));
  CHECK(gs.sobolev == doctest::Approx(std::pow(16.0 / 3.0, 0.25)).epsilon(1e-7));
  CHECK(gs.energy_canonical == doctest::Approx(4.0 / 3.0).epsilon(1e-7));
  CHECK(gs.r_mp == 4.0);
}

TEST_CASE("three-dimensional cubic ground state") {
  const auto& gs = test::canonical(3, 3.0);
  CHECK(std::abs(gs.w0 - 4.3374) < 1e-3);
}

TEST_CASE("mountain-pass exponent") {
  CHECK(mountain_pass_exponent(3.0) == 4.0);
  CHECK(mountain_pass_exponent(4.0) == doctest::Approx(10.0 / 3.0));
  CHECK(1.0 / mountain_pass_exponent(5.0) == doctest::Approx(0.5 - 1.0 / 6.0));
}

TEST_CASE("shooting and grid Newton agree") {
  GroundStateOptions opt;
  opt.n_core = 160000;
  for (auto [N, p] : {std::pair{3, 3.0}, std::pair{3, 4.0}, std::pair{5, 2.0}}) {
    const auto gs = solve_canonical(N, p, 1e-12, opt);
    const auto grid = solve_canonical_on_grid(N, p, gs.profile.grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.profile.size(); ++i)
      worst = std::max(worst, std::abs(grid.profile[i] - gs.profile[i]));
    CHECK(worst / gs.w0 < 1e-5);
    CHECK(grid.newton_iters > 0);
  }
}

TEST_CASE("Nehari identity, energy and Sobolev constant") {
  for (auto [N, p] : {std::pair{1, 3.0}, std::pair{3, 3.0}, std::pair{3, 4.0}, std::pair{5, 2.0}}) {
    const auto& gs = test::canonical(N, p);
    CHECK(std::abs(gs.kinetic + gs.mass - gs.potential) <= 1e-6 * gs.potential);
    CHECK(gs.energy_canonical == doctest::Approx((0.5 - 1.0 / (p + 1.0)) * gs.potential).epsilon(1e-6));
    const double r = mountain_pass_exponent(p);
    CHECK(std::pow(gs.sobolev, r) / r == doctest::Approx(gs.energy_canonical).epsilon(1e-6));
    CHECK(sobolev_constant(gs) == doctest::Approx(gs.sobolev).epsilon(1e-14));
    CHECK(gs.r_mp == doctest::Approx(r));
  }
}

TEST_CASE("Sobolev constant is stable under refinement") {
  GroundStateOptions fine;
  fine.n_core = 160000;
  for (auto [N, p] : {std::pair{1, 3.0}, std::pair{3, 3.0}}) {
    const double a = test::canonical(N, p).sobolev;
    const double b = solve_canonical(N, p, 1e-12, fine).sobolev;
    CHECK(std::abs(a - b) < 1e-7 * a);
  }
}

TEST_CASE("profile strictly decreasing") {
  for (auto [N, p] : {std::pair{1, 3.0}, std::pair{3, 4.0}, std::pair{5, 2.0}}) {
    const auto& gs = test::canonical(N, p);
    const auto& w = gs.profile.values;
    std::size_t bad = 0;
    for (std::size_t i = 1; i < w.size() && w[i] > 1e-280; ++i)
      if (!(w[i] < w[i - 1])) ++bad;
    CHECK(bad == 0);
  }
}

TEST_CASE("rescaling to the limit problem") {
  const auto& gs = test::canonical(3, 3.0);
  const auto same = rescale_to_limit(gs, 1.0, 1.0);
  for (std::size_t i = 0; i < same.size(); i += 1000) {
    CHECK(same[i] == gs.profile[i]);
    CHECK(same.r(i) == gs.profile.r(i));
  }
  const auto four = rescale_to_limit(gs, 4.0, 1.0);
  CHECK(four[0] == doctest::Approx(2.0 * gs.w0).epsilon(1e-15));
  CHECK(four.r(2000) == doctest::Approx(0.5 * gs.profile.r(2000)).epsilon(1e-15));
  CHECK_THROWS_AS(rescale_to_limit(gs, 0.0, 1.0), Error);
}

TEST_CASE("scaling identity for the limit energy") {
  for (auto [N, p] : {std::pair{3, 3.0}, std::pair{3, 4.0}}) {
    const auto& gs = test::canonical(N, p);
    for (auto [V0, K0] : {std::pair{1.0, 1.0}, std::pair{4.0, 1.0}, std::pair{2.5, 0.7}, std::pair{0.3, 3.0}}) {
      const auto v = rescale_to_limit(gs, V0, K0);
      const double F = limit_functional(v, V0, K0, p);
      const double A = concentration(N, p, V0, K0);
      CHECK(F == doctest::Approx(A * gs.energy_canonical).epsilon(1e-4));
    }
  }
  // the problem-level formula at the argmin of A
  const auto spec = test::plateau_spec();
  const auto& gs = test::canonical(3, 4.0);
  CHECK(limit_energy(spec, gs, 0.0) == doctest::Approx(gs.energy_canonical).epsilon(1e-14));
}

TEST_CASE("exponential decay envelope") {
  const auto& one = test::canonical(1, 3.0);
  const auto rep = check_exponential_decay(one.profile, 1.0);
  CHECK(rep.holds);
  CHECK(rep.C <= 2.0 * std::sqrt(2.0) * 1.01);
  CHECK_FALSE(check_exponential_decay(one.profile, 1.5).holds);
  const auto three = check_exponential_decay(test::canonical(3, 3.0).profile, 1.0);
  CHECK(three.holds);
  CHECK(std::isfinite(three.C));
}

TEST_CASE("exponent errors") {
  auto code = [](int N, double p) {
    try {
      solve_canonical(N, p);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::precondition;
  };
  CHECK(code(3, 7.0) == Errc::domain);
  CHECK(code(3, 5.0) == Errc::domain);
  CHECK(code(3, 1.0) == Errc::domain);
  CHECK(code(0, 3.0) == Errc::dimension_unsupported);
}

TEST_CASE("ground state CSV") {
  const auto& gs = test::canonical(1, 3.0);
  const auto path = (std::filesystem::temp_directory_path() / "nls_gs_test.csv").string();
  write_ground_state_csv(path, gs);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "r,w,dw");
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("0,", 0) == 0);
  std::filesystem::remove(path);
}
