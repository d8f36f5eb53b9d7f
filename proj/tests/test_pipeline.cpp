#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nls/error.hpp"
#include "nls/pipeline.hpp"

using namespace nls;
namespace fs = std::filesystem;

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

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nls_pipeline_" + name);
  fs::remove_all(dir);
  return dir;
}

const Pipeline& plateau_pipeline() {
  static const Pipeline p(plateau_config());
  return p;
}

}  // namespace

TEST_CASE("setup quantities") {
  const auto& p = plateau_pipeline();
  CHECK(p.x_star() < 1e-6);
  CHECK(p.amplitude_floor() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p.limit_energy() == doctest::Approx(p.ground_state().energy_canonical).epsilon(1e-12));
  CHECK(p.params().kappa == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(p.grid()->dim() == 3);
}

TEST_CASE("single solve passes its checks and writes stable outputs") {
  const auto& p = plateau_pipeline();
  const auto o = p.solve(0.1);
  CHECK(o.errors.empty());
  CHECK(o.original.holds);
  CHECK(o.positive);
  CHECK(o.residual_ok);
  REQUIRE(o.nehari_t.has_value());
  CHECK(*o.nehari_t == doctest::Approx(1.0).epsilon(1e-4));
  for (const auto& c : p.eps_criteria(o)) CHECK_MESSAGE(c.pass, c.id << ": " << c.detail);

  const auto a = scratch("a"), b = scratch("b");
  write_eps_outputs(a.string(), p, o);
  write_eps_outputs(b.string(), p, p.solve(0.1));
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    CHECK_MESSAGE(slurp(e.path()) == slurp(b / e.path().filename()), e.path().filename().string());
  }
  CHECK(files == 4);
  CHECK(fs::exists(a / "solve_eps_0.1.json"));
  CHECK(fs::exists(a / "verification_eps_0.1.json"));
  CHECK(fs::exists(a / "barrier_eps_0.1.csv"));

  SUBCASE("profile CSV round trip") {
    const RadialField u = read_profile_csv((a / "profile_eps_0.1.csv").string(), p.grid());
    CHECK(u.values == o.solve.solution.values);
    const auto again = p.check(u, 0.1);
    CHECK(again.solve.J_value == o.solve.J_value);
    CHECK(again.original.margin == o.original.margin);
    const auto c1 = p.eps_criteria(o), c2 = p.eps_criteria(again);
    REQUIRE(c1.size() == c2.size());
    for (std::size_t k = 0; k < c1.size(); ++k) CHECK(c1[k].pass == c2[k].pass);
    CHECK(code_of([&] { read_profile_csv((a / "profile_eps_0.1.csv").string(), build_grid(4.0, 1024, 1000.0, 3)); }) ==
          Errc::config);
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("penalization outside the admissible range is rejected before solving") {
  RunConfig c = plateau_config();
  c.penalization = PenalizationParams{0.25, 1.0, 0.5 / std::exp(1.0), 0.5};
  CHECK(code_of([&] { Pipeline bad(c); }) == Errc::form_not_positive);
  c = plateau_config();
  c.problem.p = 7.0;
  CHECK(code_of([&] { Pipeline bad(c); }) == Errc::domain);
}

TEST_CASE("a sweep needs three eps values") {
  RunConfig c = plateau_config();
  c.problem.epsilons = {0.1};
  const Pipeline p(c);
  CHECK(code_of([&] { p.sweep(1); }) == Errc::insufficient_sweep);
  c.problem.epsilons = {0.1, 0.1, 0.2};
  const Pipeline q(c);
  CHECK(code_of([&] { q.sweep(1); }) == Errc::insufficient_sweep);
}

TEST_CASE("sweep results do not depend on the thread count") {
  RunConfig c = plateau_config();
  c.verification.locate_eps0 = false;
  const Pipeline p(c);
  const auto one = p.sweep(1);
  const auto three = p.sweep(3);
  CHECK(one.passed());
  REQUIRE(one.runs.size() == 3);
  CHECK(one.runs[0].solve.eps == 0.2);
  CHECK(one.runs[2].solve.eps == 0.05);
  const auto a = scratch("j1"), b = scratch("j3");
  write_sweep_outputs(a.string(), p, one);
  write_sweep_outputs(b.string(), p, three);
  for (const char* f : {"sweep.csv", "sweep.json", "summary.txt"}) CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  const std::string summary = slurp(a / "summary.txt");
  CHECK(summary.find("PASS 4b") != std::string::npos);
  CHECK(summary.find("FAIL") == std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("file name tags") {
  CHECK(eps_tag(0.1) == "0.1");
  CHECK(eps_tag(0.05) == "0.05");
  CHECK(eps_tag(0.2) == "0.2");
  CHECK(eps_tag(1e-3) == "0.001");
  CHECK(std::stod(eps_tag(0.1 + 1e-17)) == 0.1 + 1e-17);
  CHECK(std::stod(eps_tag(std::nextafter(0.05, 1.0))) == std::nextafter(0.05, 1.0));
}

TEST_CASE("summary text") {
  const std::vector<Criterion> c{{"x", "first", true, "ok"}, {"y", "second", false, "bad"}};
  const std::string s = summary_text(c);
  CHECK(s.find("PASS x  first  (ok)") != std::string::npos);
  CHECK(s.find("FAIL y  second  (bad)") != std::string::npos);
  CHECK(s.find("some criteria failed") != std::string::npos);
}
