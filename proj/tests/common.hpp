#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "nls/groundstate.hpp"
#include "nls/penalization.hpp"
#include "nls/problem.hpp"
#include "nls/solver.hpp"

namespace nls::test {

inline ProblemSpec plateau_spec() {
  ProblemSpec s;
  s.N = 3;
  s.p = 4.0;
  s.epsilons = {0.2, 0.1, 0.05};
  s.V = Potential::plateau({1.0, 0.0, 1.0}, 2.0, 3.0);
  s.K = Potential::constant(1.0);
  s.lambda = DomainLambda::ball(1.0);
  s.sigma = 0.0;
  s.M = 1.0;
  return s;
}

inline const GroundState& canonical(int N, double p) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, std::unique_ptr<GroundState>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{N, p}];
  if (!slot) slot = std::make_unique<GroundState>(solve_canonical(N, p));
  return *slot;
}

inline GridPtr plateau_grid() {
  static const GridPtr g = build_grid(4.0, 16384, 1000.0, 3);
  return g;
}

inline const SolveReport& plateau_solution(double eps) {
  static std::mutex mu;
  static std::map<double, std::unique_ptr<SolveReport>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[eps];
  if (!slot) {
    const ProblemSpec spec = plateau_spec();
    SolveInit init;
    init.ground_state = &canonical(3, 4.0);
    slot = std::make_unique<SolveReport>(solve_least_energy(spec, select_params(spec), eps, plateau_grid(), init));
  }
  return *slot;
}

}  // namespace nls::test
