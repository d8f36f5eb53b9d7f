#pragma once

#include <utility>
#include <vector>

#include "nls/grid.hpp"
#include "nls/groundstate.hpp"
#include "nls/kernels.hpp"
#include "nls/penalization.hpp"
#include "nls/problem.hpp"

namespace nls {

/// The penalized problem at one eps with all node data evaluated once.
class PenalizedProblem {
 public:
  PenalizedProblem(const ProblemSpec& spec, const PenalizationParams& params, double eps, GridPtr grid,
                   FarField ff = FarField::harmonic);

  const ProblemSpec& spec() const noexcept { return spec_; }
  const PenalizationParams& params() const noexcept { return params_; }
  double eps() const noexcept { return eps_; }
  const GridPtr& grid() const noexcept { return grid_; }
  double robin() const noexcept { return robin_; }
  const std::vector<double>& V() const noexcept { return V_; }
  const std::vector<double>& K() const noexcept { return K_; }
  const std::vector<double>& e2h() const noexcept { return e2h_; }
  const std::vector<unsigned char>& inside() const noexcept { return inside_; }
  kernels::NodeCoefficients coefficients() const;

  double J(std::span<const double> u) const;
  /// -eps^2 Lap u + V u - g_eps(u) at every node.
  std::vector<double> residual(std::span<const double> u) const;
  /// eps^2 u^T S u + sum M V u^2
  double quadratic(std::span<const double> u) const;

  kernels::Backend backend = kernels::default_backend();

 private:
  ProblemSpec spec_;
  PenalizationParams params_;
  double eps_;
  GridPtr grid_;
  double robin_;
  std::vector<double> V_;
  std::vector<double> K_;
  std::vector<double> e2h_;
  std::vector<unsigned char> inside_;
};

double functional_J(const RadialField& u, const ProblemSpec& spec, const PenalizationParams& params, double eps,
                    FarField ff = FarField::harmonic);

RadialField residual(const RadialField& u, const ProblemSpec& spec, const PenalizationParams& params, double eps,
                     FarField ff = FarField::harmonic);

struct SolverOptions {
  double tol = 1e-9;  // residual_max <= tol * u_max
  int max_iters = 80;
  int continuation_steps = 10;
  double continuation_factor = 1.25;
  FarField far_field = FarField::harmonic;

  bool operator==(const SolverOptions&) const = default;
};

struct SolveReport {
  RadialField solution;
  double eps = 0.0;
  double J_value = 0.0;
  double norm_eps_value = 0.0;
  double x_eps = 0.0;  // radius of the maximum
  double u_max = 0.0;
  int newton_iters = 0;
  double residual_max = 0.0;
  double initial_residual = 0.0;
  int continuation_steps = 0;
  std::vector<double> history;
};

/// Either a starting field or the canonical ground state to build the ansatz from.
/// With neither, the ground state is computed.
struct SolveInit {
  const RadialField* field = nullptr;
  const GroundState* ground_state = nullptr;
};

/// (V(x*)/K(x*))^(1/(p-1)) w(sqrt(V(x*)) |r - x*| / eps) at x* = argmin of A over the region.
RadialField ground_state_ansatz(const ProblemSpec& spec, double eps, const GroundState& gs, GridPtr grid);

/// Semismooth Newton with Armijo damping; continuation in eps when the direct solve fails.
/// Throws SolverFailure and Errc::degenerate_solution.
SolveReport solve_least_energy(const ProblemSpec& spec, const PenalizationParams& params, double eps,
                               GridPtr grid, const SolveInit& init = {}, const SolverOptions& opt = {});

/// Maximizer t* of t -> J(t u) and the value there. Throws no_maximum.
std::pair<double, double> nehari_project(const RadialField& u, const ProblemSpec& spec,
                                         const PenalizationParams& params, double eps,
                                         FarField ff = FarField::harmonic);

/// Maximum of J along the ray through the solution up to a point of negative energy.
double mountain_pass_level_estimate(const SolveReport& report, const ProblemSpec& spec,
                                    const PenalizationParams& params, FarField ff = FarField::harmonic);

}  // namespace nls
