#pragma once

#include <string>
#include <vector>

#include "nls/grid.hpp"
#include "nls/problem.hpp"

namespace nls {

struct GroundStateOptions {
  double core_end = 40.0;  // shooting horizon, in units of the decay length
  int n_core = 80000;
  double R_max = 4000.0;
};

/// Canonical positive radial solution of -Δw + w = w^p with derived constants.
struct GroundState {
  int N = 3;
  double p = 3.0;
  RadialField profile;        // w at the grid nodes
  std::vector<double> slope;  // w' at the grid nodes
  double w0 = 0.0;
  double kinetic = 0.0;    // int |w'|^2
  double mass = 0.0;       // int w^2
  double potential = 0.0;  // int w^(p+1)
  double energy_canonical = 0.0;
  double sobolev = 0.0;
  double r_mp = 0.0;
  double match_radius = 0.0;  // beyond it the profile is the Bessel tail
  double tail_C = 0.0;
  int bisections = 0;

  /// w(r) by Hermite interpolation with the stored slopes; tail formula past the grid.
  double at(double r) const;
  double slope_at(double r) const;
};

/// Shooting on w(0) with adaptive Dormand-Prince steps. tol bounds the relative
/// bracket width; the bisection always continues down to adjacent doubles.
/// Throws domain for p outside (1, (N+2)/(N-2)) and solver_failure without a bracket.
GroundState solve_canonical(int N, double p, double tol = 1e-12, const GroundStateOptions& opt = {});

struct GridGroundState {
  RadialField profile;
  int petviashvili_iters = 0;
  int newton_iters = 0;
  double residual_max = 0.0;
};

/// Independent solve of the same equation on a grid: Petviashvili iteration, then Newton.
GridGroundState solve_canonical_on_grid(int N, double p, GridPtr grid);

/// 2(p+1)/(p-1)
inline double mountain_pass_exponent(double p) { return 2.0 * (p + 1.0) / (p - 1.0); }

/// v(r) = (V0/K0)^(1/(p-1)) w(sqrt(V0) r) sampled on the canonical grid scaled by 1/sqrt(V0).
RadialField rescale_to_limit(const GroundState& gs, double V0, double K0);

double sobolev_constant(const GroundState& gs);

/// S^r_mp / r_mp * A(x*)
double limit_energy(const ProblemSpec& spec, const GroundState& gs, double x_star);

/// 1/2 int (|v'|^2 + V0 v^2) - K0/(p+1) int v^(p+1) on the field's grid.
double limit_functional(const RadialField& v, double V0, double K0, double p);

struct DecayReport {
  double C = 0.0;
  double slope = 0.0;  // regression slope of the log residual over the window
  double window_lo = 0.0;
  double window_hi = 0.0;
  bool holds = false;
};

/// Fits v(r) <= C (1 + r^2)^((1-N)/4) exp(-rate r) on the far half of the positive range.
DecayReport check_exponential_decay(const RadialField& field, double rate);

void write_ground_state_csv(const std::string& path, const GroundState& gs);

}  // namespace nls
