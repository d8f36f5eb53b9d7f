#pragma once

#include "nls/grid.hpp"
#include "nls/penalization.hpp"
#include "nls/problem.hpp"

namespace nls {

struct MinimalSolution {
  RadialField w;  // 1 on the region, the exterior solution beyond its boundary
  double c = 0.0;  // min of r^(N-2) w outside the region
  double C = 0.0;  // max of the same
  double boundary_radius = 0.0;
  double boundary_slope = 0.0;  // one-sided w' just outside the boundary
};

/// Solves -Lap w - H w = 0 outside the ball region with w = 1 on its boundary and the harmonic
/// closure at R_max. Throws form_not_positive when kappa reaches the bound.
MinimalSolution minimal_solution_w(const PenalizationParams& params, const DomainLambda& region, int N,
                                   GridPtr grid);

struct SupersolutionValue {
  double value = 0.0;
  double minus_laplacian = 0.0;
  double residual = 0.0;  // -Lap W - H W with the exterior H
};

/// W = r^(2-N) ((N-2) beta - kappa L^-beta), L = log(r / rho0); in the plane W = beta (beta + 1) - kappa L^-beta.
SupersolutionValue supersolution_W(const PenalizationParams& params, int N, double r);

/// log cosh without overflow
double log_cosh(double z);

struct BarrierOptions {
  double nu = 0.5;
  double mu = 0.0;     // 0 picks 0.9 sqrt((1 - nu) inf V)
  double r_bar = 0.0;  // 0 picks 0.4 of the distance from x_eps to the boundary
};

struct BarrierFamily {
  double eps = 0.0;
  double x_eps = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double r_bar = 0.0;
  double R = 0.0;
  double delta0 = 0.0;
  RadialField log_field;  // log W_eps
  RadialField field;      // W_eps, may underflow far out
  double lambda_fit = 0.0;
  double C_fit = 0.0;
  double min_residual = 0.0;   // min over nodes beyond eps R of the residual divided by W
  double gluing_jump = 0.0;    // W'(r_bar+) - W'(r_bar-), relative to W(r_bar)
};

/// Glued cosh barrier about the origin (radial problems concentrate there when x_eps = 0).
/// Throws precondition for mu too large or x_eps != 0 and geometry when eps R >= r_bar.
BarrierFamily barrier_W_eps(const ProblemSpec& spec, const PenalizationParams& params, double eps,
                            double x_eps, double R, GridPtr grid, const BarrierOptions& opt = {});

struct ComparisonReport {
  bool holds = true;
  double max_violation = 0.0;  // max of u / (delta0 W) - 1, clipped at 0
  double worst_radius = 0.0;
  bool inequation_holds = true;
  double inequation_max = 0.0;  // max of -eps^2 Lap u - eps^2 H u + (1 - nu) V u beyond eps R
};

/// Smallest R such that u <= delta0 at every node with |x - x_eps| >= eps R.
double choose_barrier_radius(const RadialField& u, double x_eps, double eps, double delta0);

ComparisonReport comparison_check(const RadialField& u, const BarrierFamily& barrier, const ProblemSpec& spec,
                                  const PenalizationParams& params, double eps, double tol = 1e-8);

/// Outer pieces of the slow-decay barriers in log form, zero at d = r_bar.
/// alpha < 2: (lambda/eps)(r_bar^(1-alpha/2) - d^(1-alpha/2)); alpha = 2: (nu/eps) log(r_bar/d).
double slow_barrier_log(double lambda, double eps, double r_bar, double d, double alpha);
double borderline_barrier_log(double nu, double eps, double r_bar, double d);

/// (-Lap + V) z at r for z = r^(2-N) (1 + r^-delta).
double tail_subsolution_residual(const Potential& V, int N, double delta, double r);

}  // namespace nls
