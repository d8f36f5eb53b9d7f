#pragma once

#include <span>
#include <vector>

#include "nls/grid.hpp"
#include "nls/groundstate.hpp"
#include "nls/penalization.hpp"
#include "nls/problem.hpp"
#include "nls/solver.hpp"

namespace nls {

struct SolvesOriginalReport {
  bool holds = true;
  double margin = 0.0;  // min over exterior nodes of log(eps^2 H) - log(K u^(p-1)); +inf when vacuous
  double original_residual_max = 0.0;  // -eps^2 Lap u + V u - K u^p, max norm
};

SolvesOriginalReport check_solves_original(const RadialField& u, const ProblemSpec& spec,
                                           const PenalizationParams& params, double eps,
                                           FarField ff = FarField::harmonic);

enum class EnvelopeKind { fast, slow, borderline };

struct EnvelopeVariant {
  EnvelopeKind kind = EnvelopeKind::fast;
  double alpha = 2.0;  // slow variant only

  bool operator==(const EnvelopeVariant&) const = default;
};

struct EnvelopeFit {
  double C = 0.0;
  double lambda = 0.0;
  double max_log_excess = 0.0;
  double anchor = 0.0;  // first radius used, eps R from x_eps
  double s_tail = 0.0;  // d log u / d log r over the tail window
  bool valid = false;
};

/// C exp(-(lambda/eps) phi(d)) (1 + r^2)^(-(N-2)/2) with phi(d) = d/(1+d) (fast), d/(1+d)^(alpha/2)
/// (slow) or log(1+d) (borderline). The envelope touches u at the anchor and lambda is the largest
/// value it can take there; C is then the smallest constant that covers u. Throws fit_impossible.
EnvelopeFit decay_envelope_fit(const RadialField& u, double x_eps, double eps, double R,
                               const EnvelopeVariant& variant = {}, double tail_lo = 0.0, double tail_hi = 0.0);

/// The same fit on log u, for fields that underflow.
EnvelopeFit decay_envelope_fit_log(const RadialGrid& grid, std::span<const double> log_u, double x_eps, double eps,
                                   double R, const EnvelopeVariant& variant = {});

/// max over nodes at distance >= anchor of log u - log envelope(C, lambda).
double envelope_excess(const RadialField& u, double x_eps, double eps, double anchor, double C, double lambda,
                       const EnvelopeVariant& variant = {});

/// Least-squares slope of log u against log r over [lo, hi].
double tail_slope(const RadialField& u, double lo, double hi);

struct SweepRow {
  double eps = 0.0;
  double x_eps = 0.0;
  double A_at_x_eps = 0.0;
  double J_over_epsN = 0.0;
  double norm_over_epsN2 = 0.0;
  double u_max = 0.0;
  bool solves_original = false;
  double threshold_margin = 0.0;
  std::vector<double> sup_outside;  // one per R; NaN when Lambda \ B(x_eps, eps R) is empty
};

struct SweepDiagnostics {
  std::vector<double> R_values;
  std::vector<SweepRow> rows;  // decreasing eps
  double inf_A = 0.0;
  bool A_trend = true;    // A(x_eps) non-increasing toward inf A
  bool sup_trend_R = true;    // sup outside the balls non-increasing in R
  bool sup_trend_eps = true;  // and non-increasing as eps decreases
};

/// Throws insufficient_sweep for fewer than three reports.
SweepDiagnostics concentration_diagnostics(std::span<const SolveReport> sweep, const ProblemSpec& spec,
                                           const PenalizationParams& params,
                                           std::vector<double> R_values = {5.0, 10.0, 20.0},
                                           double trend_tol = 0.05);

/// sup over |y| <= 10 of |u(x_eps + eps y) - v(y)| / v(0) with v the limit profile at argmin A.
/// Throws window when x_eps + 10 eps exceeds the grid.
double rescaled_error(const RadialField& u, double x_eps, double eps, const GroundState& gs,
                      const ProblemSpec& spec);

struct TailReport {
  double min_scaled = 0.0;  // min of r^(N-2) u over the window
  double flatness = 0.0;    // max / min of r^(N-2) u over the last decade of the window
  bool holds = false;
};

/// Throws window when the window reaches into the last 10% of the grid.
TailReport tail_lower_bound(const RadialField& u, int N, double lo, double hi);

struct ThresholdReport {
  bool found = false;
  double eps_hold = 0.0;  // largest eps seen to satisfy the criterion
  double eps_fail = 0.0;  // smallest eps seen to violate it
  int iterations = 0;
};

/// Bisection over eps for the solves-original criterion. eps_hold must satisfy it; eps_fail is
/// doubled (up to four times) until the criterion fails.
ThresholdReport locate_eps0(const ProblemSpec& spec, const PenalizationParams& params, GridPtr grid,
                            const GroundState& gs, double eps_hold, double eps_fail, int iterations = 8,
                            const SolverOptions& opt = {});

}  // namespace nls
