#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nls/barriers.hpp"
#include "nls/config.hpp"
#include "nls/groundstate.hpp"
#include "nls/solver.hpp"
#include "nls/verify.hpp"

namespace nls {

/// One solution and every check run on it. A check that could not run leaves its field empty
/// and a line in `errors`.
struct EpsOutcome {
  SolveReport solve;
  bool positive = false;
  bool residual_ok = false;
  double J_over_epsN = 0.0;
  double norm_over_epsN2 = 0.0;
  std::optional<double> nehari_t;
  std::optional<double> mountain_pass;
  SolvesOriginalReport original;
  double delta0 = 0.0;
  double barrier_R = 0.0;
  std::optional<EnvelopeFit> envelope;
  std::optional<double> tail_slope;
  std::optional<TailReport> tail;
  std::optional<double> rescaled_error;
  std::optional<BarrierFamily> barrier;
  std::optional<ComparisonReport> comparison;
  std::vector<std::string> errors;
};

struct Criterion {
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SweepOutcome {
  std::vector<EpsOutcome> runs;  // decreasing eps
  SweepDiagnostics diagnostics;
  std::optional<ThresholdReport> eps0;
  std::vector<Criterion> criteria;
  std::vector<std::string> errors;

  bool passed() const;
};

/// Everything a run needs that does not depend on eps: validated problem, penalization,
/// grid, canonical ground state and the limit energy.
class Pipeline {
 public:
  /// Throws the validation errors of the problem and penalization before any solve.
  explicit Pipeline(RunConfig cfg);

  const RunConfig& config() const noexcept { return cfg_; }
  const PenalizationParams& params() const noexcept { return params_; }
  const GridPtr& grid() const noexcept { return grid_; }
  const GroundState& ground_state() const noexcept { return gs_; }
  double x_star() const noexcept { return x_star_; }
  double limit_energy() const noexcept { return limit_energy_; }
  /// inf over the region of (V/K)^(1/(p-1))
  double amplitude_floor() const noexcept { return amplitude_floor_; }

  EpsOutcome solve(double eps) const;
  /// Checks on a stored solution; the solve fields are recomputed from the field.
  EpsOutcome check(const RadialField& u, double eps) const;
  /// Single-eps pass/fail list.
  std::vector<Criterion> eps_criteria(const EpsOutcome& o) const;

  /// Solves every eps of the problem with up to `jobs` threads; the result does not depend on jobs.
  /// Throws insufficient_sweep for fewer than three values.
  SweepOutcome sweep(int jobs) const;
  /// Diagnostics, threshold search and criteria over finished runs.
  SweepOutcome evaluate(std::vector<EpsOutcome> runs) const;

 private:
  EpsOutcome run_checks(SolveReport rep) const;

  RunConfig cfg_;
  PenalizationParams params_;
  GridPtr grid_;
  GroundState gs_;
  double x_star_ = 0.0;
  double limit_energy_ = 0.0;
  double amplitude_floor_ = 0.0;
};

/// Shortest decimal that reads back as eps; used in file names.
std::string eps_tag(double eps);

nlohmann::json to_json(const EpsOutcome& o, bool with_history = true);
nlohmann::json to_json(const Criterion& c);
nlohmann::json to_json(const SweepOutcome& s);
nlohmann::json describe(const Pipeline& p);

/// solve_eps_<tag>.json, verification_eps_<tag>.json and, with csv output, profile_eps_<tag>.csv
/// and barrier_eps_<tag>.csv.
void write_eps_outputs(const std::string& dir, const Pipeline& p, const EpsOutcome& o);
/// Per-eps files plus sweep.json, sweep.csv and summary.txt.
void write_sweep_outputs(const std::string& dir, const Pipeline& p, const SweepOutcome& s);
void write_sweep_csv(const std::string& path, const SweepOutcome& s);
std::string summary_text(const std::vector<Criterion>& criteria);

/// Reads a "r,u" profile; throws config unless its radii are the nodes of `grid`.
RadialField read_profile_csv(const std::string& path, GridPtr grid);

}  // namespace nls
