#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nls/penalization.hpp"
#include "nls/problem.hpp"
#include "nls/solver.hpp"
#include "nls/verify.hpp"

namespace nls {

struct GridConfig {
  double core_end = 4.0;
  int n_core = 16384;
  double R_max = 1000.0;
  double growth = 1.02;

  bool operator==(const GridConfig&) const = default;
};

struct VerifyConfig {
  double nu = 0.5;
  std::vector<double> R_values{5.0, 10.0, 20.0};
  double tail_lo = 50.0;
  double tail_hi = 300.0;
  double slope_lo = -1.3;
  double slope_hi = -0.7;
  double residual_tol = 1e-8;   // relative to u_max
  double energy_tol = 0.15;     // relative gap to the limit energy at the smallest eps
  double norm_ratio_max = 2.0;  // spread of eps^(-N/2) ||u||_eps across the sweep
  double rescaled_tol = 0.05;
  double trend_tol = 0.05;
  double comparison_tol = 1e-8;
  EnvelopeVariant envelope;
  bool barrier = true;
  bool locate_eps0 = true;
  double eps0_upper = 0.4;
  int eps0_iterations = 8;

  bool operator==(const VerifyConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "nls_out";
  bool csv = true;

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  ProblemSpec problem;
  std::optional<PenalizationParams> penalization;  // empty means "auto"
  double penalization_safety = 0.5;
  GridConfig grid;
  SolverOptions solver;
  int jobs = 1;
  VerifyConfig verification;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;
};

/// The plateau example: N = 3, p = 4, V = (1 + r^2) cutoff(r; 2, 3), K = 1, Lambda = B(0, 1).
RunConfig plateau_config();

nlohmann::json potential_to_json(const Potential& V);
Potential potential_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunConfig& cfg);
/// Throws config on missing or malformed keys. Problem keys may sit under "problem" or at the top level.
RunConfig config_from_json(const nlohmann::json& j);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& cfg);

std::string to_string(EnvelopeKind kind);
std::string to_string(FarField ff);

}  // namespace nls
