#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nls {

enum class Errc {
  dimension_unsupported,
  undefined_concentration,
  domain,
  invalid_region,
  inconsistent_region,
  config,
  solver_failure,
  degenerate_solution,
  form_not_positive,
  no_maximum,
  path_invalid,
  insufficient_sweep,
  window,
  fit_impossible,
  geometry,
  precondition,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Newton failure; carries the max-norm residual of every iterate.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, std::vector<double> history)
      : Error(Errc::solver_failure, what), history_(std::move(history)) {}

  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace nls
