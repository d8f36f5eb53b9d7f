#include "nls/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "nls/error.hpp"

namespace nls {

using nlohmann::json;

namespace {

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string note(const std::string& what, const std::exception& e) { return what + ": " + e.what(); }

json opt(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

bool strictly_decreasing(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] < xs[i - 1])) return false;
  return true;
}

bool nonincreasing(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] <= xs[i - 1])) return false;
  return true;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::config, "cannot write " + path.string());
  out << text;
}

}  // namespace

bool SweepOutcome::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass; });
}

std::string eps_tag(double eps) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, eps);
  return std::string(buf, res.ptr);
}

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {
  const ProblemSpec& spec = cfg_.problem;
  spec.validate();
  params_ = cfg_.penalization ? *cfg_.penalization : select_params(spec, cfg_.penalization_safety);
  validate_params(params_, spec.lambda, spec.N);
  grid_ = build_grid(cfg_.grid.core_end, cfg_.grid.n_core, cfg_.grid.R_max, spec.N, cfg_.grid.growth);
  gs_ = solve_canonical(spec.N, spec.p);
  const auto amin = minimize_on_region(spec.lambda, [&](double r) { return eval_concentration(spec, r); });
  x_star_ = amin.argmin;
  limit_energy_ = nls::limit_energy(spec, gs_, x_star_);
  amplitude_floor_ = delta_zero(spec, 1.0);
}

EpsOutcome Pipeline::solve(double eps) const {
  SolveInit init;
  init.ground_state = &gs_;
  return run_checks(solve_least_energy(cfg_.problem, params_, eps, grid_, init, cfg_.solver));
}

EpsOutcome Pipeline::check(const RadialField& u, double eps) const {
  const ProblemSpec& spec = cfg_.problem;
  const FarField ff = cfg_.solver.far_field;
  SolveReport rep;
  rep.solution = u;
  rep.eps = eps;
  rep.J_value = functional_J(u, spec, params_, eps, ff);
  rep.norm_eps_value = norm_eps(u, eps, spec.V, ff);
  const std::size_t k = u.argmax();
  rep.x_eps = u.r(k);
  rep.u_max = u[k];
  double res = 0.0;
  for (double x : residual(u, spec, params_, eps, ff).values) res = std::max(res, std::abs(x));
  rep.residual_max = res;
  rep.initial_residual = res;
  rep.history = {res};
  return run_checks(std::move(rep));
}

EpsOutcome Pipeline::run_checks(SolveReport rep) const {
  const ProblemSpec& spec = cfg_.problem;
  const VerifyConfig& vc = cfg_.verification;
  const FarField ff = cfg_.solver.far_field;
  const double eps = rep.eps;
  const RadialField& u = rep.solution;

  EpsOutcome o;
  o.positive = rep.u_max > 0.0 && std::all_of(u.values.begin(), u.values.end(), [](double x) { return x > 0.0; });
  o.residual_ok = rep.residual_max <= vc.residual_tol * rep.u_max;
  o.J_over_epsN = rep.J_value / std::pow(eps, spec.N);
  o.norm_over_epsN2 = rep.norm_eps_value / std::pow(eps, 0.5 * spec.N);

  try {
    o.nehari_t = nehari_project(u, spec, params_, eps, ff).first;
  } catch (const Error& e) {
    o.errors.push_back(note("nehari", e));
  }
  try {
    o.mountain_pass = mountain_pass_level_estimate(rep, spec, params_, ff);
  } catch (const Error& e) {
    o.errors.push_back(note("mountain_pass", e));
  }
  o.original = check_solves_original(u, spec, params_, eps, ff);
  o.delta0 = delta_zero(spec, vc.nu);
  o.barrier_R = choose_barrier_radius(u, rep.x_eps, eps, o.delta0);
  try {
    o.envelope = decay_envelope_fit(u, rep.x_eps, eps, o.barrier_R, vc.envelope, vc.tail_lo, vc.tail_hi);
  } catch (const Error& e) {
    o.errors.push_back(note("envelope", e));
  }
  try {
    o.tail_slope = tail_slope(u, vc.tail_lo, vc.tail_hi);
    o.tail = tail_lower_bound(u, spec.N, vc.tail_lo, vc.tail_hi);
  } catch (const Error& e) {
    o.errors.push_back(note("tail", e));
  }
  try {
    o.rescaled_error = nls::rescaled_error(u, rep.x_eps, eps, gs_, spec);
  } catch (const Error& e) {
    o.errors.push_back(note("rescaled_error", e));
  }
  if (vc.barrier) {
    try {
      BarrierOptions bo;
      bo.nu = vc.nu;
      o.barrier = barrier_W_eps(spec, params_, eps, rep.x_eps, o.barrier_R, grid_, bo);
      o.comparison = comparison_check(u, *o.barrier, spec, params_, eps, vc.comparison_tol);
    } catch (const Error& e) {
      o.errors.push_back(note("barrier", e));
    }
  }
  o.solve = std::move(rep);
  return o;
}

std::vector<Criterion> Pipeline::eps_criteria(const EpsOutcome& o) const {
  const VerifyConfig& vc = cfg_.verification;
  std::vector<Criterion> out;
  out.push_back({"converged", "positive solution with small residual", o.positive && o.residual_ok,
                 "residual/u_max = " + fmt("%.3g", o.solve.residual_max / o.solve.u_max)});
  out.push_back({"amplitude", "u_max above inf (V/K)^(1/(p-1))", o.solve.u_max > amplitude_floor_,
                 "u_max = " + fmt("%.6g", o.solve.u_max) + ", floor = " + fmt("%.6g", amplitude_floor_)});
  out.push_back({"solves_original", "eps^2 H >= K u^(p-1) outside the region", o.original.holds,
                 "margin = " + fmt("%.4g", o.original.margin)});
  const bool tail_ok = o.tail && o.tail_slope && o.tail->holds && *o.tail_slope >= vc.slope_lo &&
                       *o.tail_slope <= vc.slope_hi;
  out.push_back({"tail", "far-field slope and r^(N-2) u lower bound", tail_ok,
                 o.tail_slope ? "slope = " + fmt("%.6f", *o.tail_slope) +
                                    (o.tail ? ", flatness = " + fmt("%.4f", o.tail->flatness) : std::string())
                              : std::string("not computed")});
  const bool env_ok = o.envelope && o.envelope->valid && o.envelope->max_log_excess <= 0.0 && o.envelope->lambda > 0.0;
  out.push_back({"envelope", "decay envelope covers the solution with lambda > 0", env_ok,
                 o.envelope ? "lambda = " + fmt("%.6g", o.envelope->lambda) + ", C = " + fmt("%.6g", o.envelope->C)
                            : std::string("not computed")});
  out.push_back({"rescaled", "rescaled profile close to the limit profile",
                 o.rescaled_error && *o.rescaled_error <= vc.rescaled_tol,
                 o.rescaled_error ? "error = " + fmt("%.4g", *o.rescaled_error) : std::string("not computed")});
  if (vc.barrier)
    out.push_back({"comparison", "u <= delta0 W beyond eps R", o.comparison && o.comparison->holds,
                   o.comparison ? "max violation = " + fmt("%.3g", o.comparison->max_violation)
                                : std::string("barrier not built")});
  return out;
}

SweepOutcome Pipeline::sweep(int jobs) const {
  std::vector<double> eps = cfg_.problem.epsilons;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  if (eps.size() < 3) throw Error(Errc::insufficient_sweep, "a sweep needs at least three distinct eps values");

  std::vector<std::optional<EpsOutcome>> slots(eps.size());
  std::vector<std::string> failures(eps.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < eps.size(); i = next++) {
      try {
        slots[i] = solve(eps[i]);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const int n = std::clamp(jobs, 1, static_cast<int>(eps.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (!slots[i]) throw Error(Errc::solver_failure, "eps = " + eps_tag(eps[i]) + ": " + failures[i]);

  std::vector<EpsOutcome> runs;
  for (auto& s : slots) runs.push_back(std::move(*s));
  return evaluate(std::move(runs));
}

SweepOutcome Pipeline::evaluate(std::vector<EpsOutcome> runs) const {
  const ProblemSpec& spec = cfg_.problem;
  const VerifyConfig& vc = cfg_.verification;
  std::sort(runs.begin(), runs.end(), [](const EpsOutcome& a, const EpsOutcome& b) { return a.solve.eps > b.solve.eps; });

  SweepOutcome s;
  std::vector<SolveReport> reports;
  for (const auto& r : runs) reports.push_back(r.solve);
  s.diagnostics = concentration_diagnostics(reports, spec, params_, vc.R_values, vc.trend_tol);
  s.runs = std::move(runs);
  const EpsOutcome& last = s.runs.back();

  if (vc.locate_eps0) {
    // largest eps of the sweep that already satisfies the criterion
    const EpsOutcome* hold = nullptr;
    for (const auto& r : s.runs)
      if (r.original.holds) {
        hold = &r;
        break;
      }
    if (hold) {
      const double upper = std::max(vc.eps0_upper, 2.0 * hold->solve.eps);
      SolverOptions so = cfg_.solver;
      try {
        s.eps0 = locate_eps0(spec, params_, grid_, gs_, hold->solve.eps, upper, vc.eps0_iterations, so);
      } catch (const Error& e) {
        s.eps0 = ThresholdReport{};
        s.errors.push_back(note("eps0", e));
      }
    } else {
      s.eps0 = ThresholdReport{};
    }
  }

  auto& C = s.criteria;
  {
    bool ok = true;
    double worst = 0.0;
    for (const auto& r : s.runs) {
      ok = ok && r.positive && r.residual_ok;
      worst = std::max(worst, r.solve.residual_max / r.solve.u_max);
    }
    C.push_back({"4a", "every solve converges to a positive solution", ok, "max residual/u_max = " + fmt("%.3g", worst)});
  }
  {
    std::vector<double> gaps;
    for (const auto& r : s.runs) gaps.push_back(std::abs(r.J_over_epsN - limit_energy_) / limit_energy_);
    const bool ok = gaps.back() <= vc.energy_tol && nonincreasing(gaps);
    std::string d = "limit = " + fmt("%.10g", limit_energy_) + ", relative gaps";
    for (double g : gaps) d += " " + fmt("%.4g", g);
    C.push_back({"4b", "eps^-N J approaches the limit energy", ok, d});
  }
  {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : s.runs) {
      lo = std::min(lo, r.norm_over_epsN2);
      hi = std::max(hi, r.norm_over_epsN2);
    }
    C.push_back({"4c", "eps^-N/2 ||u||_eps stays bounded", hi < vc.norm_ratio_max * lo,
                 "max/min = " + fmt("%.6g", hi / lo)});
  }
  {
    bool ok = true;
    double least = std::numeric_limits<double>::infinity();
    for (const auto& r : s.runs) {
      ok = ok && r.solve.u_max > amplitude_floor_;
      least = std::min(least, r.solve.u_max);
    }
    C.push_back({"4d", "u_max above inf (V/K)^(1/(p-1))", ok,
                 "min u_max = " + fmt("%.6g", least) + ", floor = " + fmt("%.6g", amplitude_floor_)});
  }
  {
    bool ok = last.original.holds;
    std::string d = "margin at smallest eps = " + fmt("%.4g", last.original.margin);
    if (vc.locate_eps0) {
      ok = ok && s.eps0 && s.eps0->found;
      d += s.eps0 && s.eps0->found
               ? ", eps0 in [" + fmt("%.6g", s.eps0->eps_hold) + ", " + fmt("%.6g", s.eps0->eps_fail) + "]"
               : ", threshold not bracketed";
    }
    C.push_back({"4e", "solution of the original problem for small eps", ok, d});
  }
  {
    bool ok = true;
    double smin = std::numeric_limits<double>::infinity(), smax = -smin, flat = 0.0;
    for (const auto& r : s.runs) {
      const bool row = r.tail && r.tail_slope && r.tail->holds && *r.tail_slope >= vc.slope_lo &&
                       *r.tail_slope <= vc.slope_hi;
      ok = ok && row;
      if (r.tail_slope) {
        smin = std::min(smin, *r.tail_slope);
        smax = std::max(smax, *r.tail_slope);
      }
      if (r.tail) flat = std::max(flat, r.tail->flatness);
    }
    C.push_back({"4f", "far-field slope and tail lower bound", ok,
                 "slopes in [" + fmt("%.6f", smin) + ", " + fmt("%.6f", smax) + "], max flatness " + fmt("%.4f", flat)});
  }
  {
    std::vector<double> errs;
    bool have = true;
    for (const auto& r : s.runs) {
      if (!r.rescaled_error) {
        have = false;
        break;
      }
      errs.push_back(*r.rescaled_error);
    }
    const bool ok = have && errs.back() <= vc.rescaled_tol && strictly_decreasing(errs);
    std::string d = "errors";
    for (double e : errs) d += " " + fmt("%.4g", e);
    C.push_back({"4g", "rescaled solution converges to the limit profile", ok, have ? d : "not computed"});
  }
  {
    bool ok = true;
    double lam = std::numeric_limits<double>::infinity();
    for (const auto& r : s.runs) {
      const bool row = r.envelope && r.envelope->valid && r.envelope->max_log_excess <= 0.0 && r.envelope->lambda > 0.0;
      ok = ok && row;
      if (r.envelope) lam = std::min(lam, r.envelope->lambda);
    }
    C.push_back({"4h", "decay envelope fit", ok, "min lambda = " + fmt("%.6g", lam)});
  }
  if (vc.barrier) {
    const bool ok = last.comparison && last.comparison->holds;
    C.push_back({"5c", "comparison with the barrier at the smallest eps", ok,
                 last.comparison ? "max violation = " + fmt("%.3g", last.comparison->max_violation)
                                 : std::string("barrier not built")});
  }
  C.push_back({"conc", "A(x_eps) and sup outside eps-balls decrease", s.diagnostics.A_trend && s.diagnostics.sup_trend_R,
               std::string("A trend ") + (s.diagnostics.A_trend ? "ok" : "broken") + ", sup trend in R " +
                   (s.diagnostics.sup_trend_R ? "ok" : "broken")});
  return s;
}

json to_json(const EpsOutcome& o, bool with_history) {
  const SolveReport& r = o.solve;
  json j;
  j["eps"] = r.eps;
  j["J_value"] = r.J_value;
  j["J_over_epsN"] = o.J_over_epsN;
  j["norm_eps"] = r.norm_eps_value;
  j["norm_over_epsN2"] = o.norm_over_epsN2;
  j["x_eps"] = r.x_eps;
  j["u_max"] = r.u_max;
  j["newton_iters"] = r.newton_iters;
  j["continuation_steps"] = r.continuation_steps;
  j["residual_max"] = r.residual_max;
  j["initial_residual"] = r.initial_residual;
  if (with_history) j["residual_history"] = r.history;
  j["positive"] = o.positive;
  j["residual_ok"] = o.residual_ok;
  j["nehari_t"] = opt(o.nehari_t);
  j["mountain_pass_estimate"] = opt(o.mountain_pass);
  j["solves_original"] = o.original.holds;
  j["solves_original_margin"] = o.original.margin;
  j["original_residual_max"] = o.original.original_residual_max;
  j["delta0"] = o.delta0;
  j["barrier_R"] = o.barrier_R;
  if (o.envelope) {
    const auto& e = *o.envelope;
    j["envelope"] = {{"C", e.C}, {"lambda", e.lambda}, {"max_log_excess", e.max_log_excess}, {"anchor", e.anchor},
                     {"s_tail", e.s_tail}, {"valid", e.valid}};
  } else {
    j["envelope"] = nullptr;
  }
  j["tail_slope"] = opt(o.tail_slope);
  if (o.tail)
    j["tail_lower_bound"] = {{"min_scaled", o.tail->min_scaled}, {"flatness", o.tail->flatness}, {"holds", o.tail->holds}};
  else
    j["tail_lower_bound"] = nullptr;
  j["rescaled_error"] = opt(o.rescaled_error);
  if (o.barrier) {
    const auto& b = *o.barrier;
    j["barrier"] = {{"mu", b.mu},           {"nu", b.nu},
                    {"r_bar", b.r_bar},     {"R", b.R},
                    {"delta0", b.delta0},   {"lambda_fit", b.lambda_fit},
                    {"C_fit", b.C_fit},     {"min_residual", b.min_residual},
                    {"gluing_jump", b.gluing_jump}};
  } else {
    j["barrier"] = nullptr;
  }
  if (o.comparison) {
    const auto& c = *o.comparison;
    j["comparison"] = {{"holds", c.holds},
                       {"max_violation", c.max_violation},
                       {"worst_radius", c.worst_radius},
                       {"inequation_holds", c.inequation_holds},
                       {"inequation_max", c.inequation_max}};
  } else {
    j["comparison"] = nullptr;
  }
  j["errors"] = o.errors;
  return j;
}

json to_json(const Criterion& c) {
  return {{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}};
}

json to_json(const SweepOutcome& s) {
  json j;
  const auto& d = s.diagnostics;
  j["R_values"] = d.R_values;
  j["inf_A"] = d.inf_A;
  j["A_trend"] = d.A_trend;
  j["sup_trend_R"] = d.sup_trend_R;
  j["sup_trend_eps"] = d.sup_trend_eps;
  json rows = json::array();
  for (const auto& r : d.rows)
    rows.push_back({{"eps", r.eps},
                    {"x_eps", r.x_eps},
                    {"A_at_x_eps", r.A_at_x_eps},
                    {"J_over_epsN", r.J_over_epsN},
                    {"norm_over_epsN2", r.norm_over_epsN2},
                    {"u_max", r.u_max},
                    {"solves_original", r.solves_original},
                    {"threshold_margin", r.threshold_margin},
                    {"sup_outside", r.sup_outside}});
  j["rows"] = rows;
  if (s.eps0)
    j["eps0"] = {{"found", s.eps0->found},
                 {"eps_hold", s.eps0->eps_hold},
                 {"eps_fail", s.eps0->eps_fail},
                 {"iterations", s.eps0->iterations}};
  else
    j["eps0"] = nullptr;
  json runs = json::array();
  for (const auto& r : s.runs) runs.push_back(to_json(r, false));
  j["runs"] = runs;
  json crit = json::array();
  for (const auto& c : s.criteria) crit.push_back(to_json(c));
  j["criteria"] = crit;
  j["errors"] = s.errors;
  j["passed"] = s.passed();
  return j;
}

json describe(const Pipeline& p) {
  const auto& g = *p.grid();
  const auto& pp = p.params();
  const auto& gs = p.ground_state();
  return {{"penalization", {{"kappa", pp.kappa}, {"beta", pp.beta}, {"rho0", pp.rho0}, {"rho", pp.rho}}},
          {"kappa_bound", kappa_bound(pp, p.config().problem.N)},
          {"grid",
           {{"nodes", g.size()},
            {"core_end", g.core_end()},
            {"n_core", g.n_core()},
            {"core_step", g.core_step()},
            {"growth", g.growth()},
            {"R_max", g.R_max()}}},
          {"ground_state", {{"w0", gs.w0}, {"sobolev", gs.sobolev}, {"r_mp", gs.r_mp}, {"energy", gs.energy_canonical}}},
          {"x_star", p.x_star()},
          {"limit_energy", p.limit_energy()},
          {"amplitude_floor", p.amplitude_floor()}};
}

void write_eps_outputs(const std::string& dir, const Pipeline& p, const EpsOutcome& o) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string tag = eps_tag(o.solve.eps);
  json report = to_json(o);
  report["setup"] = describe(p);
  write_text(fs::path(dir) / ("solve_eps_" + tag + ".json"), report.dump(2) + "\n");

  json ver;
  ver["eps"] = o.solve.eps;
  json crit = json::array();
  bool all = true;
  for (const auto& c : p.eps_criteria(o)) {
    crit.push_back(to_json(c));
    all = all && c.pass;
  }
  ver["criteria"] = crit;
  ver["passed"] = all;
  write_text(fs::path(dir) / ("verification_eps_" + tag + ".json"), ver.dump(2) + "\n");

  if (p.config().output.csv) {
    write_csv((fs::path(dir) / ("profile_eps_" + tag + ".csv")).string(), o.solve.solution, "u");
    if (o.barrier) write_csv((fs::path(dir) / ("barrier_eps_" + tag + ".csv")).string(), o.barrier->log_field, "log_W");
  }
}

void write_sweep_csv(const std::string& path, const SweepOutcome& s) {
  std::string out = "eps,x_eps,A_at_x_eps,J_over_epsN,norm_over_epsN2,u_max,solves_original,threshold_margin";
  for (double R : s.diagnostics.R_values) out += ",sup_outside_R" + eps_tag(R);
  out += ",residual_max,newton_iters,rescaled_error,envelope_lambda,envelope_C,tail_slope,tail_flatness\n";
  auto num = [](double x) { return fmt("%.17g", x); };
  auto optnum = [&](const std::optional<double>& x) { return x ? num(*x) : std::string("nan"); };
  for (std::size_t i = 0; i < s.diagnostics.rows.size(); ++i) {
    const auto& r = s.diagnostics.rows[i];
    const auto& o = s.runs[i];
    out += num(r.eps) + "," + num(r.x_eps) + "," + num(r.A_at_x_eps) + "," + num(r.J_over_epsN) + "," +
           num(r.norm_over_epsN2) + "," + num(r.u_max) + "," + (r.solves_original ? "1" : "0") + "," +
           num(r.threshold_margin);
    for (double x : r.sup_outside) out += "," + num(x);
    out += "," + num(o.solve.residual_max) + "," + std::to_string(o.solve.newton_iters) + "," +
           optnum(o.rescaled_error) + "," + (o.envelope ? num(o.envelope->lambda) : "nan") + "," +
           (o.envelope ? num(o.envelope->C) : "nan") + "," + optnum(o.tail_slope) + "," +
           (o.tail ? num(o.tail->flatness) : "nan") + "\n";
  }
  write_text(path, out);
}

std::string summary_text(const std::vector<Criterion>& criteria) {
  std::string out;
  bool all = true;
  for (const auto& c : criteria) {
    out += std::string(c.pass ? "PASS " : "FAIL ") + c.id + "  " + c.name + "  (" + c.detail + ")\n";
    all = all && c.pass;
  }
  out += all ? "all criteria passed\n" : "some criteria failed\n";
  return out;
}

void write_sweep_outputs(const std::string& dir, const Pipeline& p, const SweepOutcome& s) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& o : s.runs) write_eps_outputs(dir, p, o);
  json j = to_json(s);
  j["setup"] = describe(p);
  write_text(fs::path(dir) / "sweep.json", j.dump(2) + "\n");
  write_sweep_csv((fs::path(dir) / "sweep.csv").string(), s);
  write_text(fs::path(dir) / "summary.txt", summary_text(s.criteria));
}

RadialField read_profile_csv(const std::string& path, GridPtr grid) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, "cannot read " + path);
  std::string line;
  std::getline(in, line);
  std::vector<double> r, u;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(Errc::config, path + ": expected two columns");
    // strtod keeps subnormal values that stod rejects
    char* end = nullptr;
    const double ri = std::strtod(line.c_str(), &end);
    if (end != line.c_str() + comma) throw Error(Errc::config, path + ": bad number in '" + line + "'");
    const char* tail = line.c_str() + comma + 1;
    const double ui = std::strtod(tail, &end);
    if (end == tail) throw Error(Errc::config, path + ": bad number in '" + line + "'");
    r.push_back(ri);
    u.push_back(ui);
  }
  const auto& nodes = grid->r();
  if (r.size() != nodes.size()) throw Error(Errc::config, path + ": profile does not sit on the configured grid");
  for (std::size_t i = 0; i < r.size(); ++i)
    if (std::abs(r[i] - nodes[i]) > 1e-12 * std::max(1.0, nodes[i]))
      throw Error(Errc::config, path + ": profile does not sit on the configured grid");
  return RadialField(grid, std::move(u));
}

}  // namespace nls
