#include "nls/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "nls/error.hpp"

namespace nls {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::config, what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) bad("unknown key '" + it.key() + "' in " + where);
}

double num(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) bad(where + " needs '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) bad(where + "." + key + " must be a number");
  return v.get<double>();
}

template <class T>
void opt_num(const json& j, const char* key, const std::string& where, T& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) bad(where + "." + key + " must be an integer");
    out = v.get<T>();
  } else {
    if (!v.is_number()) bad(where + "." + key + " must be a number");
    out = v.get<T>();
  }
}

void opt_bool(const json& j, const char* key, const std::string& where, bool& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_boolean()) bad(where + "." + key + " must be true or false");
  out = j.at(key).get<bool>();
}

std::vector<double> num_list(const json& v, const std::string& where) {
  if (!v.is_array()) bad(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) bad(where + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::pair<double, double> num_pair(const json& v, const std::string& where) {
  auto xs = num_list(v, where);
  if (xs.size() != 2) bad(where + " must hold two numbers");
  return {xs[0], xs[1]};
}

ProblemSpec problem_from_json(const json& j, const std::string& where) {
  ProblemSpec s;
  if (!j.contains("N") || !j.at("N").is_number_integer()) bad(where + " needs integer 'N'");
  s.N = j.at("N").get<int>();
  s.p = num(j, "p", where);
  if (j.contains("epsilons")) s.epsilons = num_list(j.at("epsilons"), where + ".epsilons");
  if (!j.contains("V")) bad(where + " needs 'V'");
  s.V = potential_from_json(j.at("V"));
  s.K = j.contains("K") ? potential_from_json(j.at("K")) : Potential::constant(1.0);
  if (!j.contains("Lambda")) bad(where + " needs 'Lambda'");
  const json& L = j.at("Lambda");
  only_keys(L, where + ".Lambda", {"r1", "r2"});
  s.lambda.r1 = L.contains("r1") ? num(L, "r1", where + ".Lambda") : 0.0;
  s.lambda.r2 = num(L, "r2", where + ".Lambda");
  opt_num(j, "sigma", where, s.sigma);
  opt_num(j, "M", where, s.M);
  return s;
}

json problem_to_json(const ProblemSpec& s) {
  return json{{"N", s.N},
              {"p", s.p},
              {"epsilons", s.epsilons},
              {"V", potential_to_json(s.V)},
              {"K", potential_to_json(s.K)},
              {"Lambda", {{"r1", s.lambda.r1}, {"r2", s.lambda.r2}}},
              {"sigma", s.sigma},
              {"M", s.M}};
}

EnvelopeKind envelope_kind(const std::string& s) {
  if (s == "fast") return EnvelopeKind::fast;
  if (s == "slow") return EnvelopeKind::slow;
  if (s == "borderline") return EnvelopeKind::borderline;
  bad("envelope kind must be fast, slow or borderline, got '" + s + "'");
}

FarField far_field(const std::string& s) {
  if (s == "harmonic") return FarField::harmonic;
  if (s == "dirichlet") return FarField::dirichlet;
  bad("far_field must be harmonic or dirichlet, got '" + s + "'");
}

std::string str(const json& j, const char* key, const std::string& where) {
  if (!j.at(key).is_string()) bad(where + "." + key + " must be a string");
  return j.at(key).get<std::string>();
}

}  // namespace

std::string to_string(EnvelopeKind kind) {
  switch (kind) {
    case EnvelopeKind::fast: return "fast";
    case EnvelopeKind::slow: return "slow";
    case EnvelopeKind::borderline: return "borderline";
  }
  return "fast";
}

std::string to_string(FarField ff) { return ff == FarField::harmonic ? "harmonic" : "dirichlet"; }

RunConfig plateau_config() {
  RunConfig c;
  c.problem.N = 3;
  c.problem.p = 4.0;
  c.problem.epsilons = {0.2, 0.1, 0.05};
  c.problem.V = Potential::plateau({1.0, 0.0, 1.0}, 2.0, 3.0);
  c.problem.K = Potential::constant(1.0);
  c.problem.lambda = DomainLambda::ball(1.0);
  c.problem.sigma = 0.0;
  c.problem.M = 1.0;
  return c;
}

json potential_to_json(const Potential& V) {
  return std::visit(
      [](const auto& rep) -> json {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, Potential::Constant>) {
          return {{"family", "constant"}, {"value", rep.value}};
        } else if constexpr (std::is_same_v<T, Potential::Plateau>) {
          return {{"family", "plateau"}, {"poly", rep.poly}, {"r_on", rep.r_on}, {"r_off", rep.r_off}};
        } else if constexpr (std::is_same_v<T, Potential::PowerDecay>) {
          return {{"family", "power_decay"}, {"m", rep.m}, {"alpha", rep.alpha}};
        } else {
          return {{"family", "tabulated"}, {"r", rep.r}, {"v", rep.v}};
        }
      },
      V.rep());
}

Potential potential_from_json(const json& j) {
  if (j.is_number()) return Potential::constant(j.get<double>());
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
    bad("potential needs a 'family' string");
  const std::string fam = j.at("family").get<std::string>();
  const std::string where = "potential '" + fam + "'";
  if (fam == "constant") {
    only_keys(j, where, {"family", "value"});
    return Potential::constant(num(j, "value", where));
  }
  if (fam == "plateau") {
    only_keys(j, where, {"family", "poly", "r_on", "r_off"});
    if (!j.contains("poly")) bad(where + " needs 'poly'");
    return Potential::plateau(num_list(j.at("poly"), where + ".poly"), num(j, "r_on", where), num(j, "r_off", where));
  }
  if (fam == "power_decay") {
    only_keys(j, where, {"family", "m", "alpha"});
    return Potential::power_decay(num(j, "m", where), num(j, "alpha", where));
  }
  if (fam == "tabulated") {
    only_keys(j, where, {"family", "r", "v"});
    if (!j.contains("r") || !j.contains("v")) bad(where + " needs 'r' and 'v'");
    return Potential::tabulated(num_list(j.at("r"), where + ".r"), num_list(j.at("v"), where + ".v"));
  }
  bad("unknown potential family '" + fam + "'");
}

json to_json(const RunConfig& c) {
  json j;
  j["problem"] = problem_to_json(c.problem);
  if (c.penalization) {
    const auto& p = *c.penalization;
    j["penalization"] = {{"kappa", p.kappa}, {"beta", p.beta}, {"rho0", p.rho0}, {"rho", p.rho}};
  } else {
    j["penalization"] = "auto";
  }
  j["penalization_safety"] = c.penalization_safety;
  j["grid"] = {{"core_end", c.grid.core_end}, {"n_core", c.grid.n_core}, {"R_max", c.grid.R_max},
               {"growth", c.grid.growth}};
  j["solver"] = {{"tol", c.solver.tol},
                 {"max_iters", c.solver.max_iters},
                 {"continuation_steps", c.solver.continuation_steps},
                 {"continuation_factor", c.solver.continuation_factor},
                 {"far_field", to_string(c.solver.far_field)}};
  j["sweep"] = {{"jobs", c.jobs}};
  const auto& v = c.verification;
  j["verification"] = {{"nu", v.nu},
                       {"R_values", v.R_values},
                       {"tail_window", {v.tail_lo, v.tail_hi}},
                       {"slope_range", {v.slope_lo, v.slope_hi}},
                       {"residual_tol", v.residual_tol},
                       {"energy_tol", v.energy_tol},
                       {"norm_ratio_max", v.norm_ratio_max},
                       {"rescaled_tol", v.rescaled_tol},
                       {"trend_tol", v.trend_tol},
                       {"comparison_tol", v.comparison_tol},
                       {"envelope", {{"kind", to_string(v.envelope.kind)}, {"alpha", v.envelope.alpha}}},
                       {"barrier", v.barrier},
                       {"locate_eps0", v.locate_eps0},
                       {"eps0_upper", v.eps0_upper},
                       {"eps0_iterations", v.eps0_iterations}};
  j["output"] = {{"dir", c.output.dir}, {"csv", c.output.csv}};
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) bad("config must be a JSON object");
  RunConfig c;
  if (j.contains("problem")) {
    only_keys(j, "config", {"problem", "penalization", "penalization_safety", "grid", "solver", "sweep",
                            "verification", "output"});
    only_keys(j.at("problem"), "problem", {"N", "p", "epsilons", "V", "K", "Lambda", "sigma", "M"});
    c.problem = problem_from_json(j.at("problem"), "problem");
  } else {
    only_keys(j, "config", {"N", "p", "epsilons", "V", "K", "Lambda", "sigma", "M", "penalization",
                            "penalization_safety", "grid", "solver", "sweep", "verification", "output"});
    c.problem = problem_from_json(j, "config");
  }

  if (j.contains("penalization")) {
    const json& p = j.at("penalization");
    if (p.is_string()) {
      if (p.get<std::string>() != "auto") bad("penalization must be \"auto\" or an object");
    } else {
      only_keys(p, "penalization", {"kappa", "beta", "rho0", "rho"});
      PenalizationParams pp;
      pp.kappa = num(p, "kappa", "penalization");
      pp.beta = num(p, "beta", "penalization");
      pp.rho0 = num(p, "rho0", "penalization");
      pp.rho = num(p, "rho", "penalization");
      c.penalization = pp;
    }
  }
  opt_num(j, "penalization_safety", "config", c.penalization_safety);

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    only_keys(g, "grid", {"core_end", "n_core", "R_max", "growth"});
    opt_num(g, "core_end", "grid", c.grid.core_end);
    opt_num(g, "n_core", "grid", c.grid.n_core);
    opt_num(g, "R_max", "grid", c.grid.R_max);
    opt_num(g, "growth", "grid", c.grid.growth);
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    only_keys(s, "solver", {"tol", "max_iters", "continuation_steps", "continuation_factor", "far_field"});
    opt_num(s, "tol", "solver", c.solver.tol);
    opt_num(s, "max_iters", "solver", c.solver.max_iters);
    opt_num(s, "continuation_steps", "solver", c.solver.continuation_steps);
    opt_num(s, "continuation_factor", "solver", c.solver.continuation_factor);
    if (s.contains("far_field")) c.solver.far_field = far_field(str(s, "far_field", "solver"));
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    only_keys(s, "sweep", {"jobs"});
    opt_num(s, "jobs", "sweep", c.jobs);
  }
  if (j.contains("verification")) {
    const json& v = j.at("verification");
    const std::string w = "verification";
    only_keys(v, w, {"nu", "R_values", "tail_window", "slope_range", "residual_tol", "energy_tol",
                     "norm_ratio_max", "rescaled_tol", "trend_tol", "comparison_tol", "envelope", "barrier",
                     "locate_eps0", "eps0_upper", "eps0_iterations"});
    auto& o = c.verification;
    opt_num(v, "nu", w, o.nu);
    if (v.contains("R_values")) o.R_values = num_list(v.at("R_values"), w + ".R_values");
    if (v.contains("tail_window")) std::tie(o.tail_lo, o.tail_hi) = num_pair(v.at("tail_window"), w + ".tail_window");
    if (v.contains("slope_range")) std::tie(o.slope_lo, o.slope_hi) = num_pair(v.at("slope_range"), w + ".slope_range");
    opt_num(v, "residual_tol", w, o.residual_tol);
    opt_num(v, "energy_tol", w, o.energy_tol);
    opt_num(v, "norm_ratio_max", w, o.norm_ratio_max);
    opt_num(v, "rescaled_tol", w, o.rescaled_tol);
    opt_num(v, "trend_tol", w, o.trend_tol);
    opt_num(v, "comparison_tol", w, o.comparison_tol);
    if (v.contains("envelope")) {
      const json& e = v.at("envelope");
      only_keys(e, w + ".envelope", {"kind", "alpha"});
      if (e.contains("kind")) o.envelope.kind = envelope_kind(str(e, "kind", w + ".envelope"));
      opt_num(e, "alpha", w + ".envelope", o.envelope.alpha);
    }
    opt_bool(v, "barrier", w, o.barrier);
    opt_bool(v, "locate_eps0", w, o.locate_eps0);
    opt_num(v, "eps0_upper", w, o.eps0_upper);
    opt_num(v, "eps0_iterations", w, o.eps0_iterations);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    only_keys(o, "output", {"dir", "csv"});
    if (o.contains("dir")) c.output.dir = str(o, "dir", "output");
    opt_bool(o, "csv", "output", c.output.csv);
  }

  if (c.jobs < 1) bad("sweep.jobs must be at least 1");
  if (c.solver.tol <= 0.0 || c.solver.max_iters < 1) bad("solver needs tol > 0 and max_iters >= 1");
  if (c.verification.tail_lo <= 0.0 || c.verification.tail_hi <= c.verification.tail_lo)
    bad("verification.tail_window must satisfy 0 < lo < hi");
  if (c.verification.R_values.empty()) bad("verification.R_values must not be empty");
  return c;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

}  // namespace nls
