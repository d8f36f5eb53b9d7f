// nls: ground states, penalized solves, eps-sweeps and their checks from a JSON config.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nls/config.hpp"
#include "nls/error.hpp"
#include "nls/groundstate.hpp"
#include "nls/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { ok = 0, verification_failed = 1, invalid_input = 2, config_error = 3, solver_error = 4, form_error = 5 };

int exit_code(nls::Errc c) {
  using nls::Errc;
  switch (c) {
    case Errc::config: return config_error;
    case Errc::solver_failure:
    case Errc::degenerate_solution:
    case Errc::no_maximum:
    case Errc::path_invalid:
    case Errc::fit_impossible: return solver_error;
    case Errc::form_not_positive: return form_error;
    default: return invalid_input;
  }
}

std::string g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw nls::Error(nls::Errc::config, "cannot write " + path.string());
  out << text;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw nls::Error(nls::Errc::config, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw nls::Error(nls::Errc::config, path.string() + ": " + e.what());
  }
}

void check_ground_state_p(int N, double p) {
  if (N < 1) throw nls::Error(nls::Errc::dimension_unsupported, "N must be positive");
  if (N >= 3 && !(p > 1.0 && p < (N + 2.0) / (N - 2.0))) {
    const auto [lo, hi] = nls::admissible_p_range(N);
    throw nls::Error(nls::Errc::domain, "p = " + g(p) + " is outside the admissible range (" + g(lo) + ", " +
                                            g(hi) + ") for N = " + std::to_string(N) +
                                            "; the ground state itself needs 1 < p < " + g(hi));
  }
  if (!(p > 1.0)) throw nls::Error(nls::Errc::domain, "p = " + g(p) + " must exceed 1");
}

int cmd_ground_state(int N, double p, const std::string& out) {
  check_ground_state_p(N, p);
  const nls::GroundState gs = nls::solve_canonical(N, p);
  fs::create_directories(out);
  const std::string stem = "groundstate_N" + std::to_string(N) + "_p" + nls::eps_tag(p);
  nls::write_ground_state_csv((fs::path(out) / (stem + ".csv")).string(), gs);
  const double nehari = (gs.kinetic + gs.mass - gs.potential) / gs.potential;
  json j = {{"N", N},
            {"p", p},
            {"w0", gs.w0},
            {"S", gs.sobolev},
            {"r_mp", gs.r_mp},
            {"energy", gs.energy_canonical},
            {"kinetic", gs.kinetic},
            {"mass", gs.mass},
            {"potential", gs.potential},
            {"nehari_defect", nehari},
            {"match_radius", gs.match_radius},
            {"tail_C", gs.tail_C},
            {"bisections", gs.bisections}};
  write_file(fs::path(out) / (stem + ".json"), j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return ok;
}

nls::RunConfig load(const std::string& path, const std::string& out) {
  nls::RunConfig cfg = nls::load_config(path);
  if (!out.empty()) cfg.output.dir = out;
  return cfg;
}

void print_criteria(const std::vector<nls::Criterion>& cs) { std::cout << nls::summary_text(cs); }

int cmd_solve(const std::string& path, double eps, const std::string& out) {
  const nls::RunConfig cfg = load(path, out);
  if (eps <= 0.0) {
    if (cfg.problem.epsilons.empty()) throw nls::Error(nls::Errc::config, "no eps given and the config lists none");
    eps = *std::min_element(cfg.problem.epsilons.begin(), cfg.problem.epsilons.end());
  }
  const nls::Pipeline pipe(cfg);
  const nls::EpsOutcome o = pipe.solve(eps);
  fs::create_directories(cfg.output.dir);
  write_file(fs::path(cfg.output.dir) / "config.json", nls::dump_config(cfg));
  nls::write_eps_outputs(cfg.output.dir, pipe, o);
  const auto cs = pipe.eps_criteria(o);
  std::cout << "eps " << nls::eps_tag(eps) << ": J/eps^N = " << o.J_over_epsN << ", u_max = " << o.solve.u_max
            << ", newton iterations " << o.solve.newton_iters << "\n";
  print_criteria(cs);
  return std::all_of(cs.begin(), cs.end(), [](const auto& c) { return c.pass; }) ? ok : verification_failed;
}

int cmd_sweep(const std::string& path, int jobs, const std::string& out) {
  const nls::RunConfig cfg = load(path, out);
  const nls::Pipeline pipe(cfg);
  const nls::SweepOutcome s = pipe.sweep(jobs > 0 ? jobs : cfg.jobs);
  fs::create_directories(cfg.output.dir);
  write_file(fs::path(cfg.output.dir) / "config.json", nls::dump_config(cfg));
  nls::write_sweep_outputs(cfg.output.dir, pipe, s);
  print_criteria(s.criteria);
  for (const auto& e : s.errors) std::cerr << "note: " << e << "\n";
  return s.passed() ? ok : verification_failed;
}

std::map<double, fs::path> stored_profiles(const fs::path& dir) {
  std::map<double, fs::path> out;
  const std::string prefix = "profile_eps_";
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind(prefix, 0) != 0 || entry.path().extension() != ".csv") continue;
    const std::string tag = name.substr(prefix.size(), name.size() - prefix.size() - 4);
    try {
      out[std::stod(tag)] = entry.path();
    } catch (const std::exception&) {
    }
  }
  return out;
}

int cmd_verify(const std::string& dir, const std::string& config_path) {
  const fs::path cfg_path = config_path.empty() ? fs::path(dir) / "config.json" : fs::path(config_path);
  nls::RunConfig cfg = nls::load_config(cfg_path.string());
  const nls::Pipeline pipe(cfg);
  const auto profiles = stored_profiles(dir);
  if (profiles.empty()) throw nls::Error(nls::Errc::config, "no profile_eps_*.csv in " + dir);

  std::vector<nls::EpsOutcome> runs;
  json per_eps = json::array();
  bool all = true;
  for (auto it = profiles.rbegin(); it != profiles.rend(); ++it) {
    nls::EpsOutcome o = pipe.check(nls::read_profile_csv(it->second.string(), pipe.grid()), it->first);
    const auto cs = pipe.eps_criteria(o);
    json j = nls::to_json(o, false);
    json cj = json::array();
    for (const auto& c : cs) {
      cj.push_back(nls::to_json(c));
      all = all && c.pass;
    }
    j["criteria"] = cj;
    per_eps.push_back(j);
    std::cout << "eps " << nls::eps_tag(it->first) << "\n";
    print_criteria(cs);
    runs.push_back(std::move(o));
  }
  json report = {{"runs", per_eps}};
  if (runs.size() >= 3) {
    const nls::SweepOutcome s = pipe.evaluate(std::move(runs));
    report["sweep"] = nls::to_json(s);
    std::cout << "sweep\n";
    print_criteria(s.criteria);
    all = all && s.passed();
  }
  report["passed"] = all;
  write_file(fs::path(dir) / "verify.json", report.dump(2) + "\n");
  return all ? ok : verification_failed;
}

int cmd_report(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("solve_eps_", 0) == 0 && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::vector<json> solves;
  for (const auto& f : files) solves.push_back(read_json(f));
  std::sort(solves.begin(), solves.end(), [](const json& a, const json& b) { return a["eps"].get<double>() > b["eps"].get<double>(); });

  std::ostringstream os;
  bool all = true;
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %-14s %-14s %-12s %-10s %-9s %-10s %s\n", "eps", "J/eps^N", "norm/eps^N/2",
                "u_max", "res/u_max", "original", "rescaled", "checks");
  os << line;
  for (const auto& s : solves) {
    const double eps = s["eps"].get<double>();
    bool pass = true;
    const fs::path vf = fs::path(dir) / ("verification_eps_" + nls::eps_tag(eps) + ".json");
    if (fs::exists(vf)) pass = read_json(vf)["passed"].get<bool>();
    all = all && pass;
    const double resc = s["rescaled_error"].is_number() ? s["rescaled_error"].get<double>() : std::nan("");
    std::snprintf(line, sizeof line, "%-10g %-14.8g %-14.8g %-12.8g %-10.3g %-9s %-10.4g %s\n", eps,
                  s["J_over_epsN"].get<double>(), s["norm_over_epsN2"].get<double>(), s["u_max"].get<double>(),
                  s["residual_max"].get<double>() / s["u_max"].get<double>(),
                  s["solves_original"].get<bool>() ? "yes" : "no", resc, pass ? "pass" : "FAIL");
    os << line;
  }
  const fs::path sweep = fs::path(dir) / "sweep.json";
  if (fs::exists(sweep)) {
    const json j = read_json(sweep);
    os << "\nsweep criteria\n";
    for (const auto& c : j["criteria"]) {
      os << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["id"].get<std::string>() << "  "
         << c["name"].get<std::string>() << "  (" << c["detail"].get<std::string>() << ")\n";
    }
    all = all && j["passed"].get<bool>();
  }
  if (solves.empty() && !fs::exists(sweep)) throw nls::Error(nls::Errc::config, "no reports in " + dir);
  os << (all ? "all checks passed\n" : "some checks failed\n");
  write_file(fs::path(dir) / "report.txt", os.str());
  std::cout << os.str();
  return all ? ok : verification_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized concentration solver for -eps^2 Lap u + V u = K u^p"};
  app.require_subcommand(1);

  int N = 3;
  double p = 3.0;
  std::string gs_out = ".";
  auto* gs = app.add_subcommand("ground-state", "canonical ground state of -w'' - (N-1)/r w' + w = w^p");
  gs->add_option("--N", N, "dimension")->required();
  gs->add_option("--p", p, "exponent")->required();
  gs->add_option("--out", gs_out, "output directory");

  std::string config_path, out;
  double eps = 0.0;
  auto* solve = app.add_subcommand("solve", "solve and verify at one eps");
  solve->add_option("config", config_path, "JSON config")->required();
  solve->add_option("--eps", eps, "eps (default: smallest listed)");
  solve->add_option("--out", out, "output directory (overrides the config)");

  int jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "solve every eps of the config and evaluate the trends");
  sweep->add_option("config", config_path, "JSON config")->required();
  sweep->add_option("--jobs", jobs, "parallel eps solves (default from config)")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out, "output directory (overrides the config)");

  std::string dir;
  auto* verify = app.add_subcommand("verify", "re-run the checks on stored profiles");
  verify->add_option("dir", dir, "directory with profile_eps_*.csv")->required();
  verify->add_option("--config", config_path, "config (default: <dir>/config.json)");

  auto* report = app.add_subcommand("report", "aggregate the stored run reports");
  report->add_option("dir", dir, "output directory of solve or sweep")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : invalid_input;
  }

  try {
    if (*gs) return cmd_ground_state(N, p, gs_out);
    if (*solve) return cmd_solve(config_path, eps, out);
    if (*sweep) return cmd_sweep(config_path, jobs, out);
    if (*verify) return cmd_verify(dir, config_path);
    if (*report) return cmd_report(dir);
  } catch (const nls::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_error;
  }
  return ok;
}
