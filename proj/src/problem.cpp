#include "nls/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nls/error.hpp"

namespace nls {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::dimension_unsupported: return "dimension-unsupported";
    case Errc::undefined_concentration: return "undefined-concentration";
    case Errc::domain: return "domain";
    case Errc::invalid_region: return "invalid-region";
    case Errc::inconsistent_region: return "inconsistent-region";
    case Errc::config: return "config";
    case Errc::solver_failure: return "solver-failure";
    case Errc::degenerate_solution: return "degenerate-solution";
    case Errc::form_not_positive: return "form-not-positive";
    case Errc::no_maximum: return "no-maximum";
    case Errc::path_invalid: return "path-invalid";
    case Errc::insufficient_sweep: return "insufficient-sweep";
    case Errc::window: return "window";
    case Errc::fit_impossible: return "fit-impossible";
    case Errc::geometry: return "geometry";
    case Errc::precondition: return "precondition";
  }
  return "unknown";
}

double smooth_cutoff(double r, double r_on, double r_off) {
  if (r <= r_on) return 1.0;
  if (r >= r_off) return 0.0;
  const double t = (r - r_on) / (r_off - r_on);
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

Potential::Potential(Rep rep) : rep_(std::move(rep)) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Constant>) {
          if (!(v.value >= 0.0)) throw Error(Errc::config, "constant potential must be nonnegative");
        } else if constexpr (std::is_same_v<T, Plateau>) {
          if (v.poly.empty()) throw Error(Errc::config, "plateau potential needs coefficients");
          if (!(v.r_on >= 0.0) || !(v.r_off >= v.r_on))
            throw Error(Errc::config, "plateau potential needs 0 <= r_on <= r_off");
        } else if constexpr (std::is_same_v<T, PowerDecay>) {
          if (!(v.m >= 0.0)) throw Error(Errc::config, "power_decay potential needs m >= 0");
        } else {
          if (v.r.empty() || v.r.size() != v.v.size())
            throw Error(Errc::config, "tabulated potential needs matching nonempty samples");
          if (!std::is_sorted(v.r.begin(), v.r.end()) ||
              std::adjacent_find(v.r.begin(), v.r.end()) != v.r.end())
            throw Error(Errc::config, "tabulated radii must be strictly increasing");
          if (std::any_of(v.v.begin(), v.v.end(), [](double x) { return !(x >= 0.0); }))
            throw Error(Errc::config, "tabulated potential must be nonnegative");
        }
      },
      rep_);
}

double Potential::operator()(double r) const {
  return std::visit(
      [r](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, Plateau>) {
          const double cut = smooth_cutoff(r, v.r_on, v.r_off);
          if (cut == 0.0) return 0.0;
          double q = 0.0;
          for (auto it = v.poly.rbegin(); it != v.poly.rend(); ++it) q = q * r + *it;
          return std::max(q, 0.0) * cut;
        } else if constexpr (std::is_same_v<T, PowerDecay>) {
          return v.m * std::pow(1.0 + r, -v.alpha);
        } else {
          if (r <= v.r.front()) return v.v.front();
          if (r >= v.r.back()) return v.v.back();
          const auto it = std::upper_bound(v.r.begin(), v.r.end(), r);
          const auto k = static_cast<std::size_t>(it - v.r.begin());
          const double t = (r - v.r[k - 1]) / (v.r[k] - v.r[k - 1]);
          return (1.0 - t) * v.v[k - 1] + t * v.v[k];
        }
      },
      rep_);
}

Potential Potential::scaled(double c) const {
  return std::visit(
      [c](auto v) -> Potential {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Constant>) {
          v.value *= c;
        } else if constexpr (std::is_same_v<T, Plateau>) {
          for (double& a : v.poly) a *= c;
        } else if constexpr (std::is_same_v<T, PowerDecay>) {
          v.m *= c;
        } else {
          for (double& a : v.v) a *= c;
        }
        return Potential(std::move(v));
      },
      rep_);
}

double DomainLambda::distance_to_complement(double r) const noexcept {
  if (!contains(r)) return 0.0;
  return is_ball() ? r2 - r : std::min(r - r1, r2 - r);
}

void ProblemSpec::validate() const {
  if (N < 2) throw Error(Errc::dimension_unsupported, "N must be at least 2");
  if (!(p > 1.0)) throw Error(Errc::domain, "p must exceed 1");
  if (N >= 3) {
    const double upper = (N + 2.0) / (N - 2.0);
    if (!(p < upper))
      throw Error(Errc::domain, "p = " + std::to_string(p) + " is not subcritical (p < " +
                                    std::to_string(upper) + ")");
  }
  for (double e : epsilons)
    if (!(e > 0.0)) throw Error(Errc::config, "all epsilons must be positive");
  if (!(M > 0.0)) throw Error(Errc::config, "M must be positive");
  if (!(lambda.r1 >= 0.0) || !(lambda.r2 > lambda.r1))
    throw Error(Errc::config, "Lambda must satisfy 0 <= r1 < r2");
}

std::pair<double, double> admissible_p_range(int N) {
  if (N < 3)
    throw Error(Errc::dimension_unsupported,
                "admissible range needs N >= 3 (for N = 2 the range is p > 1)");
  return {N / (N - 2.0), (N + 2.0) / (N - 2.0)};
}

double concentration(int N, double p, double V, double K) {
  if (!(V > 0.0) || !(K > 0.0))
    throw Error(Errc::undefined_concentration, "concentration needs V > 0 and K > 0");
  return std::pow(V, concentration_exponent_V(N, p)) / std::pow(K, 2.0 / (p - 1.0));
}

double eval_concentration(const ProblemSpec& spec, double r) {
  return concentration(spec.N, spec.p, spec.V(r), spec.K(r));
}

RegionMinimum minimize_on_region(const DomainLambda& region, const std::function<double(double)>& f,
                                 int samples, double r_tol) {
  const double a = region.r1;
  const double b = region.r2;
  const double h = (b - a) / samples;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= samples; ++k) {
    const double v = f(a + k * h);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  double lo = a + std::max(best - 1, 0) * h;
  double hi = a + std::min(best + 1, samples) * h;
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > r_tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  RegionMinimum out{best_val, a + best * h};
  const double xm = 0.5 * (lo + hi);
  const double fm = f(xm);
  if (fm < out.value) out = {fm, xm};
  return out;
}

KReport check_assumption_K(const ProblemSpec& spec, std::span<const double> sample_radii, double beta) {
  if (sample_radii.empty()) throw Error(Errc::precondition, "sample_radii must be nonempty");
  KReport rep;
  const int N = spec.N;
  const double p = spec.p;
  rep.sigma_admissible = N >= 3 ? spec.sigma < (N - 2) * p - N : spec.sigma < -2.0;
  const double kprime_exp = (N - 2) * p - N;
  for (double r : sample_radii) {
    if (!(r > 0.0)) throw Error(Errc::precondition, "sample radii must be positive");
    const double k = spec.K(r);
    rep.worst_ratio = std::max(rep.worst_ratio, k / (spec.M * std::pow(1.0 + r, spec.sigma)));
    const double kp_bound =
        spec.M * std::pow(1.0 + r, kprime_exp) / std::pow(std::log(r + 3.0), 1.0 + beta);
    rep.k_prime_worst_ratio = std::max(rep.k_prime_worst_ratio, k / kp_bound);
  }
  rep.holds = rep.sigma_admissible && rep.worst_ratio <= 1.0;
  rep.k_prime_holds = rep.k_prime_worst_ratio <= 1.0;
  return rep;
}

AReport check_assumption_A(const ProblemSpec& spec) {
  const auto& region = spec.lambda;
  const auto A = [&spec](double r) { return eval_concentration(spec, r); };
  constexpr int samples = 10000;
  const RegionMinimum interior = minimize_on_region(region, A, samples);

  AReport rep;
  rep.inf_interior = interior.value;
  rep.argmin = interior.argmin;
  rep.inf_boundary = A(region.r2);
  if (!region.is_ball()) rep.inf_boundary = std::min(rep.inf_boundary, A(region.r1));

  const double resolution = (region.r2 - region.r1) / samples;
  const double gap = rep.inf_boundary - rep.inf_interior;
  rep.holds = rep.inf_interior > 0.0 && gap > 1e-9 * std::abs(rep.inf_boundary) &&
              region.distance_to_complement(rep.argmin) > resolution;
  return rep;
}

double delta_zero(const ProblemSpec& spec, double nu) {
  const double q = 1.0 / (spec.p - 1.0);
  const auto f = [&](double r) {
    const double k = spec.K(r);
    if (k <= 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(nu * spec.V(r) / k, q);
  };
  return minimize_on_region(spec.lambda, f).value;
}

}  // namespace nls
