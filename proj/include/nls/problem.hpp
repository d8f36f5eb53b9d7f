#pragma once

#include <functional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace nls {

/// Radial, nonnegative, continuous potential. Evaluation is pure.
class Potential {
 public:
  struct Constant {
    double value = 0.0;

    bool operator==(const Constant&) const = default;
  };
  /// q(r) * cutoff(r; r_on, r_off), q a polynomial with coefficients c0, c1, ...
  /// and cutoff a C^2 quintic step that is 1 below r_on and 0 above r_off.
  struct Plateau {
    std::vector<double> poly;
    double r_on = 0.0;
    double r_off = 0.0;

    bool operator==(const Plateau&) const = default;
  };
  /// m (1 + r)^(-alpha)
  struct PowerDecay {
    double m = 0.0;
    double alpha = 0.0;

    bool operator==(const PowerDecay&) const = default;
  };
  /// Piecewise-linear through (r_k, v_k), constant beyond the last sample.
  struct Tabulated {
    std::vector<double> r;
    std::vector<double> v;

    bool operator==(const Tabulated&) const = default;
  };
  using Rep = std::variant<Constant, Plateau, PowerDecay, Tabulated>;

  Potential() : rep_(Constant{0.0}) {}
  explicit Potential(Rep rep);

  static Potential constant(double value) { return Potential(Constant{value}); }
  static Potential plateau(std::vector<double> poly, double r_on, double r_off) {
    return Potential(Plateau{std::move(poly), r_on, r_off});
  }
  static Potential power_decay(double m, double alpha) { return Potential(PowerDecay{m, alpha}); }
  static Potential tabulated(std::vector<double> r, std::vector<double> v) {
    return Potential(Tabulated{std::move(r), std::move(v)});
  }

  double operator()(double r) const;
  const Rep& rep() const noexcept { return rep_; }

  /// Returns c * this, keeping the family.
  Potential scaled(double c) const;

  bool operator==(const Potential&) const = default;

 private:
  Rep rep_;
};

/// Quintic C^2 step: 1 for r <= r_on, 0 for r >= r_off.
double smooth_cutoff(double r, double r_on, double r_off);

/// Bounded radial region: the ball B(0, r2) when r1 == 0, the annulus r1 < |x| < r2 otherwise.
struct DomainLambda {
  double r1 = 0.0;
  double r2 = 1.0;

  static DomainLambda ball(double radius) { return {0.0, radius}; }
  static DomainLambda annulus(double inner, double outer) { return {inner, outer}; }

  bool is_ball() const noexcept { return r1 == 0.0; }
  bool contains(double r) const noexcept { return r >= r1 && r < r2 && (r1 == 0.0 || r > r1); }
  double indicator(double r) const noexcept { return contains(r) ? 1.0 : 0.0; }
  /// Radius of the largest ball about the origin inside the region (0 for an annulus).
  double inradius_about_origin() const noexcept { return is_ball() ? r2 : 0.0; }
  /// Distance from a point at radius r to the complement of the region.
  double distance_to_complement(double r) const noexcept;

  bool operator==(const DomainLambda&) const = default;
};

struct ProblemSpec {
  int N = 3;
  double p = 3.0;
  std::vector<double> epsilons;
  Potential V;
  Potential K;
  DomainLambda lambda;
  double sigma = 0.0;
  double M = 1.0;

  /// Throws Errc::config / Errc::domain on invariant violations.
  void validate() const;

  bool operator==(const ProblemSpec&) const = default;
};

/// (N/(N-2), (N+2)/(N-2)); throws dimension_unsupported for N < 3.
std::pair<double, double> admissible_p_range(int N);

/// Exponent of V in the concentration function.
inline double concentration_exponent_V(int N, double p) { return (p + 1.0) / (p - 1.0) - 0.5 * N; }

/// A = V^((p+1)/(p-1) - N/2) / K^(2/(p-1)).
double concentration(int N, double p, double V, double K);
double eval_concentration(const ProblemSpec& spec, double r);

struct RegionMinimum {
  double value = 0.0;
  double argmin = 0.0;
};

/// inf of f over the closure of the region by dense sampling plus golden-section refinement.
RegionMinimum minimize_on_region(const DomainLambda& region, const std::function<double(double)>& f,
                                 int samples = 10000, double r_tol = 1e-10);

struct KReport {
  bool holds = false;
  double worst_ratio = 0.0;       // max K / (M (1+r)^sigma)
  bool sigma_admissible = false;  // sigma < (N-2)p - N, or sigma < -2 in 2D
  bool k_prime_holds = false;     // weaker log-corrected bound
  double k_prime_worst_ratio = 0.0;
};

KReport check_assumption_K(const ProblemSpec& spec, std::span<const double> sample_radii,
                           double beta = 1.0);

struct AReport {
  bool holds = false;
  double inf_interior = 0.0;
  double inf_boundary = 0.0;
  double argmin = 0.0;
};

AReport check_assumption_A(const ProblemSpec& spec);

/// delta_0 = inf over the region of (nu V / K)^(1/(p-1)).
double delta_zero(const ProblemSpec& spec, double nu);

}  // namespace nls
