#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nls/penalization.hpp"
#include "nls/problem.hpp"

namespace nls {

/// Closure at R_max. `harmonic` continues u by the decaying harmonic c r^(2-N) outside the
/// grid (Robin condition u' = -(N-2)u/R, Neumann for N <= 2); `dirichlet` pins u(R_max) = 0.
enum class FarField { dirichlet, harmonic };

/// Surface area of the unit sphere in R^N; 2 for N = 1 so radial integrals cover the line.
double sphere_area(int N);

/// Nodes 0 = r_0 < ... < r_n = R_max: uniform on [0, core_end], geometric beyond.
/// Carries the finite-volume geometry for dimension N.
class RadialGrid {
 public:
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return r_.size(); }
  const std::vector<double>& r() const noexcept { return r_; }
  double operator[](std::size_t i) const { return r_[i]; }
  double core_end() const noexcept { return core_end_; }
  int n_core() const noexcept { return n_core_; }
  double core_step() const noexcept { return core_end_ / n_core_; }
  double growth() const noexcept { return growth_; }
  double R_max() const noexcept { return r_.back(); }

  /// Node masses, about |S^{N-1}| int r^{N-1} dr over the dual cell. They are fixed so that the
  /// stencil is exact on r^2 as well as on constants and r^(2-N).
  const std::vector<double>& mass() const noexcept { return mass_; }
  /// Edge conductances: |S^{N-1}| / int_{r_i}^{r_{i+1}} r^{1-N} dr (midpoint rule on the first edge).
  const std::vector<double>& conductance() const noexcept { return cond_; }
  /// Extra diagonal stiffness at r_n for the harmonic closure.
  double far_field_coupling() const noexcept { return robin_; }

  /// First node index with r >= x.
  std::size_t lower_index(double x) const;

  bool operator==(const RadialGrid& o) const { return dim_ == o.dim_ && r_ == o.r_; }

  friend std::shared_ptr<const RadialGrid> build_grid(double, int, double, int, double);
  friend std::shared_ptr<const RadialGrid> scaled_grid(const RadialGrid&, double);

 private:
  void finish();

  int dim_ = 3;
  double core_end_ = 0.0;
  int n_core_ = 0;
  double growth_ = 1.0;
  std::vector<double> r_;
  std::vector<double> mass_;
  std::vector<double> cond_;
  double robin_ = 0.0;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Throws config when core_end <= 0, n_core < 64, R_max <= core_end or R_max < 100 core_end.
GridPtr build_grid(double core_end, int n_core, double R_max, int dim = 3, double growth_target = 1.02);

/// Same node pattern with every radius multiplied by c.
GridPtr scaled_grid(const RadialGrid& grid, double c);

struct RadialField {
  GridPtr grid;
  std::vector<double> values;

  RadialField() = default;
  RadialField(GridPtr g, std::vector<double> v);
  explicit RadialField(GridPtr g);

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  double r(std::size_t i) const { return grid->r()[i]; }

  /// Piecewise-cubic Hermite interpolant with three-point slopes; 0 beyond R_max.
  double at(double x) const;
  /// Index of the largest value (first on ties).
  std::size_t argmax() const;
};

/// Throws precondition when the two fields do not share a grid.
void require_same_grid(const RadialField& a, const RadialField& b);

RadialField sample(GridPtr grid, const std::function<double(double)>& f);

/// Stiffness product (S u)_i = sum of edge fluxes, so that u^T S u approximates int |u'|^2.
std::vector<double> stiffness_apply(const RadialGrid& grid, std::span<const double> u, FarField ff);

/// -eps^2 (u'' + (N-1)/r u') + V u as (eps^2 S u + M V u) / M.
RadialField apply_operator(const RadialField& u, double eps, const Potential& V,
                           FarField ff = FarField::harmonic);

/// sum M_i f_i
double integrate(const RadialGrid& grid, std::span<const double> f);
/// sum M_i a_i b_i
double inner(const RadialField& a, const RadialField& b);

double dirichlet_energy(const RadialField& u, FarField ff = FarField::harmonic);
double norm_eps(const RadialField& u, double eps, const Potential& V, FarField ff = FarField::harmonic);

struct QuadraticFormReport {
  double form_value = 0.0;
  double hardy_weight_integral = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
};

/// Discrete Rayleigh quotient of |u'|^2 - H u^2 against the Hardy weight. In the plane the
/// weight is 1/(r^2 log^2(r/rho0)) and the field must vanish on B(0, rho0).
QuadraticFormReport hardy_rayleigh(const RadialField& u, const PenalizationParams& params,
                                   const DomainLambda& region);

/// CSV with header "r,<name>" and %.17g values.
void write_csv(const std::string& path, const RadialField& f, const std::string& name);
void write_csv(const std::string& path, const RadialGrid& grid,
               const std::vector<std::pair<std::string, const std::vector<double>*>>& columns);

}  // namespace nls
