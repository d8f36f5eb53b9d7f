#include "nls/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "nls/error.hpp"
#include "nls/kernels.hpp"

namespace nls {

double sphere_area(int N) {
  if (N == 1) return 2.0;
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

namespace {

// (b^N - a^N) / N without cancellation
double shell_moment(double a, double b, int N) {
  double s = 0.0;
  double bk = 1.0;
  for (int k = 0; k < N; ++k) {
    s += bk * std::pow(a, N - 1 - k);
    bk *= b;
  }
  return (b - a) * s / N;
}

// int_a^b r^(1-N) dr for 0 < a < b
double inverse_moment(double a, double b, int N) {
  const double x = std::log1p((b - a) / a);
  if (N == 1) return b - a;
  if (N == 2) return x;
  return -std::pow(a, 2.0 - N) * std::expm1((2.0 - N) * x) / (N - 2.0);
}

}  // namespace

void RadialGrid::finish() {
  const std::size_t n = r_.size();
  const double omega = sphere_area(dim_);
  cond_.assign(n - 1, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = r_[i];
    const double b = r_[i + 1];
    if (a == 0.0 && dim_ > 1)
      cond_[i] = omega * std::pow(0.5 * b, dim_ - 1) / b;
    else
      cond_[i] = omega / inverse_moment(a, b, dim_);
  }
  robin_ = dim_ > 2 ? omega * (dim_ - 2.0) * std::pow(r_.back(), dim_ - 2.0) : 0.0;
  // masses that make the stencil exact for r^2: M_i = (flux out - flux in of r^2) / (2N)
  mass_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double out = i + 1 < n ? cond_[i] * (r_[i + 1] * r_[i + 1] - r_[i] * r_[i])
                                 : omega * 2.0 * std::pow(r_[i], dim_);
    const double in = i > 0 ? cond_[i - 1] * (r_[i] * r_[i] - r_[i - 1] * r_[i - 1]) : 0.0;
    mass_[i] = (out - in) / (2.0 * dim_);
  }
}

std::size_t RadialGrid::lower_index(double x) const {
  return static_cast<std::size_t>(std::lower_bound(r_.begin(), r_.end(), x) - r_.begin());
}

GridPtr build_grid(double core_end, int n_core, double R_max, int dim, double growth_target) {
  if (!(core_end > 0.0)) throw Error(Errc::config, "grid core_end must be positive");
  if (n_core < 64) throw Error(Errc::config, "grid n_core must be at least 64");
  if (!(R_max > core_end)) throw Error(Errc::config, "grid R_max must exceed core_end");
  if (!(R_max >= 100.0 * core_end)) throw Error(Errc::config, "grid R_max must be at least 100 core_end");
  if (!(growth_target > 1.0)) throw Error(Errc::config, "grid growth must exceed 1");
  if (dim < 1) throw Error(Errc::dimension_unsupported, "grid dimension must be positive");

  auto grid = std::make_shared<RadialGrid>();
  grid->dim_ = dim;
  grid->core_end_ = core_end;
  grid->n_core_ = n_core;
  const double h = core_end / n_core;
  const double span = R_max - core_end;

  auto& r = grid->r_;
  r.reserve(static_cast<std::size_t>(n_core) + 1024);
  for (int k = 0; k <= n_core; ++k) r.push_back(k * h);
  r.back() = core_end;

  // m steps h g, h g^2, ..., h g^m summing exactly to the far-field span
  const double g0 = growth_target;
  const int m = static_cast<int>(std::ceil(std::log1p(span * (g0 - 1.0) / (h * g0)) / std::log(g0)));
  const auto total = [&](double g) { return h * g * std::expm1(m * std::log(g)) / (g - 1.0); };
  double g = 1.0;
  if (m * h < span) {
    double lo = 1.0 + 1e-15;
    double hi = g0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (total(mid) < span ? lo : hi) = mid;
    }
    g = 0.5 * (lo + hi);
    double step = h;
    double acc = core_end;
    for (int k = 1; k <= m; ++k) {
      step *= g;
      acc += step;
      r.push_back(acc);
    }
  } else {
    const int steps = static_cast<int>(std::ceil(span / h));
    for (int k = 1; k <= steps; ++k) r.push_back(core_end + span * k / steps);
  }
  r.back() = R_max;
  grid->growth_ = g;
  grid->finish();
  return grid;
}

GridPtr scaled_grid(const RadialGrid& grid, double c) {
  if (!(c > 0.0)) throw Error(Errc::precondition, "grid scale must be positive");
  auto out = std::make_shared<RadialGrid>(grid);
  out->core_end_ *= c;
  for (double& x : out->r_) x *= c;
  out->finish();
  return out;
}

RadialField::RadialField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid || values.size() != grid->size())
    throw Error(Errc::precondition, "field size does not match its grid");
}

RadialField::RadialField(GridPtr g) : grid(std::move(g)), values(grid->size(), 0.0) {}

namespace {

double node_slope(const std::vector<double>& r, const std::vector<double>& u, std::size_t i) {
  const std::size_t n = r.size();
  if (i == 0) return 0.0;
  if (i + 1 == n) return (u[i] - u[i - 1]) / (r[i] - r[i - 1]);
  const double h0 = r[i] - r[i - 1];
  const double h1 = r[i + 1] - r[i];
  return (h0 * h0 * (u[i + 1] - u[i]) + h1 * h1 * (u[i] - u[i - 1])) / (h0 * h1 * (h0 + h1));
}

}  // namespace

double RadialField::at(double x) const {
  const auto& r = grid->r();
  if (x <= 0.0) return values.front();
  if (x > r.back()) return 0.0;
  std::size_t k = grid->lower_index(x);
  if (k == 0) return values.front();
  const std::size_t i = k - 1;
  const double h = r[k] - r[i];
  const double t = (x - r[i]) / h;
  const double d0 = node_slope(r, values, i) * h;
  const double d1 = node_slope(r, values, k) * h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * values[i] + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * values[k] +
         (t3 - t2) * d1;
}

std::size_t RadialField::argmax() const {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

void require_same_grid(const RadialField& a, const RadialField& b) {
  if (!a.grid || !b.grid || (a.grid != b.grid && !(*a.grid == *b.grid)))
    throw Error(Errc::precondition, "fields live on different grids");
}

RadialField sample(GridPtr grid, const std::function<double(double)>& f) {
  RadialField out(std::move(grid));
  const auto& r = out.grid->r();
  for (std::size_t i = 0; i < r.size(); ++i) out.values[i] = f(r[i]);
  return out;
}

std::vector<double> stiffness_apply(const RadialGrid& grid, std::span<const double> u, FarField ff) {
  std::vector<double> out(u.size());
  const double robin = ff == FarField::harmonic ? grid.far_field_coupling() : 0.0;
  kernels::stiffness_apply(kernels::default_backend(), grid.conductance(), robin, u, out);
  return out;
}

RadialField apply_operator(const RadialField& u, double eps, const Potential& V, FarField ff) {
  const RadialGrid& grid = *u.grid;
  std::vector<double> su = stiffness_apply(grid, u.values, ff);
  const auto& m = grid.mass();
  const auto& r = grid.r();
  for (std::size_t i = 0; i < su.size(); ++i) su[i] = eps * eps * su[i] / m[i] + V(r[i]) * u.values[i];
  return RadialField(u.grid, std::move(su));
}

double integrate(const RadialGrid& grid, std::span<const double> f) {
  return kernels::weighted_sum(kernels::default_backend(), grid.mass(), f);
}

double inner(const RadialField& a, const RadialField& b) {
  require_same_grid(a, b);
  return kernels::weighted_dot(kernels::default_backend(), a.grid->mass(), a.values, b.values);
}

double dirichlet_energy(const RadialField& u, FarField ff) {
  const std::vector<double> su = stiffness_apply(*u.grid, u.values, ff);
  double s = 0.0;
  for (std::size_t i = 0; i < su.size(); ++i) s += su[i] * u.values[i];
  return s;
}

double norm_eps(const RadialField& u, double eps, const Potential& V, FarField ff) {
  const auto& r = u.grid->r();
  std::vector<double> vu2(u.size());
  for (std::size_t i = 0; i < vu2.size(); ++i) vu2[i] = V(r[i]) * u.values[i] * u.values[i];
  const double q = eps * eps * dirichlet_energy(u, ff) + integrate(*u.grid, vu2);
  return std::sqrt(std::max(q, 0.0));
}

QuadraticFormReport hardy_rayleigh(const RadialField& u, const PenalizationParams& params,
                                   const DomainLambda& region) {
  const RadialGrid& grid = *u.grid;
  const int N = grid.dim();
  const auto& r = grid.r();
  const auto& m = grid.mass();
  const double omega = sphere_area(N);
  const std::size_t n = r.size();
  if (N < 2) throw Error(Errc::dimension_unsupported, "Hardy form needs N >= 2");

  QuadraticFormReport rep;
  double hu2 = 0.0;
  double weight = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u.values[i];
    if (ui == 0.0) continue;
    const double lo = i == 0 ? 0.0 : 0.5 * (r[i - 1] + r[i]);
    const double hi = i + 1 == n ? r[i] : 0.5 * (r[i] + r[i + 1]);
    if (N == 2) {
      if (lo <= params.rho0)
        throw Error(Errc::dimension_unsupported, "planar Hardy form needs support outside B(0, rho0)");
      // int r^-1 log^-2(r/rho0) dr = [-1/log(r/rho0)]
      weight += omega * (1.0 / std::log(lo / params.rho0) - 1.0 / std::log(hi / params.rho0)) * ui * ui;
    } else {
      // int r^(N-3) dr over the cell
      const double cell = N == 3 ? hi - lo : shell_moment(lo, hi, N - 2);
      weight += omega * cell * ui * ui;
    }
    if (!region.contains(r[i])) hu2 += m[i] * hardy_potential(params, region, N, r[i]) * ui * ui;
  }
  rep.form_value = dirichlet_energy(u, FarField::dirichlet) - hu2;
  rep.hardy_weight_integral = weight;
  rep.ratio = weight > 0.0 ? rep.form_value / weight : 0.0;
  rep.bound = N >= 3 ? 0.25 * (N - 2.0) * (N - 2.0) -
                           params.kappa / std::pow(std::log(params.rho / params.rho0), 1.0 + params.beta)
                     : 0.25 - params.kappa / std::pow(std::log(params.rho / params.rho0), params.beta);
  return rep;
}

void write_csv(const std::string& path, const RadialField& f, const std::string& name) {
  write_csv(path, *f.grid, {{name, &f.values}});
}

void write_csv(const std::string& path, const RadialGrid& grid,
               const std::vector<std::pair<std::string, const std::vector<double>*>>& columns) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (fp == nullptr) throw Error(Errc::config, "cannot write " + path);
  std::fputs("r", fp);
  for (const auto& c : columns) std::fprintf(fp, ",%s", c.first.c_str());
  std::fputc('\n', fp);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::fprintf(fp, "%.17g", grid.r()[i]);
    for (const auto& c : columns) std::fprintf(fp, ",%.17g", (*c.second)[i]);
    std::fputc('\n', fp);
  }
  std::fclose(fp);
}

}  // namespace nls
