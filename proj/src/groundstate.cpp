#include "nls/groundstate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <utility>
#include <initializer_list>

#include "nls/error.hpp"
#include "nls/tridiag.hpp"

namespace nls {

namespace {

using State = std::array<double, 2>;  // (w, w')

enum class Verdict { high, low };

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Shooter {
 public:
  Shooter(int N, double p, double rtol) : N_(N), p_(p), rtol_(rtol) {}

  State rhs(double r, const State& y) const {
    const double w = y[0];
    const double nl = std::pow(std::abs(w), p_ - 1.0) * w;
    return {y[1], -(N_ - 1) / r * y[1] + w - nl};
  }

  // One attempted step; returns the scaled error estimate.
  double step(double r, const State& y, double h, State& out) const {
    const State k1 = rhs(r, y);
    auto comb = [&](std::initializer_list<std::pair<double, const State*>> terms) {
      State s = y;
      for (const auto& [c, k] : terms)
        for (int j = 0; j < 2; ++j) s[j] += h * c * (*k)[j];
      return s;
    };
    const State k2 = rhs(r + c2 * h, comb({{a21, &k1}}));
    const State k3 = rhs(r + c3 * h, comb({{a31, &k1}, {a32, &k2}}));
    const State k4 = rhs(r + c4 * h, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = rhs(r + c5 * h, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = rhs(r + h, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    out = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = rhs(r + h, out);
    double err = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double e = h * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] + e6 * k6[j] + e7 * k7[j]);
      const double scale = atol_ + rtol_ * std::max(std::abs(y[j]), std::abs(out[j]));
      err = std::max(err, std::abs(e) / scale);
    }
    return err;
  }

  // Advances y from r to r_end; h is the running step suggestion.
  void advance(double& r, State& y, double r_end, double& h) const {
    while (r < r_end) {
      const bool last = h >= r_end - r;
      const double hh = last ? r_end - r : h;
      State out;
      const double err = step(r, y, hh, out);
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        r = last ? r_end : r + hh;
        y = out;
        h = last ? std::max(h, hh * fac) : hh * fac;
      } else {
        h = hh * fac;
      }
      if (h < 1e-14) throw Error(Errc::solver_failure, "shooting step size underflow");
    }
  }

  State start(double a, double r) const {
    const double c = (a - std::pow(a, p_)) / (2.0 * N_);
    return {a + c * r * r, 2.0 * c * r};
  }

  void set_atol(double atol) { atol_ = atol; }

  static std::optional<Verdict> event(const State& y) {
    if (y[0] <= 0.0) return Verdict::high;
    if (y[1] > 0.0) return Verdict::low;
    return std::nullopt;
  }

  Verdict at_horizon(double r, const State& y) const {
    // sign of the growing mode
    return y[1] + y[0] * (1.0 + (N_ - 1) / (2.0 * r)) > 0.0 ? Verdict::low : Verdict::high;
  }

  // Free adaptive stepping with event checks at every accepted step.
  Verdict classify_free(double a, double r0, double horizon) const {
    double r = r0;
    State y = start(a, r0);
    double h = 1e-3;
    while (r < horizon) {
      const double target = std::min(horizon, r + 0.05);
      advance(r, y, target, h);
      if (auto v = event(y)) return *v;
    }
    return at_horizon(r, y);
  }

  struct Trajectory {
    std::vector<double> w, dw;  // node values up to the last recorded index
    Verdict verdict = Verdict::low;
  };

  // Node-to-node integration over r[1..] with the series start at r[1].
  Trajectory trace(double a, const std::vector<double>& r, std::size_t last, bool record) const {
    Trajectory t;
    if (record) {
      t.w.reserve(last + 1);
      t.dw.reserve(last + 1);
      t.w.push_back(a);
      t.dw.push_back(0.0);
    }
    double x = r[1];
    State y = start(a, x);
    double h = r[1];
    for (std::size_t i = 1; i <= last; ++i) {
      if (i > 1) advance(x, y, r[i], h);
      if (record) {
        t.w.push_back(y[0]);
        t.dw.push_back(y[1]);
      }
      if (auto v = event(y)) {
        t.verdict = *v;
        return t;
      }
    }
    t.verdict = at_horizon(x, y);
    return t;
  }

 private:
  int N_;
  double p_;
  double rtol_;
  double atol_ = 1e-300;
};

double bessel_tail(double nu, double r) { return std::pow(r, -nu) * std::cyl_bessel_k(std::abs(nu), r); }
double bessel_tail_slope(double nu, double r) { return -std::pow(r, -nu) * std::cyl_bessel_k(nu + 1.0, r); }

void check_exponent(int N, double p) {
  if (N < 1) throw Error(Errc::dimension_unsupported, "dimension must be positive");
  if (!(p > 1.0)) throw Error(Errc::domain, "ground state needs p > 1");
  if (N >= 3 && !(p < (N + 2.0) / (N - 2.0)))
    throw Error(Errc::domain, "ground state needs p < (N+2)/(N-2) = " + std::to_string((N + 2.0) / (N - 2.0)));
}

// Composite Simpson on the uniform core, trapezoid beyond.
double radial_integral(const RadialGrid& grid, const std::vector<double>& f) {
  const auto& r = grid.r();
  const int N = grid.dim();
  const double omega = sphere_area(N);
  auto g = [&](std::size_t i) { return f[i] * std::pow(r[i], N - 1); };
  const std::size_t nc = static_cast<std::size_t>(grid.n_core());
  const std::size_t even = nc - nc % 2;
  const double h = grid.core_step();
  double s = 0.0;
  for (std::size_t i = 0; i + 2 <= even; i += 2) s += h / 3.0 * (g(i) + 4.0 * g(i + 1) + g(i + 2));
  for (std::size_t i = even; i + 1 < r.size(); ++i) s += 0.5 * (r[i + 1] - r[i]) * (g(i) + g(i + 1));
  return omega * s;
}

}  // namespace

GroundState solve_canonical(int N, double p, double tol, const GroundStateOptions& opt) {
  check_exponent(N, p);
  GridPtr grid = build_grid(opt.core_end, opt.n_core, opt.R_max, N);
  const auto& r = grid->r();
  const std::size_t horizon_idx = static_cast<std::size_t>(opt.n_core);
  const double horizon = r[horizon_idx];

  Shooter free_shooter(N, p, 1e-12);
  Shooter node_shooter(N, p, 1e-12);

  // bracket: lo stays on the "turns upward" side, hi on the "crosses zero" side
  double lo = 1.0;
  double hi = 2.0;
  while (free_shooter.classify_free(hi, r[1], horizon) == Verdict::low) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw Error(Errc::solver_failure, "no shooting bracket below w(0) = 1e6");
  }
  int bisections = 0;
  while (hi - lo > 1e-9 * lo) {
    const double mid = 0.5 * (lo + hi);
    (free_shooter.classify_free(mid, r[1], horizon) == Verdict::low ? lo : hi) = mid;
    ++bisections;
  }
  // the node-to-node integrator decides the last digits; widen until it brackets too
  for (int k = 0; node_shooter.trace(lo, r, horizon_idx, false).verdict != Verdict::low; ++k) {
    lo -= (hi - lo);
    if (k > 60) throw Error(Errc::solver_failure, "shooting bracket lost");
  }
  for (int k = 0; node_shooter.trace(hi, r, horizon_idx, false).verdict != Verdict::high; ++k) {
    hi += (hi - lo);
    if (k > 60) throw Error(Errc::solver_failure, "shooting bracket lost");
  }
  const double width_target = std::max(tol, 0.0) * lo;
  for (int it = 0; it < 200 && hi - lo > width_target; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    (node_shooter.trace(mid, r, horizon_idx, false).verdict == Verdict::low ? lo : hi) = mid;
    ++bisections;
  }

  const auto tl = node_shooter.trace(lo, r, horizon_idx, true);
  const auto th = node_shooter.trace(hi, r, horizon_idx, true);
  const std::size_t common = std::min(tl.w.size(), th.w.size());

  // average the two sides until they separate, then hand over to the Bessel tail
  std::size_t m = 1;
  for (; m < common; ++m) {
    const double wl = tl.w[m];
    const double wh = th.w[m];
    if (wl <= 0.0 || wh <= 0.0 || tl.dw[m] >= 0.0 || th.dw[m] >= 0.0) break;
    if (std::abs(wl - wh) > 1e-6 * 0.5 * (wl + wh)) break;
  }
  const std::size_t match = m - 1;
  if (match < 2) throw Error(Errc::solver_failure, "shooting trajectories separate immediately");

  GroundState gs;
  gs.N = N;
  gs.p = p;
  gs.bisections = bisections;
  const double nu = 0.5 * (N - 2);
  std::vector<double> w(r.size());
  std::vector<double> dw(r.size());
  for (std::size_t i = 0; i <= match; ++i) {
    w[i] = 0.5 * (tl.w[i] + th.w[i]);
    dw[i] = 0.5 * (tl.dw[i] + th.dw[i]);
  }
  gs.match_radius = r[match];
  gs.tail_C = w[match] / bessel_tail(nu, r[match]);
  for (std::size_t i = match + 1; i < r.size(); ++i) {
    w[i] = gs.tail_C * bessel_tail(nu, r[i]);
    dw[i] = gs.tail_C * bessel_tail_slope(nu, r[i]);
  }
  gs.w0 = w[0];
  gs.profile = RadialField(grid, w);
  gs.slope = dw;

  std::vector<double> f(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) f[i] = dw[i] * dw[i];
  gs.kinetic = radial_integral(*grid, f);
  for (std::size_t i = 0; i < r.size(); ++i) f[i] = w[i] * w[i];
  gs.mass = radial_integral(*grid, f);
  for (std::size_t i = 0; i < r.size(); ++i) f[i] = std::pow(w[i], p + 1.0);
  gs.potential = radial_integral(*grid, f);

  gs.r_mp = mountain_pass_exponent(p);
  gs.energy_canonical = 0.5 * (gs.kinetic + gs.mass) - gs.potential / (p + 1.0);
  gs.sobolev = sobolev_constant(gs);
  return gs;
}

double GroundState::at(double x) const {
  const RadialGrid& grid = *profile.grid;
  const auto& r = grid.r();
  if (x <= 0.0) return w0;
  if (x >= r.back()) return tail_C * bessel_tail(0.5 * (N - 2), x);
  const std::size_t k = grid.lower_index(x);
  const std::size_t i = k - 1;
  const double h = r[k] - r[i];
  const double t = (x - r[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * profile[i] + (t3 - 2 * t2 + t) * h * slope[i] + (-2 * t3 + 3 * t2) * profile[k] +
         (t3 - t2) * h * slope[k];
}

double GroundState::slope_at(double x) const {
  const RadialGrid& grid = *profile.grid;
  const auto& r = grid.r();
  if (x <= 0.0) return 0.0;
  if (x >= r.back()) return tail_C * bessel_tail_slope(0.5 * (N - 2), x);
  const std::size_t k = grid.lower_index(x);
  const std::size_t i = k - 1;
  const double h = r[k] - r[i];
  const double t = (x - r[i]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * profile[i] + (-6 * t2 + 6 * t) * profile[k]) / h + (3 * t2 - 4 * t + 1) * slope[i] +
         (3 * t2 - 2 * t) * slope[k];
}

GridGroundState solve_canonical_on_grid(int N, double p, GridPtr grid) {
  check_exponent(N, p);
  if (grid->dim() != N) throw Error(Errc::precondition, "grid dimension differs from N");
  const std::size_t n = grid->size();
  const auto& r = grid->r();
  const auto& m = grid->mass();
  const auto& c = grid->conductance();
  const double robin = grid->far_field_coupling();

  Tridiagonal L(n);
  for (std::size_t i = 0; i < n; ++i) L.diag[i] = m[i];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    L.diag[i] += c[i];
    L.diag[i + 1] += c[i];
    L.lower[i] = -c[i];
    L.upper[i] = -c[i];
  }
  L.diag[n - 1] += robin;

  // the one-dimensional profile as a starting guess
  std::vector<double> w(n);
  const double amp = std::pow(0.5 * (p + 1.0), 1.0 / (p - 1.0));
  for (std::size_t i = 0; i < n; ++i) w[i] = amp * std::pow(1.0 / std::cosh(0.5 * (p - 1.0) * r[i]), 2.0 / (p - 1.0));

  GridGroundState out;
  const double gamma = p / (p - 1.0);
  std::vector<double> rhs(n);
  for (int it = 0; it < 2000; ++it) {
    const std::vector<double> Lw = L.apply(w);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rhs[i] = m[i] * std::pow(w[i], p);
      num += Lw[i] * w[i];
      den += rhs[i] * w[i];
    }
    std::vector<double> z = solve_tridiagonal(L, rhs);
    const double scale = std::pow(num / den, gamma);
    double change = 0.0;
    double wmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = std::max(scale * z[i], 0.0);
      change = std::max(change, std::abs(z[i] - w[i]));
      wmax = std::max(wmax, z[i]);
    }
    w.swap(z);
    out.petviashvili_iters = it + 1;
    if (change <= 1e-10 * wmax) break;
  }

  // Newton on the rows divided by the masses, which keeps the pivots comparable near r = 0
  std::vector<double> F(n);
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 40; ++it) {
    const std::vector<double> Lw = L.apply(w);
    Tridiagonal J = L;
    double wmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = 1.0 / m[i];
      F[i] = -(Lw[i] * s - std::pow(w[i], p));
      J.diag[i] = J.diag[i] * s - p * std::pow(w[i], p - 1.0);
      if (i > 0) J.lower[i - 1] *= s;
      if (i + 1 < n) J.upper[i] *= s;
      wmax = std::max(wmax, w[i]);
    }
    const std::vector<double> d = solve_tridiagonal(J, F);
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] += d[i];
      dmax = std::max(dmax, std::abs(d[i]));
    }
    out.newton_iters = it + 1;
    if (dmax <= 1e-13 * wmax || (it >= 3 && dmax >= 0.5 * last)) break;
    last = dmax;
  }
  const std::vector<double> Lw = L.apply(w);
  for (std::size_t i = 0; i < n; ++i)
    out.residual_max = std::max(out.residual_max, std::abs(Lw[i] / m[i] - std::pow(std::max(w[i], 0.0), p)));
  out.profile = RadialField(std::move(grid), std::move(w));
  return out;
}

RadialField rescale_to_limit(const GroundState& gs, double V0, double K0) {
  if (!(V0 > 0.0) || !(K0 > 0.0)) throw Error(Errc::domain, "rescaling needs V0 > 0 and K0 > 0");
  const double amp = std::pow(V0 / K0, 1.0 / (gs.p - 1.0));
  GridPtr grid = scaled_grid(*gs.profile.grid, 1.0 / std::sqrt(V0));
  std::vector<double> v(gs.profile.values);
  for (double& x : v) x *= amp;
  return RadialField(std::move(grid), std::move(v));
}

double sobolev_constant(const GroundState& gs) {
  const double q = (gs.kinetic + gs.mass) / std::pow(gs.potential, 2.0 / (gs.p + 1.0));
  return std::sqrt(q);
}

double limit_energy(const ProblemSpec& spec, const GroundState& gs, double x_star) {
  const double r = mountain_pass_exponent(gs.p);
  return std::pow(gs.sobolev, r) / r * eval_concentration(spec, x_star);
}

double limit_functional(const RadialField& v, double V0, double K0, double p) {
  const RadialGrid& grid = *v.grid;
  std::vector<double> a(v.size());
  std::vector<double> b(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    a[i] = v[i] * v[i];
    b[i] = std::pow(std::max(v[i], 0.0), p + 1.0);
  }
  return 0.5 * (dirichlet_energy(v) + V0 * integrate(grid, a)) - K0 / (p + 1.0) * integrate(grid, b);
}

DecayReport check_exponential_decay(const RadialField& field, double rate) {
  const auto& r = field.grid->r();
  const int N = field.grid->dim();
  std::size_t last = 0;
  for (std::size_t i = 0; i < field.size(); ++i)
    if (field[i] > 1e-280) last = i;
  DecayReport rep;
  rep.window_hi = r[last];
  rep.window_lo = 0.5 * r[last];
  std::vector<double> xs;
  std::vector<double> ys;
  double logC = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= last; ++i) {
    if (r[i] < rep.window_lo || !(field[i] > 0.0)) continue;
    const double log_env = 0.25 * (1.0 - N) * std::log1p(r[i] * r[i]) - rate * r[i];
    const double res = std::log(field[i]) - log_env;
    xs.push_back(r[i]);
    ys.push_back(res);
    logC = std::max(logC, res);
  }
  if (xs.size() < 2) return rep;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= xs.size();
  my /= xs.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  rep.slope = sxy / sxx;
  rep.C = std::exp(logC);
  rep.holds = std::isfinite(rep.C) && rep.slope <= 1e-3;
  return rep;
}

void write_ground_state_csv(const std::string& path, const GroundState& gs) {
  write_csv(path, *gs.profile.grid, {{"w", &gs.profile.values}, {"dw", &gs.slope}});
}

}  // namespace nls
