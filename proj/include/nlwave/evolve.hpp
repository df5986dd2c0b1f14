#pragma once

// Time evolution for u_tt - Delta u = -u^3 with radial data.
//
// The linear part is integrated exactly in the sine basis. The full equation
// uses the Strang composition  K(dt/2) L(dt) K(dt/2),  where the kick K
// updates u_t <- u_t - (dt/2) u^3 pointwise with u frozen and L is the exact
// linear flow. L has no CFL restriction; the step size only controls accuracy.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlwave/error.hpp"
#include "nlwave/radial_spectral.hpp"

namespace nlwave {

// Relative threshold used to decide where a field "ends" for the wall check.
inline constexpr double kSupportTolerance = 1e-12;

// Eigenmodes and other global fields of the Dirichlet ball are exact solutions
// of the discrete problem; for them the wall check is waived explicitly.
enum class Boundary { enforce, waive };

struct EvolveParams {
  double dt = 1e-3;
  double t_final = 0.0;
  std::size_t snapshot_stride = 1;
  bool nonlinearity_on = true;
  // Distance kept between the light cone of the data and the wall at r_max.
  double margin = 1.0;
  Boundary boundary = Boundary::enforce;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("EvolveParams: dt must be positive");
    if (!(t_final >= 0.0) || !std::isfinite(t_final))
      throw InvalidArgument("EvolveParams: t_final must be nonnegative");
    if (snapshot_stride == 0) throw InvalidArgument("EvolveParams: snapshot_stride must be >= 1");
    if (!(margin >= 0.0)) throw InvalidArgument("EvolveParams: margin must be nonnegative");
  }

  std::size_t step_count() const {
    if (t_final == 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
  }
  // Step actually used: t_final split into step_count() equal steps.
  double effective_dt() const {
    const auto n = step_count();
    return n == 0 ? dt : t_final / static_cast<double>(n);
  }
};

inline double state_support_radius(const State& s) {
  return std::max(effective_support_radius(s.u, kSupportTolerance),
                  effective_support_radius(s.ut, kSupportTolerance));
}

// Throws DomainTooSmall unless support + |t| + margin <= r_max.
inline void check_boundary_safety(const State& s, double t, double margin) {
  const double support = state_support_radius(s);
  const double r_max = s.grid()->r_max();
  if (support + std::abs(t) + margin > r_max) {
    throw DomainTooSmall("boundary safety: support " + std::to_string(support) + " + time " +
                         std::to_string(std::abs(t)) + " + margin " + std::to_string(margin) +
                         " exceeds r_max " + std::to_string(r_max));
  }
}

// ---------------------------------------------------------------------------
// Linear propagator

// ghat(t)  =  cos(rho t) ghat + sin(rho t)/rho hhat
// hhat(t)  = -rho sin(rho t) ghat + cos(rho t) hhat
inline void propagate_coefficients(SpectralField& g, SpectralField& h, double t) {
  const auto rho = g.grid->rho();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double w = rho[k];
    const double c = std::cos(w * t), s = std::sin(w * t);
    const double a = g.coeffs[k], b = h.coeffs[k];
    g.coeffs[k] = c * a + (s / w) * b;
    h.coeffs[k] = -w * s * a + c * b;
  }
}

namespace detail {

inline void linear_flow(State& s, double t) {
  SpectralField g = to_spectral(s.u);
  SpectralField h = to_spectral(s.ut);
  propagate_coefficients(g, h, t);
  s.u = to_physical(g);
  s.ut = to_physical(h);
  s.t += t;
}

inline void kick(State& s, double tau) {
  auto& ut = s.ut.values;
  const auto& u = s.u.values;
  for (std::size_t j = 0; j < u.size(); ++j) ut[j] -= tau * u[j] * u[j] * u[j];
}

}  // namespace detail

// S_L(t) applied to (u, u_t); exact up to rounding.
inline State linear_propagate(const State& s, double t, double margin = 0.0,
                              Boundary boundary = Boundary::enforce) {
  if (boundary == Boundary::enforce) check_boundary_safety(s, t, margin);
  State out = s;
  detail::linear_flow(out, t);
  return out;
}

// ---------------------------------------------------------------------------
// Nonlinear step

inline State step_nonlinear(State s, double dt, bool nonlinearity_on = true) {
  const double t0 = s.t;
  if (nonlinearity_on) detail::kick(s, 0.5 * dt);
  detail::linear_flow(s, dt);
  if (nonlinearity_on) detail::kick(s, 0.5 * dt);
  if (!s.u.all_finite() || !s.ut.all_finite())
    throw Overflow("step_nonlinear: non-finite values after step from t = " + std::to_string(t0), t0);
  return s;
}

// ---------------------------------------------------------------------------
// Driver

struct Trajectory {
  std::vector<State> snapshots;
  EvolveParams params;

  std::size_t size() const noexcept { return snapshots.size(); }
  const GridPtr& grid() const { return snapshots.front().grid(); }
  double duration() const {
    return snapshots.empty() ? 0.0 : snapshots.back().t - snapshots.front().t;
  }
  std::vector<double> times() const {
    std::vector<double> t;
    t.reserve(snapshots.size());
    for (const auto& s : snapshots) t.push_back(s.t);
    return t;
  }
};

using Observer = std::function<void(const State&)>;

// Overflow during evolve(); keeps everything computed before the fault.
class TrajectoryOverflow : public Overflow {
 public:
  TrajectoryOverflow(const std::string& what, double last_good_time, Trajectory partial, State last_good)
      : Overflow(what, last_good_time), partial_(std::move(partial)), last_good_(std::move(last_good)) {}
  const Trajectory& partial() const noexcept { return partial_; }
  const State& last_good_state() const noexcept { return last_good_; }

 private:
  Trajectory partial_;
  State last_good_;
};

struct EvolveResult {
  Trajectory trajectory;
  State final_state;
};

// Repeated Strang steps from `initial` up to initial.t + t_final. Snapshots
// (and observer calls) happen every snapshot_stride steps, starting with the
// initial state.
inline EvolveResult evolve(const State& initial, const EvolveParams& params,
                           const std::vector<Observer>& observers = {}) {
  params.validate();
  if (params.boundary == Boundary::enforce) check_boundary_safety(initial, params.t_final, params.margin);
  const std::size_t steps = params.step_count();
  const double dt = params.effective_dt();

  EvolveResult result;
  result.trajectory.params = params;
  auto record = [&](const State& s) {
    result.trajectory.snapshots.push_back(s);
    for (const auto& obs : observers) obs(s);
  };

  State s = initial;
  record(s);
  const double t0 = initial.t;
  for (std::size_t i = 1; i <= steps; ++i) {
    State next;
    try {
      next = step_nonlinear(s, dt, params.nonlinearity_on);
    } catch (const Overflow& e) {
      throw TrajectoryOverflow(e.what(), s.t, std::move(result.trajectory), s);
    }
    // Times are set from the step index to keep the stride exactly uniform.
    next.t = t0 + static_cast<double>(i) * dt;
    s = std::move(next);
    if (i % params.snapshot_stride == 0) record(s);
  }
  result.final_state = std::move(s);
  return result;
}

// Linear trajectory sampled exactly at t0 + i h, i = 0..round(t_final / h).
inline Trajectory linear_trajectory(const State& initial, double t_final, double h,
                                    Boundary boundary = Boundary::enforce, double margin = 0.0) {
  if (!(h > 0.0) || !(t_final >= 0.0)) throw InvalidArgument("linear_trajectory: need h > 0 and t_final >= 0");
  if (boundary == Boundary::enforce) check_boundary_safety(initial, t_final, margin);
  const SpectralField g0 = to_spectral(initial.u);
  const SpectralField h0 = to_spectral(initial.ut);
  const auto steps = static_cast<std::size_t>(std::llround(t_final / h));
  Trajectory tr;
  tr.params.dt = h;
  tr.params.t_final = t_final;
  tr.params.nonlinearity_on = false;
  tr.params.boundary = boundary;
  tr.snapshots.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * h;
    SpectralField g = g0, v = h0;
    propagate_coefficients(g, v, t);
    tr.snapshots.emplace_back(to_physical(g), to_physical(v), initial.t + t);
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Duhamel operator

// Provides the forcing F(tau, .) sampled on the grid.
using ForcingProvider = std::function<RadialField(double)>;
// Pointwise forcing F(tau, r), used by the Kirchhoff oracle.
using PointForcing = std::function<double(double, double)>;

// w(t) = int_0^t sin((t - tau) sqrt(-Delta)) / sqrt(-Delta) F(tau) dtau,
// spectral in space, composite trapezoid in tau (second order in dt_quad).
inline RadialField duhamel(const ForcingProvider& forcing, const GridPtr& grid, double t, double dt_quad) {
  if (!(dt_quad > 0.0)) throw InvalidArgument("duhamel: dt_quad must be positive");
  if (!(t >= 0.0)) throw InvalidArgument("duhamel: t must be nonnegative");
  SpectralField acc(grid);
  if (t == 0.0) return RadialField(grid);
  const auto steps = static_cast<std::size_t>(std::ceil(t / dt_quad - 1e-9));
  const double h = t / static_cast<double>(steps);
  const auto rho = grid->rho();
  for (std::size_t i = 0; i <= steps; ++i) {
    const double tau = static_cast<double>(i) * h;
    const double weight = (i == 0 || i == steps) ? 0.5 * h : h;
    const RadialField f = forcing(tau);
    require_same_grid(f.grid, grid, "duhamel");
    const SpectralField fh = to_spectral(f);
    for (std::size_t k = 0; k < acc.size(); ++k)
      acc.coeffs[k] += weight * std::sin(rho[k] * (t - tau)) / rho[k] * fh.coeffs[k];
  }
  return to_physical(acc);
}

namespace detail {

// Composite Simpson on [a, b] with an even number of panels of width <= h.
template <class F>
double simpson(F&& f, double a, double b, double h) {
  if (b <= a) return 0.0;
  auto m = static_cast<std::size_t>(std::ceil((b - a) / h));
  if (m < 2) m = 2;
  if (m % 2 == 1) ++m;
  const double step = (b - a) / static_cast<double>(m);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < m; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * step);
  return s * step / 3.0;
}

}  // namespace detail

// Radial retarded kernel without its constant:
//   (1/r) int_0^t int_{|r - (t - tau)|}^{r + (t - tau)} F(tau, rr) rr drr dtau
// by nested composite Simpson. support_radius (if > 0) clips the inner range.
inline double kirchhoff_kernel_integral(const PointForcing& forcing, double t, double r, double dt_quad,
                                        double dr_quad, double support_radius = 0.0) {
  if (!(r > 0.0)) throw InvalidArgument("duhamel_kirchhoff_oracle: r must be positive");
  if (!(dt_quad > 0.0) || !(dr_quad > 0.0))
    throw InvalidArgument("duhamel_kirchhoff_oracle: quadrature steps must be positive");
  if (t <= 0.0) return 0.0;
  auto inner = [&](double tau) {
    const double a = t - tau;
    double lo = std::abs(r - a), hi = r + a;
    if (support_radius > 0.0) hi = std::min(hi, support_radius);
    if (hi <= lo) return 0.0;
    return detail::simpson([&](double rr) { return forcing(tau, rr) * rr; }, lo, hi, dr_quad);
  };
  return detail::simpson(inner, 0.0, t, dt_quad) / r;
}

// Value of the constant in front of the kernel integral that the spectral
// Duhamel reproduces (d'Alembert for g = r u gives 1/2). calibrate_kirchhoff_constant
// recovers it numerically.
inline constexpr double kKirchhoffConstant = 0.5;

inline double duhamel_kirchhoff_oracle(const PointForcing& forcing, double t, double r, double dt_quad,
                                       double dr_quad, double constant = kKirchhoffConstant,
                                       double support_radius = 0.0) {
  return constant * kirchhoff_kernel_integral(forcing, t, r, dt_quad, dr_quad, support_radius);
}

// One-point calibration: ratio of the spectral Duhamel value at grid point
// j_probe to the unit-constant kernel integral.
inline double calibrate_kirchhoff_constant(const PointForcing& forcing, const GridPtr& grid, double t,
                                           std::size_t j_probe, double dt_quad_spectral,
                                           double dt_quad, double dr_quad, double support_radius = 0.0) {
  const auto radii = grid->radii();
  ForcingProvider provider = [&](double tau) {
    RadialField f(grid);
    for (std::size_t j = 0; j < f.size(); ++j) f.values[j] = forcing(tau, radii[j]);
    return f;
  };
  const RadialField w = duhamel(provider, grid, t, dt_quad_spectral);
  const double kernel = kirchhoff_kernel_integral(forcing, t, radii[j_probe], dt_quad, dr_quad, support_radius);
  if (kernel == 0.0) throw InvalidArgument("calibrate_kirchhoff_constant: probe point sees no forcing");
  return w.values[j_probe] / kernel;
}

}  // namespace nlwave
