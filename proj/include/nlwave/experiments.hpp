#pragma once

// Scenario runners. Each takes an ExperimentConfig and returns an
// ExperimentReport whose pass/fail rows carry the bounds they were judged
// against. Independent cases run on worker threads; results are always
// reduced in case order, so reports do not depend on scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nlwave/error.hpp"
#include "nlwave/evolve.hpp"
#include "nlwave/functionals.hpp"
#include "nlwave/io.hpp"
#include "nlwave/multiplier.hpp"
#include "nlwave/radial_spectral.hpp"

namespace nlwave {

enum class Scenario { gwp_growth, scaling, huygens, strichartz_ratio, bilinear_sweep, convergence };

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::gwp_growth: return "gwp_growth";
    case Scenario::scaling: return "scaling";
    case Scenario::huygens: return "huygens";
    case Scenario::strichartz_ratio: return "strichartz_ratio";
    case Scenario::bilinear_sweep: return "bilinear_sweep";
    case Scenario::convergence: return "convergence";
  }
  return "?";
}

inline Scenario parse_scenario(const std::string& s) {
  for (Scenario x : {Scenario::gwp_growth, Scenario::scaling, Scenario::huygens, Scenario::strichartz_ratio,
                     Scenario::bilinear_sweep, Scenario::convergence})
    if (to_string(x) == s) return x;
  throw InvalidArgument("unknown scenario '" + s + "'");
}

struct ExperimentConfig {
  Scenario scenario = Scenario::gwp_growth;
  double r_max = 64.0;
  std::size_t n_modes = 4096;
  ProfileParams data;  // u(0)
  ProfileParams data_ut{.kind = ProfileKind::zero};  // u_t(0)
  std::vector<double> N_list{4.0, 8.0, 16.0, 32.0};
  std::vector<double> s_list{0.75};
  std::vector<double> M_list{8.0, 16.0, 32.0};
  std::vector<double> lambda_list{1.0, 2.0};
  double t_final = 1.0;
  double dt = 1e-3;
  std::size_t snapshot_stride = 50;
  double margin = 1.0;
  bool nonlinear = true;
  std::uint64_t seed = 0;
  std::size_t ensemble = 128;
  double huygens_T = 8.0;
  double huygens_R = 2.0;
  std::size_t huygens_samples = 7;
  double energy_drift_tol = 1e-5;
  // Names of the checks to evaluate; empty means the scenario's defaults.
  std::vector<std::string> checks;
  unsigned threads = 0;  // 0: hardware concurrency
  // Provenance only: copied into time-series headers.
  std::string config_hash;
};

// One pass/fail row: passed iff lo <= value <= hi.
struct Check {
  std::string name;
  std::string invariant;
  double value = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool passed = false;
};

struct Fit {
  std::string name;
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::size_t points = 0;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  Scenario scenario = Scenario::gwp_growth;
  std::uint64_t seed = 0;
  std::size_t cases = 0;
  std::vector<Table> tables;
  std::vector<Fit> fits;
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  // Extra output files (name -> contents), e.g. time series.
  std::map<std::string, std::string> artifacts;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
  const Check* find_check(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  const Fit* find_fit(const std::string& name) const {
    for (const auto& f : fits)
      if (f.name == name) return &f;
    return nullptr;
  }
  void add_check(std::string name, std::string invariant, double value, double lo, double hi) {
    Check c{std::move(name), std::move(invariant), value, lo, hi, false};
    c.passed = std::isfinite(value) && value >= lo && value <= hi;
    checks.push_back(std::move(c));
  }
};

using Progress = std::function<void(const std::string&)>;

// ---------------------------------------------------------------------------
// Helpers

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Least-squares line through (x, y) with the standard error of the slope.
inline Fit fit_line(std::string name, const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Fit f;
  f.name = std::move(name);
  f.points = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - (f.intercept + f.slope * x[i]);
      ssr += e * e;
    }
    f.stderr_slope = std::sqrt(ssr / (n - 2.0) / sxx);
  }
  return f;
}

inline Fit fit_loglog(std::string name, const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(std::move(name), lx, ly);
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, count) on up to `threads` workers and returns the
// results in index order. The first exception (by index) is rethrown.
template <class Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

inline bool check_enabled(const ExperimentConfig& cfg, const std::vector<std::string>& defaults,
                          const std::string& name) {
  const auto& list = cfg.checks.empty() ? defaults : cfg.checks;
  return std::find(list.begin(), list.end(), name) != list.end();
}

inline void require_cases(const ExperimentReport& r) {
  if (r.cases == 0) throw Error(to_string(r.scenario) + ": no cases were evaluated");
}

inline State initial_state(const ExperimentConfig& cfg, const GridPtr& grid) {
  ProfileParams u0 = cfg.data, u1 = cfg.data_ut;
  u0.seed = cfg.seed;
  u1.seed = cfg.seed + 1;
  return State(sample_profile(u0, grid), sample_profile(u1, grid));
}

inline void validate_experiment(const ExperimentConfig& cfg) {
  if (!(cfg.r_max > 0.0)) throw ConfigError("r_max: must be positive");
  if (cfg.n_modes < kMinModes) throw ConfigError("n_modes: constraint n_modes ≥ 8 violated");
  if (!(cfg.dt > 0.0)) throw ConfigError("dt: must be positive");
  if (!(cfg.t_final >= 0.0)) throw ConfigError("t_final: must be nonnegative");
  if (cfg.snapshot_stride == 0) throw ConfigError("snapshot_stride: must be >= 1");
  if (!(cfg.margin >= 0.0)) throw ConfigError("margin: must be nonnegative");
  const double rho_max = static_cast<double>(cfg.n_modes) * std::numbers::pi / cfg.r_max;
  for (double N : cfg.N_list)
    if (!(N > 0.0) || N > rho_max / 4.0)
      throw ConfigError("N_list: every N must lie in (0, rho_max/4] = (0, " + format_real(rho_max / 4.0) + "]");
  for (double s : cfg.s_list)
    if (!(s > 0.5 && s < 1.0)) throw ConfigError("s_list: every s must lie in (1/2, 1)");
  for (double M : cfg.M_list)
    if (!(M > 0.0)) throw ConfigError("M_list: every M must be positive");
  for (double l : cfg.lambda_list)
    if (!(l > 0.0)) throw ConfigError("lambda_list: every lambda must be positive");
}

inline double relative_l2(const RadialField& a, const RadialField& ref) {
  RadialField d(ref.grid);
  for (std::size_t j = 0; j < d.size(); ++j) d.values[j] = a.values[j] - ref.values[j];
  const double den = sobolev_norm(ref, 0.0);
  return den == 0.0 ? sobolev_norm(d, 0.0) : sobolev_norm(d, 0.0) / den;
}

// ---------------------------------------------------------------------------
// Convergence

inline constexpr double kRoundingFloor = 1e-12;

inline ExperimentReport run_convergence(const ExperimentConfig& cfg, const Progress& progress = {}) {
  validate_experiment(cfg);
  ExperimentReport rep;
  rep.scenario = Scenario::convergence;
  rep.seed = cfg.seed;
  if (cfg.n_modes < 4 * kMinModes) throw ConfigError("n_modes: convergence needs n_modes >= 32 for the n-sweep");

  auto run = [&](std::size_t n, double dt) {
    const GridPtr grid = make_grid(cfg.r_max, n);
    EvolveParams ep;
    ep.dt = dt;
    ep.t_final = cfg.t_final;
    ep.snapshot_stride = std::numeric_limits<std::size_t>::max();
    ep.nonlinearity_on = cfg.nonlinear;
    ep.margin = cfg.margin;
    return evolve(initial_state(cfg, grid), ep).final_state;
  };

  // five independent runs: dt sweep at n, n sweep at dt
  const std::vector<std::pair<std::size_t, double>> jobs = {
      {cfg.n_modes, 4.0 * cfg.dt}, {cfg.n_modes, 2.0 * cfg.dt}, {cfg.n_modes, cfg.dt},
      {cfg.n_modes / 4, cfg.dt},   {cfg.n_modes / 2, cfg.dt}};
  if (progress) progress("convergence: 5 runs to t = " + format_real(cfg.t_final));
  const auto finals =
      parallel_map(jobs.size(), cfg.threads, [&](std::size_t i) { return run(jobs[i].first, jobs[i].second); });
  rep.cases = jobs.size();

  // temporal: successive differences at fixed n
  const double d1 = relative_l2(finals[0].u, finals[1].u);
  const double d2 = relative_l2(finals[1].u, finals[2].u);
  Table tt{"temporal", {"dt", "rel_l2_diff_to_next"}, {}};
  tt.rows.push_back({4.0 * cfg.dt, d1});
  tt.rows.push_back({2.0 * cfg.dt, d2});
  rep.tables.push_back(tt);
  if (!cfg.nonlinear || d2 <= kRoundingFloor) {
    rep.add_check("temporal_floor", "linear flow is exact in time: differences at rounding floor", std::max(d1, d2),
                  0.0, kRoundingFloor);
  } else {
    const double order = std::log2(d1 / d2);
    rep.fits.push_back(Fit{"temporal_order", order, 0.0, 0.0, 3});
    rep.add_check("temporal_order", "Strang splitting is second order in dt", order, 1.8, 2.2);
  }

  // spatial: compare sine coefficients (rho_k is independent of n at fixed r_max)
  auto coeff_diff = [](const State& a, const State& b) {
    const SpectralField ca = to_spectral(a.u), cb = to_spectral(b.u);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < cb.size(); ++k) {
      const double x = k < ca.size() ? ca.coeffs[k] : 0.0;
      num += (x - cb.coeffs[k]) * (x - cb.coeffs[k]);
      den += cb.coeffs[k] * cb.coeffs[k];
    }
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
  };
  const double e1 = coeff_diff(finals[3], finals[4]);
  const double e2 = coeff_diff(finals[4], finals[2]);
  Table ts{"spatial", {"n_modes", "rel_coeff_diff_to_next"}, {}};
  ts.rows.push_back({static_cast<double>(cfg.n_modes / 4), e1});
  ts.rows.push_back({static_cast<double>(cfg.n_modes / 2), e2});
  rep.tables.push_back(ts);
  if (e2 <= kRoundingFloor) {
    rep.add_check("spatial_floor", "spectral convergence reached the rounding floor", e2, 0.0, kRoundingFloor);
  } else {
    rep.add_check("spatial_ratio", "spectral convergence: error ratio per n doubling", e1 / e2, 10.0, kInf);
  }
  require_cases(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Almost-conservation growth

inline ExperimentReport run_gwp_growth(const ExperimentConfig& cfg, const Progress& progress = {}) {
  validate_experiment(cfg);
  if (cfg.N_list.empty() || cfg.s_list.empty()) throw ConfigError("N_list/s_list: must not be empty");
  const std::vector<std::string> defaults = {"increment_trend", "energy_drift", "sanity_gate"};
  ExperimentReport rep;
  rep.scenario = Scenario::gwp_growth;
  rep.seed = cfg.seed;

  if (check_enabled(cfg, defaults, "sanity_gate")) {
    ExperimentConfig gate = cfg;
    gate.scenario = Scenario::convergence;
    gate.data = ProfileParams{.kind = ProfileKind::gaussian, .amplitude = 1.0, .width = 1.0};
    gate.data_ut = ProfileParams{.kind = ProfileKind::zero};
    gate.t_final = 1.0;
    gate.nonlinear = true;
    if (progress) progress("gwp_growth: sanity gate (convergence at the same n, dt)");
    const ExperimentReport g = run_convergence(gate);
    rep.add_check("sanity_gate", "convergence scenario passes at the same (n, dt)", g.all_passed() ? 1.0 : 0.0, 1.0,
                  1.0);
    for (const auto& c : g.checks) rep.warnings.push_back("sanity gate: " + c.name + " = " + format_real(c.value));
  }

  const GridPtr grid = make_grid(cfg.r_max, cfg.n_modes);
  const State s0 = initial_state(cfg, grid);
  std::vector<std::pair<double, double>> keys;
  for (double s : cfg.s_list)
    for (double N : cfg.N_list) keys.emplace_back(N, s);

  DiagnosticsSpec spec;
  spec.modified = keys;
  spec.sobolev = cfg.s_list;
  std::vector<DiagnosticsRecord> records;
  EvolveParams ep;
  ep.dt = cfg.dt;
  ep.t_final = cfg.t_final;
  ep.snapshot_stride = cfg.snapshot_stride;
  ep.nonlinearity_on = cfg.nonlinear;
  ep.margin = cfg.margin;
  if (progress) progress("gwp_growth: evolving to t = " + format_real(cfg.t_final));
  evolve(s0, ep, {diagnostics_observer(spec, records)});
  rep.artifacts["time_series.csv"] = format_time_series(records, spec, cfg.config_hash, cfg.seed);

  const auto& first = records.front();
  double drift = 0.0;
  for (const auto& r : records)
    drift = std::max(drift, first.energy == 0.0 ? std::abs(r.energy) : std::abs(r.energy - first.energy) / first.energy);
  if (check_enabled(cfg, defaults, "energy_drift"))
    rep.add_check("energy_drift", "energy conservation along the discrete flow", drift, 0.0, cfg.energy_drift_tol);

  Table tab{"growth", {"s", "N", "E_Iu0", "sup_dE_Iu", "normalized_increment", "relative_increment"}, {}};
  for (double s : cfg.s_list) {
    std::vector<double> Ns, E0s, incs;
    for (double N : cfg.N_list) {
      const double E0 = first.modified_energy.at({N, s});
      double sup = 0.0;
      for (const auto& r : records) sup = std::max(sup, std::abs(r.modified_energy.at({N, s}) - E0));
      const double normalized = sup / std::pow(N, 2.0 * (1.0 - s));
      tab.rows.push_back({s, N, E0, sup, normalized, E0 > 0.0 ? sup / E0 : 0.0});
      Ns.push_back(N);
      E0s.push_back(E0);
      incs.push_back(normalized);
      ++rep.cases;
      if (check_enabled(cfg, defaults, "increment_zero"))
        rep.add_check("increment_zero[N=" + format_real(N) + ",s=" + format_real(s) + "]",
                      "I is the identity on data below N: no increment", E0 > 0.0 ? sup / E0 : sup, 0.0, 1e-6);
    }
    const std::string tag = "[s=" + format_real(s) + "]";
    if (Ns.size() >= 2 && std::all_of(E0s.begin(), E0s.end(), [](double e) { return e > 0.0; })) {
      const Fit f = fit_loglog("sobolev_exponent" + tag, Ns, E0s);
      rep.fits.push_back(f);
      if (check_enabled(cfg, defaults, "sobolev_exponent"))
        rep.add_check("sobolev_exponent" + tag, "E(Iu(0)) ~ N^{2(1-s)}: fitted exponent within 0.15", f.slope,
                      2.0 * (1.0 - s) - 0.15, 2.0 * (1.0 - s) + 0.15);
    } else if (check_enabled(cfg, defaults, "sobolev_exponent")) {
      rep.add_check("sobolev_exponent" + tag, "needs two N values and nonzero E(Iu(0))", std::nan(""), 0.0, 0.0);
    }
    if (check_enabled(cfg, defaults, "increment_trend")) {
      const bool positive = Ns.size() >= 2 && std::all_of(incs.begin(), incs.end(), [](double v) { return v > 0.0; });
      if (positive) {
        const Fit f = fit_loglog("increment_slope" + tag, Ns, incs);
        rep.fits.push_back(f);
        rep.add_check("increment_slope" + tag, "normalized increment decreases with N: fitted slope < 0", f.slope,
                      -kInf, -1e-12);
        double worst = 0.0;
        for (std::size_t i = 1; i < incs.size(); ++i) worst = std::max(worst, incs[i] / incs[i - 1]);
        rep.add_check("increment_step" + tag, "no increase beyond the factor-2 noise band between successive N",
                      worst, 0.0, 2.0);
        rep.add_check("increment_ends" + tag, "last normalized increment below the first", incs.back() / incs.front(),
                      0.0, 1.0 - 1e-12);
      } else {
        rep.add_check("increment_slope" + tag, "needs two N values and nonzero increments", std::nan(""), 0.0, 0.0);
      }
    }
  }
  rep.tables.push_back(tab);
  require_cases(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Scaling symmetry

inline ExperimentReport run_scaling(const ExperimentConfig& cfg, const Progress& progress = {}) {
  validate_experiment(cfg);
  ExperimentReport rep;
  rep.scenario = Scenario::scaling;
  rep.seed = cfg.seed;
  const GridPtr grid = make_grid(cfg.r_max, cfg.n_modes);
  const State s0 = initial_state(cfg, grid);
  const double T = cfg.t_final;

  auto final_state = [&](const State& init, double t, double dt, double margin) {
    EvolveParams ep;
    ep.dt = dt;
    ep.t_final = t;
    ep.snapshot_stride = std::numeric_limits<std::size_t>::max();
    ep.nonlinearity_on = cfg.nonlinear;
    ep.margin = margin;
    return evolve(init, ep).final_state;
  };
  if (progress) progress("scaling: reference runs");
  const auto ref = parallel_map(2, cfg.threads, [&](std::size_t i) {
    return final_state(s0, T, i == 0 ? cfg.dt : 0.5 * cfg.dt, cfg.margin);
  });

  Table tab{"scaling", {"lambda", "H1/2_rel_diff", "H-1/2_rel_diff", "disc_dt", "disc_dt_half"}, {}};
  for (double lam : cfg.lambda_list) {
    // u_lam(r) = lam u(lam r) on the grid of radius r_max/lam: the samples are lam u(r_j)
    const GridPtr g2 = make_grid(cfg.r_max / lam, cfg.n_modes);
    State s1 = State::zero(g2);
    for (std::size_t j = 0; j < s1.u.size(); ++j) {
      s1.u.values[j] = lam * s0.u.values[j];
      s1.ut.values[j] = lam * lam * s0.ut.values[j];
    }
    auto rel = [](double a, double b) { return b == 0.0 ? std::abs(a) : std::abs(a - b) / b; };
    const double dh = rel(sobolev_norm(s1.u, 0.5), sobolev_norm(s0.u, 0.5));
    const double dm = rel(sobolev_norm(s1.ut, -0.5), sobolev_norm(s0.ut, -0.5));
    const std::string tag = "[lambda=" + format_real(lam) + "]";
    rep.add_check("critical_norm_u" + tag, "H^{1/2} norm of u0 is scale invariant", dh, 0.0, 1e-10);
    rep.add_check("critical_norm_ut" + tag, "H^{-1/2} norm of u1 is scale invariant", dm, 0.0, 1e-10);

    if (progress) progress("scaling: lambda = " + format_real(lam));
    const auto runs = parallel_map(2, cfg.threads, [&](std::size_t i) {
      return final_state(s1, T / lam, i == 0 ? cfg.dt : 0.5 * cfg.dt, cfg.margin / lam);
    });
    double disc[2];
    for (int i = 0; i < 2; ++i) {
      RadialField scaled(g2);
      for (std::size_t j = 0; j < scaled.size(); ++j) scaled.values[j] = lam * ref[i].u.values[j];
      disc[i] = relative_l2(runs[i].u, scaled);
    }
    tab.rows.push_back({lam, dh, dm, disc[0], disc[1]});
    if (lam == 1.0) {
      rep.add_check("equivariance" + tag, "lambda = 1 is the identity map", disc[0], 0.0, 0.0);
    } else {
      rep.add_check("equivariance" + tag, "evolve-then-rescale matches rescale-then-evolve", disc[1], 0.0, 1e-4);
      rep.add_check("equivariance_order" + tag, "discrepancy shrinks ~4x under dt halving",
                    disc[1] > 0.0 ? disc[0] / disc[1] : kInf, 3.5, 4.5);
    }
    ++rep.cases;
  }
  rep.tables.push_back(tab);
  require_cases(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Sharp Huygens

inline ExperimentReport run_huygens(const ExperimentConfig& cfg, const Progress& progress = {}) {
  validate_experiment(cfg);
  const double T = cfg.huygens_T, R = cfg.huygens_R;
  if (!(R > 0.0) || !(T - R > 0.0)) throw ConfigError("huygens_T, huygens_R: annulus misconfigured, need T > R > 0");
  if (T + R + cfg.margin > cfg.r_max) throw ConfigError("huygens_T, huygens_R: annulus does not fit inside r_max");
  if (cfg.huygens_samples < 2) throw ConfigError("huygens_samples: need at least 2");
  ExperimentReport rep;
  rep.scenario = Scenario::huygens;
  rep.seed = cfg.seed;
  const GridPtr grid = make_grid(cfg.r_max, cfg.n_modes);
  ProfileParams p;
  p.kind = ProfileKind::annulus_bump;
  p.inner = T;
  p.thickness = R;
  p.amplitude = cfg.data.amplitude;
  const State s0(RadialField(grid), sample_profile(p, grid));

  auto ratio = [&](double t) {
    const State s = linear_propagate(s0, t, cfg.margin);
    std::vector<double> w(s.u.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = s.u.values[j] * s.u.values[j];
    const double all = ball_integral(grid, w, grid->r_max());
    return all == 0.0 ? 0.0 : std::sqrt(ball_integral(grid, w, R) / all);
  };

  std::vector<double> times;
  const std::size_t m = cfg.huygens_samples;
  for (std::size_t i = 0; i < m; ++i) times.push_back((T - R) * static_cast<double>(i) / static_cast<double>(m - 1));
  const double t_end = cfg.r_max - (T + R) - cfg.margin;
  if (t_end > T + 2.0 * R) {
    for (std::size_t i = 1; i <= m; ++i)
      times.push_back(T + 2.0 * R + (t_end - T - 2.0 * R) * static_cast<double>(i) / static_cast<double>(m));
  } else {
    rep.warnings.push_back("domain too small to sample the window t > T + 2R");
  }
  if (progress) progress("huygens: " + std::to_string(times.size()) + " sample times");
  const auto ratios = parallel_map(times.size(), cfg.threads, [&](std::size_t i) { return ratio(times[i]); });
  const double overhead = ratio(T);

  Table tab{"huygens", {"t", "interior_ratio"}, {}};
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    tab.rows.push_back({times[i], ratios[i]});
    worst = std::max(worst, ratios[i]);
    ++rep.cases;
  }
  tab.rows.push_back({T, overhead});
  rep.tables.push_back(tab);
  rep.add_check("huygens_gap", "interior L2 norm ratio vanishes for t <= T-R and t > T+2R", worst, 0.0, 1e-8);
  rep.add_check("huygens_sanity", "interior ratio is O(1) at t = T", overhead, 0.1, kInf);
  require_cases(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Strichartz ratio ensemble

// Random localized smooth data a exp(-(r/w)^2) cos(k r) for both components.
inline State ensemble_member(const GridPtr& grid, std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> amp(-2.0, 2.0), width(0.4, 1.5), freq(0.0, 3.0);
  const auto r = grid->radii();
  State s = State::zero(grid);
  for (RadialField* f : {&s.u, &s.ut}) {
    const double a = amp(rng), w = width(rng), k = freq(rng);
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double x = r[j] / w;
      f->values[j] = a * std::exp(-x * x) * std::cos(k * r[j]);
    }
  }
  return s;
}

struct StrichartzSample {
  double ratio = 0.0;
  bool skipped = false;
  double low_mode_fraction = 0.0;
};

// ||u||_{L^4([0,T] x R^3)} / (||u0||_{H^{1/2}} + ||u1||_{H^{-1/2}}) along the
// exact linear flow sampled every h.
inline StrichartzSample strichartz_ratio(const State& s0, double T, double h, Boundary boundary = Boundary::enforce,
                                         double margin = 0.0) {
  StrichartzSample out;
  const SpectralField c1 = to_spectral(s0.ut);
  const double den = sobolev_norm(s0.u, 0.5) + sobolev_norm(c1, -0.5);
  out.low_mode_fraction = low_mode_fraction(c1, -0.5);
  if (den == 0.0) {
    out.skipped = true;
    return out;
  }
  out.ratio = strichartz_l4(linear_trajectory(s0, T, h, boundary, margin)) / den;
  return out;
}

inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double f = pos - static_cast<double>(i);
  return i + 1 < v.size() ? v[i] + f * (v[i + 1] - v[i]) : v[i];
}

inline ExperimentReport run_strichartz_ratio(const ExperimentConfig& cfg, const Progress& progress = {}) {
  validate_experiment(cfg);
  if (cfg.ensemble < 100) throw ConfigError("ensemble: at least 100 samples required");
  ExperimentReport rep;
  rep.scenario = Scenario::strichartz_ratio;
  rep.seed = cfg.seed;
  const double h = cfg.dt * static_cast<double>(cfg.snapshot_stride);
  const std::vector<std::size_t> ns = {cfg.n_modes, 2 * cfg.n_modes};
  Table stats{"strichartz_ratio", {"n_modes", "samples", "skipped", "max", "mean", "q50", "q90"}, {}};
  std::vector<double> maxima;
  for (std::size_t n : ns) {
    const GridPtr grid = make_grid(cfg.r_max, n);
    if (progress) progress("strichartz_ratio: " + std::to_string(cfg.ensemble) + " samples at n = " + std::to_string(n));
    const auto samples = parallel_map(cfg.ensemble, cfg.threads, [&](std::size_t i) {
      return strichartz_ratio(ensemble_member(grid, cfg.seed, i), cfg.t_final, h, Boundary::enforce, cfg.margin);
    });
    std::vector<double> ratios;
    std::size_t skipped = 0, truncated = 0;
    for (const auto& s : samples) {
      if (s.skipped) {
        ++skipped;
        continue;
      }
      if (s.low_mode_fraction > 0.01) ++truncated;
      ratios.push_back(s.ratio);
    }
    if (truncated > 0)
      rep.warnings.push_back(std::to_string(truncated) + " samples at n = " + std::to_string(n) +
                             " carry > 1% of their H^{-1/2} norm in modes rho <= 4 rho_1 (truncation-sensitive)");
    if (ratios.empty()) throw Error("strichartz_ratio: every sample was skipped");
    double mean = 0.0;
    for (double r : ratios) mean += r / static_cast<double>(ratios.size());
    const double mx = *std::max_element(ratios.begin(), ratios.end());
    stats.rows.push_back({static_cast<double>(n), static_cast<double>(ratios.size()), static_cast<double>(skipped), mx,
                          mean, quantile(ratios, 0.5), quantile(ratios, 0.9)});
    maxima.push_back(mx);
    rep.cases += ratios.size();
  }
  rep.tables.push_back(stats);
  rep.add_check("strichartz_max_finite", "ensemble max ratio is finite", maxima[0], 0.0,
                std::numeric_limits<double>::max());
  rep.add_check("strichartz_refinement", "max ratio stable within 10% under n doubling", maxima[1] / maxima[0], 0.9,
                1.1);
  require_cases(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Bilinear sweep

inline ExperimentReport run_bilinear_sweep(const ExperimentConfig& cfg, const Progress& progress = {}) {
  validate_experiment(cfg);
  const double T0 = cfg.t_final;
  if (4.0 * T0 > cfg.r_max) throw ConfigError("t_final: the bilinear sweep needs 4 T0 <= r_max");
  ExperimentReport rep;
  rep.scenario = Scenario::bilinear_sweep;
  rep.seed = cfg.seed;

  struct Case {
    double M, N, s;
  };
  std::vector<Case> cases;
  for (double s : cfg.s_list)
    for (double N : cfg.N_list) {
      if (!(T0 * N > 1.0)) throw ConfigError("t_final, N_list: need T0 N > 1 so that ln T0 + ln N > 0");
      for (double M : cfg.M_list)
        if (M <= N) cases.push_back({M, N, s});
    }
  if (cases.empty()) throw ConfigError("M_list: no case with M <= N");

  const std::vector<std::size_t> ns = {cfg.n_modes, 2 * cfg.n_modes};
  if (progress) progress("bilinear_sweep: evolving at n = " + std::to_string(ns[0]) + " and " + std::to_string(ns[1]));
  const auto trajs = parallel_map(ns.size(), cfg.threads, [&](std::size_t i) {
    const GridPtr grid = make_grid(cfg.r_max, ns[i]);
    EvolveParams ep;
    ep.dt = cfg.dt;
    ep.t_final = T0;
    ep.snapshot_stride = cfg.snapshot_stride;
    ep.nonlinearity_on = cfg.nonlinear;
    ep.margin = cfg.margin;
    return evolve(initial_state(cfg, grid), ep).trajectory;
  });
  if (progress) progress("bilinear_sweep: " + std::to_string(cases.size()) + " cases");

  struct Row {
    std::map<std::string, double> lhs;
    double S = 0.0, grad = 0.0, rhs = 0.0, ratio = 0.0;
  };
  const auto rows = parallel_map(cases.size() * ns.size(), cfg.threads, [&](std::size_t idx) {
    const Case& c = cases[idx / ns.size()];
    const Trajectory& tr = trajs[idx % ns.size()];
    Row r;
    r.lhs = bilinear_quantities(tr, c.M, c.N, c.s, T0);
    r.S = long_time_S(tr, c.M / 8.0, c.N, c.s, T0);
    r.grad = sup_gradient_Iu(tr, c.N, c.s);
    r.rhs = std::sqrt(std::log(T0) + std::log(c.N)) * r.S * r.grad;
    r.ratio = r.lhs.at("blspace") == 0.0 ? 0.0 : r.lhs.at("blspace") / r.rhs;
    return r;
  });

  Table tab{"bilinear",
            {"M", "N", "s", "blspace", "blfreq", "biltime", "S(M/8)", "sup_grad_Iu", "rhs", "ratio", "ratio_2n",
             "blspace_2n"},
            {}};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Row& a = rows[i * ns.size()];
    const Row& b = rows[i * ns.size() + 1];
    const Case& c = cases[i];
    tab.rows.push_back({c.M, c.N, c.s, a.lhs.at("blspace"), a.lhs.at("blfreq"), a.lhs.at("biltime"), a.S, a.grad,
                        a.rhs, a.ratio, b.ratio, b.lhs.at("blspace")});
    const double change = a.ratio == 0.0 ? (b.ratio == 0.0 ? 1.0 : kInf) : b.ratio / a.ratio;
    const std::string tag = "[M=" + format_real(c.M) + ",N=" + format_real(c.N) + ",s=" + format_real(c.s) + "]";
    rep.add_check("bilinear_refinement" + tag, "ratio stable within 20% under n doubling", change, 0.8, 1.2);
    ++rep.cases;
    // M doubled at the same (N, s)
    for (std::size_t j = 0; j < cases.size(); ++j) {
      const Case& d = cases[j];
      if (d.N == c.N && d.s == c.s && d.M == 2.0 * c.M) {
        const double l0 = a.lhs.at("blspace"), l1 = rows[j * ns.size()].lhs.at("blspace");
        rep.add_check("blspace_monotone_M" + tag, "LHS nonincreasing when M doubles", l0 == 0.0 ? 0.0 : l1 / l0, 0.0,
                      1.0 + 1e-12);
      }
    }
  }
  rep.tables.push_back(tab);
  require_cases(rep);
  return rep;
}

// ---------------------------------------------------------------------------

inline ExperimentReport run_experiment(const ExperimentConfig& cfg, const Progress& progress = {}) {
  switch (cfg.scenario) {
    case Scenario::gwp_growth: return run_gwp_growth(cfg, progress);
    case Scenario::scaling: return run_scaling(cfg, progress);
    case Scenario::huygens: return run_huygens(cfg, progress);
    case Scenario::strichartz_ratio: return run_strichartz_ratio(cfg, progress);
    case Scenario::bilinear_sweep: return run_bilinear_sweep(cfg, progress);
    case Scenario::convergence: return run_convergence(cfg, progress);
  }
  throw InvalidArgument("run_experiment: unknown scenario");
}

}  // namespace nlwave
