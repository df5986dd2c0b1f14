#pragma once

// Scalar functionals of states and trajectories: energy, modified energy and
// its time derivative, Strichartz and local-energy norms, the long-time
// bundle S(M) and the bilinear quantities.
//
// Space integrals use the grid trapezoid rule (see radial_spectral.hpp);
// time integrals use the trapezoid rule over trajectory snapshots.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlwave/error.hpp"
#include "nlwave/evolve.hpp"
#include "nlwave/io.hpp"
#include "nlwave/multiplier.hpp"
#include "nlwave/radial_spectral.hpp"

namespace nlwave {

// ---------------------------------------------------------------------------
// Energies

struct EnergyParts {
  double gradient = 0.0;  // 1/2 ||grad u||^2
  double kinetic = 0.0;   // 1/2 ||u_t||^2
  double quartic = 0.0;   // 1/4 ||u||_4^4
  double total() const { return gradient + kinetic + quartic; }
};

inline double quartic_integral(const RadialField& u) {
  const auto r = u.grid->radii();
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double v2 = u.values[j] * u.values[j];
    s += v2 * v2 * r[j] * r[j];
  }
  return kFourPi * u.grid->dr() * s;
}

inline EnergyParts energy_parts(const SpectralField& g, const SpectralField& h, const RadialField& u) {
  EnergyParts e;
  const double h1 = sobolev_norm(g, 1.0);
  const double l2 = sobolev_norm(h, 0.0);
  e.gradient = 0.5 * h1 * h1;
  e.kinetic = 0.5 * l2 * l2;
  e.quartic = 0.25 * quartic_integral(u);
  return e;
}

inline EnergyParts energy_parts(const State& s) {
  return energy_parts(to_spectral(s.u), to_spectral(s.ut), s.u);
}

inline double energy(const State& s) { return energy_parts(s).total(); }

inline EnergyParts modified_energy_parts(const State& s, double N, double s_exp) {
  MultiplierSpec::check_i_exponent(s_exp);
  if (N < s.grid()->rho_min()) throw InvalidArgument("modified_energy: N below the lowest grid frequency");
  const auto I = MultiplierSpec::i_op(N, s_exp);
  const SpectralField g = apply_multiplier(to_spectral(s.u), I);
  const SpectralField h = apply_multiplier(to_spectral(s.ut), I);
  return energy_parts(g, h, to_physical(g));
}

// E(Iu) = energy of (I u, I u_t).
inline double modified_energy(const State& s, double N, double s_exp) {
  return modified_energy_parts(s, N, s_exp).total();
}

// d/dt E(Iu(t)) along u_tt - Delta u = -u^3:
//   int (I u_t) ((I u)^3 - I(u^3)) dx
// I(u^3) is formed spectrally from the pointwise cube, (Iu)^3 pointwise.
inline double modified_energy_derivative(const State& s, double N, double s_exp) {
  MultiplierSpec::check_i_exponent(s_exp);
  if (N < s.grid()->rho_min()) throw InvalidArgument("modified_energy_derivative: N below rho_1");
  const auto I = MultiplierSpec::i_op(N, s_exp);
  const RadialField Iu = apply_multiplier(s.u, I);
  const RadialField Iut = apply_multiplier(s.ut, I);
  RadialField cube(s.grid());
  for (std::size_t j = 0; j < cube.size(); ++j) cube.values[j] = s.u.values[j] * s.u.values[j] * s.u.values[j];
  const RadialField Icube = apply_multiplier(cube, I);
  RadialField commutator(s.grid());
  for (std::size_t j = 0; j < cube.size(); ++j) {
    const double v = Iu.values[j];
    commutator.values[j] = v * v * v - Icube.values[j];
  }
  return l2_pairing(Iut, commutator);
}

// ---------------------------------------------------------------------------
// Trajectory norms

enum class Component { u, ut, grad_u };

inline std::string to_string(Component c) {
  switch (c) {
    case Component::u: return "u";
    case Component::ut: return "u_t";
    case Component::grad_u: return "grad_u";
  }
  return "?";
}

namespace detail {

inline double time_trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
  return s;
}

inline void require_snapshots(const Trajectory& traj, const char* where) {
  if (traj.size() < 2) throw InvalidArgument(std::string(where) + ": need at least two snapshots");
}

inline SpectralField component_coeffs(const State& s, Component c) {
  return to_spectral(c == Component::ut ? s.ut : s.u);
}

}  // namespace detail

// (int dt 4 pi int (Op v)^4 r^2 dr)^(1/4), v = u (default) or u_t.
inline double strichartz_l4(const Trajectory& traj, const std::optional<MultiplierSpec>& op = std::nullopt,
                            Component component = Component::u) {
  detail::require_snapshots(traj, "strichartz_l4");
  if (component == Component::grad_u) throw InvalidArgument("strichartz_l4: component must be u or u_t");
  const auto times = traj.times();
  std::vector<double> per_time;
  per_time.reserve(traj.size());
  for (const auto& s : traj.snapshots) {
    const RadialField& v = component == Component::ut ? s.ut : s.u;
    const RadialField w = op ? apply_multiplier(v, *op) : v;
    per_time.push_back(quartic_integral(w));
  }
  return std::pow(detail::time_trapezoid(times, per_time), 0.25);
}

namespace detail {

// 4 pi int_{|x|<=R} |grad v|^2 dx from the sine coefficients of v, via
//   int_0^R (r v_r)^2 dr = int_0^R g'^2 dr - g(R)^2 / R.
inline double gradient_ball_integral(const SpectralField& c, const std::vector<double>& dg, double R) {
  const auto& grid = *c.grid;
  const std::size_t n = c.size();
  const double dr = grid.dr();
  std::vector<double> H(n + 2);
  for (std::size_t j = 0; j < n + 2; ++j) H[j] = dg[j] * dg[j];
  const double integral = trapezoid_with_endpoints(H, dr, R);
  double gR = 0.0;
  if (R < grid.r_max()) {
    const auto g = g_samples(to_physical(c));
    const double x = R / dr;
    const auto m = static_cast<std::size_t>(std::floor(x));
    const double frac = x - static_cast<double>(m);
    auto gs = [&](std::size_t j) { return (j == 0 || j >= n + 1) ? 0.0 : g[j - 1]; };
    gR = gs(m) + frac * (gs(m + 1) - gs(m));
  }
  return kFourPi * (integral - gR * gR / R);
}

// Per-snapshot integrand of a local-energy norm, for every radius in `radii`.
inline std::vector<double> local_integrals(const SpectralField& c, Component comp, const std::vector<double>& radii) {
  std::vector<double> out;
  out.reserve(radii.size());
  if (comp == Component::grad_u) {
    const auto dg = g_derivative(c);
    for (double R : radii) out.push_back(gradient_ball_integral(c, dg, R));
  } else {
    const RadialField v = to_physical(c);
    std::vector<double> w2(v.size());
    for (std::size_t j = 0; j < w2.size(); ++j) w2[j] = v.values[j] * v.values[j];
    for (double R : radii) out.push_back(ball_integral(c.grid, w2, R));
  }
  return out;
}

}  // namespace detail

// R^(-1/2) (int dt 4 pi int_0^R (Op v)^2 r^2 dr)^(1/2) for several R at once.
inline std::vector<double> local_energy_profile(const Trajectory& traj, const std::vector<double>& radii,
                                                Component component,
                                                const std::optional<MultiplierSpec>& op = std::nullopt) {
  detail::require_snapshots(traj, "local_energy");
  const double r_max = traj.grid()->r_max();
  for (double R : radii)
    if (!(R > 0.0) || R > r_max) throw InvalidArgument("local_energy: R must lie in (0, r_max]");
  const auto times = traj.times();
  std::vector<std::vector<double>> per_time(radii.size(), std::vector<double>(traj.size()));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    SpectralField c = detail::component_coeffs(traj.snapshots[i], component);
    if (op) c = apply_multiplier(std::move(c), *op);
    const auto vals = detail::local_integrals(c, component, radii);
    for (std::size_t q = 0; q < radii.size(); ++q) per_time[q][i] = vals[q];
  }
  std::vector<double> out(radii.size());
  for (std::size_t q = 0; q < radii.size(); ++q)
    out[q] = std::sqrt(std::max(0.0, detail::time_trapezoid(times, per_time[q]))) / std::sqrt(radii[q]);
  return out;
}

inline double local_energy(const Trajectory& traj, double R, Component component,
                           const std::optional<MultiplierSpec>& op = std::nullopt) {
  return local_energy_profile(traj, {R}, component, op).front();
}

// Dyadic radii R = R_lo 2^j inside [R_lo, R_hi], with R_hi itself appended.
inline std::vector<double> dyadic_radii(double R_lo, double R_hi) {
  std::vector<double> out;
  for (double R = R_lo; R < R_hi * (1.0 - 1e-12); R *= 2.0) out.push_back(R);
  out.push_back(R_hi);
  return out;
}

// ---------------------------------------------------------------------------
// Long-time bundle S(M)

struct LongTimeTerms {
  double frac_l4_u = 0.0;     // ||P_{>M} |grad|^{1/2} I u||_{L^4}
  double frac_l4_ut = 0.0;    // ||P_{>M} |grad|^{-1/2} I u_t||_{L^4}
  double local_grad = 0.0;    // sup_R R^{-1/2} ||P_{>M} grad I u||_{L^2(|x|<=R)}
  double local_ut = 0.0;      // sup_R R^{-1/2} ||P_{>M} I u_t||
  double local_mass = 0.0;    // sup_R R^{-1/2} M ||P_{>M} I u||
  double sum() const { return frac_l4_u + frac_l4_ut + local_grad + local_ut + local_mass; }
};

inline std::vector<double> long_time_radii(const Trajectory& traj, double N, double T0) {
  const double hi = std::min(4.0 * T0, traj.grid()->r_max());
  const double lo = std::min(1.0 / N, hi);
  return dyadic_radii(lo, hi);
}

inline LongTimeTerms long_time_S_terms(const Trajectory& traj, double M, double N, double s, double T0) {
  detail::require_snapshots(traj, "long_time_S");
  if (!(M > 0.0) || M > N) throw InvalidArgument("long_time_S: need 0 < M <= N");
  if (T0 < traj.duration() * (1.0 - 1e-12)) throw InvalidArgument("long_time_S: T0 below trajectory duration");
  const auto I = MultiplierSpec::i_op(N, s);
  const auto high = MultiplierSpec::lp_gt(M);
  const auto radii = long_time_radii(traj, N, T0);
  auto sup = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };

  LongTimeTerms t;
  t.frac_l4_u = strichartz_l4(traj, high * MultiplierSpec::frac_deriv(0.5) * I, Component::u);
  t.frac_l4_ut = strichartz_l4(traj, high * MultiplierSpec::frac_deriv(-0.5) * I, Component::ut);
  t.local_grad = sup(local_energy_profile(traj, radii, Component::grad_u, high * I));
  t.local_ut = sup(local_energy_profile(traj, radii, Component::ut, high * I));
  t.local_mass = M * sup(local_energy_profile(traj, radii, Component::u, high * I));
  return t;
}

inline double long_time_S(const Trajectory& traj, double M, double N, double s, double T0) {
  return long_time_S_terms(traj, M, N, s, T0).sum();
}

// ---------------------------------------------------------------------------
// Bilinear quantities
//
//   blspace: ||(P_{>M/8} grad I u)(P_{<N} u)||_{L^2([0,T] x {|x| <= 4 T0})}
//   blfreq:  ||(P_{>M/8} u)(P_{<N} u)||
//   biltime: ||(P_{>M/8} I u_t)(P_{<N} u)||
// P_{<N} is realized as P_{<=N} (symbol psi(rho/N)).

inline std::map<std::string, double> bilinear_quantities(const Trajectory& traj, double M, double N, double s,
                                                         double T0) {
  detail::require_snapshots(traj, "bilinear_quantities");
  if (!(M > 0.0) || M > N) throw InvalidArgument("bilinear_quantities: need 0 < M <= N");
  const auto I = MultiplierSpec::i_op(N, s);
  const auto high = MultiplierSpec::lp_gt(M / 8.0);
  const auto low = MultiplierSpec::lp_leq(N);
  const double R = std::min(4.0 * T0, traj.grid()->r_max());
  const auto times = traj.times();
  const auto& grid = traj.grid();
  std::vector<double> space(traj.size()), freq(traj.size()), timev(traj.size());
  std::vector<double> w(grid->n_modes());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const State& st = traj.snapshots[i];
    const SpectralField gu = to_spectral(st.u);
    const RadialField low_u = to_physical(apply_multiplier(gu, low));
    const auto grad_hi = radial_gradient(apply_multiplier(gu, high * I));
    const RadialField hi_u = to_physical(apply_multiplier(gu, high));
    const RadialField hi_ut = apply_multiplier(st.ut, high * I);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::pow(grad_hi[j] * low_u.values[j], 2);
    space[i] = ball_integral(grid, w, R);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::pow(hi_u.values[j] * low_u.values[j], 2);
    freq[i] = ball_integral(grid, w, R);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::pow(hi_ut.values[j] * low_u.values[j], 2);
    timev[i] = ball_integral(grid, w, R);
  }
  return {{"blspace", std::sqrt(detail::time_trapezoid(times, space))},
          {"blfreq", std::sqrt(detail::time_trapezoid(times, freq))},
          {"biltime", std::sqrt(detail::time_trapezoid(times, timev))}};
}

// sup_t ||grad I u(t)||_{L^2}
inline double sup_gradient_Iu(const Trajectory& traj, double N, double s) {
  double best = 0.0;
  for (const auto& st : traj.snapshots)
    best = std::max(best, sobolev_norm(apply_multiplier(to_spectral(st.u), MultiplierSpec::i_op(N, s)), 1.0));
  return best;
}

// ---------------------------------------------------------------------------
// Bundles and diagnostics

struct NormBundle {
  double strichartz_l4 = 0.0;
  double frac_strichartz_l4 = 0.0;  // on |grad|^{1/2} I u
  std::map<double, double> local_energy;  // R -> grad_u local energy
  double long_time_S = 0.0;
  LongTimeTerms long_time_terms;
  std::map<std::string, double> bilinear;
};

inline NormBundle norm_bundle(const Trajectory& traj, double M, double N, double s, double T0) {
  NormBundle b;
  b.strichartz_l4 = strichartz_l4(traj);
  b.frac_strichartz_l4 = strichartz_l4(traj, MultiplierSpec::frac_deriv(0.5) * MultiplierSpec::i_op(N, s));
  const auto radii = long_time_radii(traj, N, T0);
  const auto le = local_energy_profile(traj, radii, Component::grad_u);
  for (std::size_t q = 0; q < radii.size(); ++q) b.local_energy[radii[q]] = le[q];
  b.long_time_terms = long_time_S_terms(traj, M, N, s, T0);
  b.long_time_S = b.long_time_terms.sum();
  b.bilinear = bilinear_quantities(traj, M, N, s, T0);
  return b;
}

struct DiagnosticsRecord {
  double t = 0.0;
  double energy = 0.0;
  std::map<std::pair<double, double>, double> modified_energy;  // (N, s) -> E(Iu)
  std::map<double, double> sobolev;                              // s -> ||u||_{H^s}
  std::map<std::string, double> extras;
};

struct DiagnosticsSpec {
  std::vector<std::pair<double, double>> modified;  // (N, s)
  std::vector<double> sobolev;
};

inline DiagnosticsRecord diagnose(const State& st, const DiagnosticsSpec& spec) {
  DiagnosticsRecord rec;
  rec.t = st.t;
  const SpectralField g = to_spectral(st.u);
  const SpectralField h = to_spectral(st.ut);
  rec.energy = energy_parts(g, h, st.u).total();
  for (const auto& [N, s] : spec.modified) rec.modified_energy[{N, s}] = modified_energy(st, N, s);
  for (double s : spec.sobolev) rec.sobolev[s] = sobolev_norm(g, s);
  return rec;
}

// Observer that appends a DiagnosticsRecord per snapshot to `sink`.
inline Observer diagnostics_observer(DiagnosticsSpec spec, std::vector<DiagnosticsRecord>& sink) {
  return [spec = std::move(spec), &sink](const State& st) { sink.push_back(diagnose(st, spec)); };
}

// Delimited time series: '#' provenance lines, one header row, then one row
// per record. Column order: t, energy, E_Iu@(N,s) in spec order, H^s norms in
// spec order, extras in key order (taken from the first record).
inline std::string format_time_series(const std::vector<DiagnosticsRecord>& records, const DiagnosticsSpec& spec,
                                      const std::string& config_hash, std::uint64_t seed) {
  std::string out;
  out += "# nlwave time series\n";
  out += "# format_version: " + std::to_string(kFormatVersion) + "\n";
  out += "# config_hash: " + config_hash + "\n";
  out += "# seed: " + std::to_string(seed) + "\n";
  std::vector<std::string> extra_keys;
  if (!records.empty())
    for (const auto& [k, v] : records.front().extras) extra_keys.push_back(k);
  out += "t,energy";
  for (const auto& [N, s] : spec.modified) out += ",E_Iu@(" + format_real(N) + ";" + format_real(s) + ")";
  for (double s : spec.sobolev) out += ",H^" + format_real(s);
  for (const auto& k : extra_keys) out += "," + k;
  out += "\n";
  for (const auto& r : records) {
    out += format_real(r.t) + "," + format_real(r.energy);
    for (const auto& key : spec.modified) out += "," + format_real(r.modified_energy.at(key));
    for (double s : spec.sobolev) out += "," + format_real(r.sobolev.at(s));
    for (const auto& k : extra_keys) {
      auto it = r.extras.find(k);
      out += "," + (it == r.extras.end() ? std::string("nan") : format_real(it->second));
    }
    out += "\n";
  }
  return out;
}

}  // namespace nlwave
