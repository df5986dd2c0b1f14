#pragma once

// Radial substrate: grid, fields, the sine transform of g(r) = r u(r),
// quadrature on the ball, and data profiles.
//
// Conventions
//   r_j   = j dr,  j = 1..n,  dr = r_max / (n + 1)
//   rho_k = k pi / r_max,     k = 1..n
//   g(r)  = sum_k ghat_k sin(rho_k r)
//   ||u||^2_{H^s} = 4 pi (r_max / 2) sum_k rho_k^{2s} ghat_k^2
// With these, -Delta is diagonal with symbol rho_k^2 and the trapezoid rule on
// the grid satisfies Plancherel exactly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nlwave/error.hpp"
#include "nlwave/sine_transform.hpp"
#include "nlwave/smooth.hpp"

namespace nlwave {

inline constexpr std::size_t kMinModes = 8;
inline constexpr double kFourPi = 4.0 * std::numbers::pi;

class RadialGrid {
 public:
  RadialGrid(double r_max, std::size_t n_modes) {
    if (!(r_max > 0.0) || !std::isfinite(r_max))
      throw InvalidArgument("make_grid: r_max must be positive and finite");
    if (n_modes < kMinModes)
      throw InvalidArgument("make_grid: n_modes >= 8 required, got " + std::to_string(n_modes));
    n_ = n_modes;
    dr_ = r_max / static_cast<double>(n_ + 1);
    r_max_ = dr_ * static_cast<double>(n_ + 1);
    rho_.resize(n_);
    radii_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      rho_[k] = static_cast<double>(k + 1) * std::numbers::pi / r_max_;
      radii_[k] = static_cast<double>(k + 1) * dr_;
    }
  }

  double r_max() const noexcept { return r_max_; }
  std::size_t n_modes() const noexcept { return n_; }
  double dr() const noexcept { return dr_; }
  std::span<const double> rho() const noexcept { return rho_; }
  std::span<const double> radii() const noexcept { return radii_; }
  double rho_min() const noexcept { return rho_.front(); }
  double rho_max() const noexcept { return rho_.back(); }

  // 4 pi (r_max / 2): converts sums of squared sine coefficients into L^2(R^3).
  double plancherel_weight() const noexcept { return kFourPi * 0.5 * r_max_; }

  bool operator==(const RadialGrid& other) const noexcept {
    return n_ == other.n_ && r_max_ == other.r_max_;
  }

 private:
  double r_max_ = 0.0;
  std::size_t n_ = 0;
  double dr_ = 0.0;
  std::vector<double> rho_;
  std::vector<double> radii_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr make_grid(double r_max, std::size_t n_modes) {
  return std::make_shared<const RadialGrid>(r_max, n_modes);
}

inline void require_same_grid(const GridPtr& a, const GridPtr& b, const char* where) {
  if (!a || !b) throw InvalidArgument(std::string(where) + ": null grid");
  if (a != b && !(*a == *b))
    throw GridMismatch(std::string(where) + ": fields live on different grids");
}

// Samples u(r_j), j = 1..n. u(0) is never stored.
struct RadialField {
  GridPtr grid;
  std::vector<double> values;

  RadialField() = default;
  explicit RadialField(GridPtr g) : grid(std::move(g)), values(grid->n_modes(), 0.0) {}
  RadialField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid->n_modes())
      throw InvalidArgument("RadialField: sample count does not match grid");
  }

  std::size_t size() const noexcept { return values.size(); }
  bool all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
  }
};

// Sine coefficients ghat_k of g(r) = r u(r).
struct SpectralField {
  GridPtr grid;
  std::vector<double> coeffs;

  SpectralField() = default;
  explicit SpectralField(GridPtr g) : grid(std::move(g)), coeffs(grid->n_modes(), 0.0) {}
  SpectralField(GridPtr g, std::vector<double> c) : grid(std::move(g)), coeffs(std::move(c)) {
    if (coeffs.size() != grid->n_modes())
      throw InvalidArgument("SpectralField: coefficient count does not match grid");
  }

  std::size_t size() const noexcept { return coeffs.size(); }
};

// Phase-space point (u, u_t) at time t.
struct State {
  RadialField u;
  RadialField ut;
  double t = 0.0;

  State() = default;
  State(RadialField u_, RadialField ut_, double t_ = 0.0)
      : u(std::move(u_)), ut(std::move(ut_)), t(t_) {
    require_same_grid(u.grid, ut.grid, "State");
    if (!std::isfinite(t)) throw InvalidArgument("State: non-finite time");
  }

  static State zero(const GridPtr& grid) { return State(RadialField(grid), RadialField(grid), 0.0); }
  const GridPtr& grid() const noexcept { return u.grid; }
};

// ---------------------------------------------------------------------------
// Transforms

inline SpectralField to_spectral(const RadialField& f) {
  const auto& grid = *f.grid;
  const std::size_t n = grid.n_modes();
  std::vector<double> g(n);
  const auto r = grid.radii();
  for (std::size_t j = 0; j < n; ++j) g[j] = r[j] * f.values[j];
  SpectralField out(f.grid);
  detail::r2r(detail::R2RKind::dst1, g, out.coeffs);
  const double scale = 1.0 / static_cast<double>(n + 1);
  for (double& c : out.coeffs) c *= scale;
  return out;
}

inline RadialField to_physical(const SpectralField& c) {
  const auto& grid = *c.grid;
  const std::size_t n = grid.n_modes();
  RadialField out(c.grid);
  detail::r2r(detail::R2RKind::dst1, c.coeffs, out.values);
  const auto r = grid.radii();
  for (std::size_t j = 0; j < n; ++j) out.values[j] *= 0.5 / r[j];
  return out;
}

// g(r_j) = r_j u(r_j) for j = 1..n.
inline std::vector<double> g_samples(const RadialField& f) {
  std::vector<double> g(f.size());
  const auto r = f.grid->radii();
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = r[j] * f.values[j];
  return g;
}

// g'(r_j) for j = 0..n+1, i.e. including both endpoints r = 0 and r = r_max.
inline std::vector<double> g_derivative(const SpectralField& c) {
  const std::size_t n = c.size();
  const auto rho = c.grid->rho();
  std::vector<double> a(n + 2, 0.0), out(n + 2);
  for (std::size_t k = 0; k < n; ++k) a[k + 1] = rho[k] * c.coeffs[k];
  detail::r2r(detail::R2RKind::dct1, a, out);
  for (double& x : out) x *= 0.5;
  return out;
}

// Radial derivative u_r(r_j) = (g' - g/r) / r at the interior grid points.
inline std::vector<double> radial_gradient(const SpectralField& c) {
  const auto dg = g_derivative(c);
  const RadialField u = to_physical(c);
  const auto r = c.grid->radii();
  std::vector<double> ur(c.size());
  for (std::size_t j = 0; j < ur.size(); ++j) ur[j] = (dg[j + 1] - u.values[j]) / r[j];
  return ur;
}

inline std::vector<double> radial_gradient(const RadialField& f) {
  return radial_gradient(to_spectral(f));
}

// Evaluates u(r) = g(r)/r from the sine series at an arbitrary r in (0, r_max].
inline double evaluate(const SpectralField& c, double r) {
  if (!(r > 0.0)) throw InvalidArgument("evaluate: r must be positive");
  const auto rho = c.grid->rho();
  double g = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) g += c.coeffs[k] * std::sin(rho[k] * r);
  return g / r;
}

// u(0) by quadratic extrapolation from the first three samples (r = dr, 2dr, 3dr).
inline double value_at_origin(const RadialField& f) {
  return 3.0 * f.values[0] - 3.0 * f.values[1] + f.values[2];
}

// ---------------------------------------------------------------------------
// Quadrature

// Trapezoid of integral_0^R H(r) dr for H sampled at r = j dr, j = 0..n+1
// (both endpoints included). A partial last cell uses linear interpolation.
inline double trapezoid_with_endpoints(std::span<const double> H, double dr, double R) {
  const std::size_t last = H.size() - 1;  // index of r_max
  if (R <= 0.0) return 0.0;
  const double x = R / dr;
  if (x >= static_cast<double>(last)) {
    double s = 0.5 * (H.front() + H.back());
    for (std::size_t j = 1; j < last; ++j) s += H[j];
    return s * dr;
  }
  const auto m = std::min(static_cast<std::size_t>(std::floor(x)), last - 1);  // x < last already
  double s = 0.0;
  if (m > 0) {
    s = 0.5 * (H[0] + H[m]);
    for (std::size_t j = 1; j < m; ++j) s += H[j];
    s *= dr;
  }
  const double frac = x - static_cast<double>(m);
  if (frac > 0.0) {
    const double a = H[m], b = H[m + 1];
    s += 0.5 * (a + (a + frac * (b - a))) * frac * dr;
  }
  return s;
}

// Same, for h sampled at the interior points r_j, j = 1..n, with h(0) = 0 and
// h(r_max) = h_end.
inline double radial_trapezoid(std::span<const double> h, double dr, double R, double h_end = 0.0) {
  std::vector<double> H(h.size() + 2);
  H.front() = 0.0;
  std::copy(h.begin(), h.end(), H.begin() + 1);
  H.back() = h_end;
  return trapezoid_with_endpoints(H, dr, R);
}

// 4 pi integral_0^R w(r) r^2 dr for w sampled on the grid.
inline double ball_integral(const GridPtr& grid, std::span<const double> w, double R) {
  const auto r = grid->radii();
  std::vector<double> h(w.size());
  for (std::size_t j = 0; j < h.size(); ++j) h[j] = w[j] * r[j] * r[j];
  return kFourPi * radial_trapezoid(h, grid->dr(), R);
}

// 4 pi integral_0^{r_max} f h r^2 dr by the trapezoid rule with g(0) = g(r_max) = 0.
inline double l2_pairing(const RadialField& f, const RadialField& h) {
  require_same_grid(f.grid, h.grid, "l2_pairing");
  const auto r = f.grid->radii();
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f.values[j] * h.values[j] * r[j] * r[j];
  return kFourPi * f.grid->dr() * s;
}

// Same pairing computed on sine coefficients.
inline double spectral_pairing(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid, b.grid, "spectral_pairing");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.coeffs[k] * b.coeffs[k];
  return a.grid->plancherel_weight() * s;
}

// Largest r_j with |g(r_j)| above rel_tol * max|g|; 0 for the zero field.
inline double effective_support_radius(const RadialField& f, double rel_tol = 1e-14) {
  const auto g = g_samples(f);
  double gmax = 0.0;
  for (double x : g) gmax = std::max(gmax, std::abs(x));
  if (gmax == 0.0) return 0.0;
  const auto r = f.grid->radii();
  for (std::size_t j = g.size(); j-- > 0;)
    if (std::abs(g[j]) > rel_tol * gmax) return r[j];
  return 0.0;
}

// ---------------------------------------------------------------------------
// Profiles

enum class ProfileKind { zero, gaussian, annulus_bump, eigenmode, random_bandlimited, wave_packet, rough_tail };

inline std::string to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::zero: return "zero";
    case ProfileKind::gaussian: return "gaussian";
    case ProfileKind::annulus_bump: return "annulus_bump";
    case ProfileKind::eigenmode: return "eigenmode";
    case ProfileKind::random_bandlimited: return "random_bandlimited";
    case ProfileKind::wave_packet: return "wave_packet";
    case ProfileKind::rough_tail: return "rough_tail";
  }
  return "?";
}

inline ProfileKind parse_profile_kind(const std::string& s) {
  for (auto k : {ProfileKind::zero, ProfileKind::gaussian, ProfileKind::annulus_bump,
                 ProfileKind::eigenmode, ProfileKind::random_bandlimited, ProfileKind::wave_packet,
                 ProfileKind::rough_tail})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown profile kind '" + s + "'");
}

// Parameters of every profile kind; each kind reads only its own fields.
struct ProfileParams {
  ProfileKind kind = ProfileKind::gaussian;
  double amplitude = 1.0;
  // gaussian: a exp(-(r/width)^2)
  double width = 1.0;
  // annulus_bump: smooth bump supported on [inner, inner + thickness]
  double inner = 8.0;
  double thickness = 2.0;
  // eigenmode: a sin(rho_k r)/r
  std::size_t mode = 1;
  // random_bandlimited: i.i.d. uniform[-a, a] coefficients on rho in [band_lo, band_hi]
  // wave_packet: a exp(-((rho - center)/sigma)^2 / 2) on rho in [band_lo, band_hi]
  double band_lo = 1.0;
  double band_hi = 4.0;
  double center = 1.0;
  double sigma = 0.3;
  std::uint64_t seed = 0;
  // rough_tail: a rho^(-s - 1/2 - eps) with random signs on [cutoff, cap], then
  // multiplied by a smooth window equal to 1 on r <= window/2, 0 on r >= window
  double s = 0.75;
  double eps = 0.05;
  double cutoff = 1.0;
  double cap = 1e300;
  double window = 8.0;
};

namespace detail {

inline RadialField from_coeffs(const GridPtr& grid, std::vector<double> c) {
  return to_physical(SpectralField(grid, std::move(c)));
}

}  // namespace detail

inline RadialField sample_profile(const ProfileParams& p, const GridPtr& grid) {
  const auto r = grid->radii();
  const auto rho = grid->rho();
  const std::size_t n = grid->n_modes();
  RadialField out(grid);
  switch (p.kind) {
    case ProfileKind::zero:
      return out;
    case ProfileKind::gaussian: {
      if (!(p.width > 0.0)) throw InvalidArgument("gaussian: width must be positive");
      for (std::size_t j = 0; j < n; ++j) {
        const double x = r[j] / p.width;
        out.values[j] = p.amplitude * std::exp(-x * x);
      }
      return out;
    }
    case ProfileKind::annulus_bump: {
      if (!(p.inner >= 0.0) || !(p.thickness > 0.0))
        throw InvalidArgument("annulus_bump: need inner >= 0 and thickness > 0");
      if (p.inner + p.thickness > grid->r_max())
        throw InvalidArgument("annulus_bump: annulus exceeds r_max");
      const double mid = p.inner + 0.5 * p.thickness;
      const double half = 0.5 * p.thickness;
      for (std::size_t j = 0; j < n; ++j)
        out.values[j] = p.amplitude * smooth_bump((r[j] - mid) / half);
      return out;
    }
    case ProfileKind::eigenmode: {
      if (p.mode < 1 || p.mode > n) throw InvalidArgument("eigenmode: mode index outside 1..n");
      const double k = rho[p.mode - 1];
      for (std::size_t j = 0; j < n; ++j) out.values[j] = p.amplitude * std::sin(k * r[j]) / r[j];
      return out;
    }
    case ProfileKind::random_bandlimited:
    case ProfileKind::wave_packet: {
      if (!(p.band_lo <= p.band_hi) || p.band_hi < grid->rho_min() || p.band_lo > grid->rho_max())
        throw InvalidArgument("band [band_lo, band_hi] does not intersect the grid spectrum");
      std::vector<double> c(n, 0.0);
      if (p.kind == ProfileKind::random_bandlimited) {
        std::mt19937_64 rng(p.seed);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (std::size_t k = 0; k < n; ++k)
          if (rho[k] >= p.band_lo && rho[k] <= p.band_hi) c[k] = p.amplitude * uni(rng);
      } else {
        if (!(p.sigma > 0.0)) throw InvalidArgument("wave_packet: sigma must be positive");
        for (std::size_t k = 0; k < n; ++k)
          if (rho[k] >= p.band_lo && rho[k] <= p.band_hi) {
            const double x = (rho[k] - p.center) / p.sigma;
            c[k] = p.amplitude * std::exp(-0.5 * x * x);
          }
      }
      return detail::from_coeffs(grid, std::move(c));
    }
    case ProfileKind::rough_tail: {
      if (!(p.cutoff > 0.0) || !(p.window > 0.0) || p.window > grid->r_max())
        throw InvalidArgument("rough_tail: need cutoff > 0 and 0 < window <= r_max");
      std::vector<double> c(n, 0.0);
      std::mt19937_64 rng(p.seed);
      std::bernoulli_distribution coin(0.5);
      const double power = -p.s - 0.5 - p.eps;
      for (std::size_t k = 0; k < n; ++k) {
        if (rho[k] > p.cap) break;
        const bool positive = coin(rng);  // drawn for every mode so sign k is grid independent
        if (rho[k] < p.cutoff) continue;
        c[k] = (positive ? 1.0 : -1.0) * p.amplitude * std::pow(rho[k], power);
      }
      RadialField f = detail::from_coeffs(grid, std::move(c));
      const double half = 0.5 * p.window;
      for (std::size_t j = 0; j < n; ++j) f.values[j] *= smooth_step(r[j] / half);
      return f;
    }
  }
  return out;
}

}  // namespace nlwave
