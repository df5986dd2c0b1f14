#pragma once

// Radial Fourier-multiplier calculus on the sine basis: Littlewood-Paley
// pieces, |grad|^s, the I-operator and homogeneous Sobolev norms. Every
// multiplier is diagonal, so applying one is a pointwise scaling of ghat_k by
// symbol(rho_k).

#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nlwave/error.hpp"
#include "nlwave/radial_spectral.hpp"
#include "nlwave/smooth.hpp"

namespace nlwave {

// The Littlewood-Paley profile psi: radial, nonincreasing, 1 on [0, 1], 0 on
// [2, inf). See smooth_step for the transition formula.
struct CutoffProfile {
  static double psi(double x) { return smooth_step(x); }
};

class MultiplierSpec {
 public:
  enum class Kind { identity, lp_at, lp_leq, lp_gt, frac_deriv, i_op, product };

  static MultiplierSpec identity() { return MultiplierSpec(Kind::identity, 0.0, 0.0); }
  // psi(rho/N) - psi(2 rho/N), supported on (N/2, 2N).
  static MultiplierSpec lp_at(double N) { return MultiplierSpec(Kind::lp_at, check_freq(N), 0.0); }
  static MultiplierSpec lp_leq(double N) { return MultiplierSpec(Kind::lp_leq, check_freq(N), 0.0); }
  static MultiplierSpec lp_gt(double N) { return MultiplierSpec(Kind::lp_gt, check_freq(N), 0.0); }
  static MultiplierSpec frac_deriv(double s) {
    if (!std::isfinite(s)) throw InvalidArgument("frac_deriv: exponent must be finite");
    return MultiplierSpec(Kind::frac_deriv, 0.0, s);
  }
  // m(rho) = min(1, (N/rho)^{1-s}), 1/2 < s < 1.
  static MultiplierSpec i_op(double N, double s) {
    check_i_exponent(s);
    return MultiplierSpec(Kind::i_op, check_freq(N), s);
  }
  static MultiplierSpec product(std::vector<MultiplierSpec> factors) {
    MultiplierSpec p(Kind::product, 0.0, 0.0);
    for (auto& f : factors) {
      if (f.kind_ == Kind::product)
        p.factors_.insert(p.factors_.end(), f.factors_.begin(), f.factors_.end());
      else if (f.kind_ != Kind::identity)
        p.factors_.push_back(std::move(f));
    }
    return p;
  }

  Kind kind() const noexcept { return kind_; }
  double frequency() const noexcept { return N_; }
  double exponent() const noexcept { return s_; }

  double symbol(double rho) const {
    using P = CutoffProfile;
    switch (kind_) {
      case Kind::identity: return 1.0;
      case Kind::lp_at: return P::psi(rho / N_) - P::psi(2.0 * rho / N_);
      case Kind::lp_leq: return P::psi(rho / N_);
      case Kind::lp_gt: return 1.0 - P::psi(rho / N_);
      case Kind::frac_deriv: return s_ == 0.0 ? 1.0 : std::pow(rho, s_);
      case Kind::i_op: return rho <= N_ ? 1.0 : std::pow(N_ / rho, 1.0 - s_);
      case Kind::product: {
        double m = 1.0;
        for (const auto& f : factors_) m *= f.symbol(rho);
        return m;
      }
    }
    return 1.0;
  }

  std::vector<double> symbol_table(const RadialGrid& grid) const {
    const auto rho = grid.rho();
    std::vector<double> m(rho.size());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = symbol(rho[k]);
    return m;
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::identity: os << "1"; break;
      case Kind::lp_at: os << "P_" << N_; break;
      case Kind::lp_leq: os << "P_<=" << N_; break;
      case Kind::lp_gt: os << "P_>" << N_; break;
      case Kind::frac_deriv: os << "|grad|^" << s_; break;
      case Kind::i_op: os << "I(N=" << N_ << ",s=" << s_ << ")"; break;
      case Kind::product:
        if (factors_.empty()) os << "1";
        for (std::size_t i = 0; i < factors_.size(); ++i) os << (i ? " " : "") << factors_[i].describe();
        break;
    }
    return os.str();
  }

  static void check_i_exponent(double s) {
    if (!(s > 0.5 && s < 1.0))
      throw InvalidArgument("I-operator: exponent s must lie in (1/2, 1)");
  }

 private:
  MultiplierSpec(Kind k, double N, double s) : kind_(k), N_(N), s_(s) {}

  static double check_freq(double N) {
    if (!(N > 0.0) || !std::isfinite(N)) throw InvalidArgument("multiplier: frequency must be positive");
    return N;
  }

  Kind kind_;
  double N_;
  double s_;
  std::vector<MultiplierSpec> factors_;
};

inline MultiplierSpec operator*(MultiplierSpec a, MultiplierSpec b) {
  return MultiplierSpec::product({std::move(a), std::move(b)});
}

inline SpectralField apply_multiplier(SpectralField f, const MultiplierSpec& m) {
  if (m.kind() == MultiplierSpec::Kind::identity) return f;
  const auto rho = f.grid->rho();
  for (std::size_t k = 0; k < f.size(); ++k) f.coeffs[k] *= m.symbol(rho[k]);
  return f;
}

inline RadialField apply_multiplier(const RadialField& f, const MultiplierSpec& m) {
  if (m.kind() == MultiplierSpec::Kind::identity) return f;
  return to_physical(apply_multiplier(to_spectral(f), m));
}

template <class Field>
Field fractional_derivative(const Field& f, double s) {
  return apply_multiplier(f, MultiplierSpec::frac_deriv(s));
}

template <class Field>
Field i_operator(const Field& f, double N, double s) {
  MultiplierSpec::check_i_exponent(s);
  if (N < f.grid->rho_min())
    throw InvalidArgument("I-operator: N must be at least the lowest grid frequency");
  return apply_multiplier(f, MultiplierSpec::i_op(N, s));
}

inline double sobolev_norm(const SpectralField& c, double s) {
  const auto rho = c.grid->rho();
  double sum = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double w = s == 0.0 ? 1.0 : std::pow(rho[k], 2.0 * s);
    sum += w * c.coeffs[k] * c.coeffs[k];
  }
  return std::sqrt(c.grid->plancherel_weight() * sum);
}

inline double sobolev_norm(const RadialField& f, double s) { return sobolev_norm(to_spectral(f), s); }

// Fraction of ||f||_{H^s} carried by modes with rho <= 4 rho_1. Negative-order
// norms are sensitive to the domain truncation when this is large.
inline double low_mode_fraction(const SpectralField& c, double s) {
  const auto rho = c.grid->rho();
  const double limit = 4.0 * c.grid->rho_min();
  double lo = 0.0, all = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double e = std::pow(rho[k], 2.0 * s) * c.coeffs[k] * c.coeffs[k];
    all += e;
    if (rho[k] <= limit) lo += e;
  }
  return all > 0.0 ? std::sqrt(lo / all) : 0.0;
}

// Dyadic frequencies N0 * 2^j, j >= 1, up to the first one whose lp_leq covers
// the whole grid spectrum (2^j N0 >= rho_max).
inline std::vector<double> dyadic_frequencies_above(double N0, double rho_max) {
  std::vector<double> out;
  double N = N0;
  while (N < rho_max) {
    N *= 2.0;
    out.push_back(N);
  }
  return out;
}

}  // namespace nlwave
