#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlwave/radial_spectral.hpp"
#include "test_support.hpp"

using namespace nlwave;
using nlwave::testing::rel_linf;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(MakeGrid, FrequenciesAreMultiplesOfPiOverRmax) {
  auto grid = make_grid(kPi, 8);
  const auto rho = grid->rho();
  ASSERT_EQ(rho.size(), 8u);
  for (std::size_t k = 0; k < rho.size(); ++k) EXPECT_NEAR(rho[k], static_cast<double>(k + 1), 1e-14);
  EXPECT_EQ(grid->dr() * 9.0, grid->r_max());
}

TEST(MakeGrid, LargeGridLowestFrequency) {
  auto grid = make_grid(32.0, 4096);
  EXPECT_NEAR(grid->rho_min(), kPi / 32.0, 1e-16);
  EXPECT_NEAR(grid->rho_min(), 0.09817, 1e-5);
  EXPECT_NEAR(grid->rho_max(), 4096 * kPi / 32.0, 1e-12);
  EXPECT_EQ(grid->dr() * 4097.0, grid->r_max());
  const auto rho = grid->rho();
  for (std::size_t k = 1; k < rho.size(); ++k) ASSERT_LT(rho[k - 1], rho[k]);
}

TEST(MakeGrid, RejectsBadArguments) {
  EXPECT_THROW(make_grid(0.0, 64), InvalidArgument);
  EXPECT_THROW(make_grid(-1.0, 64), InvalidArgument);
  EXPECT_THROW(make_grid(10.0, 4), InvalidArgument);
  EXPECT_THROW(make_grid(std::nan(""), 64), InvalidArgument);
}

TEST(ToSpectral, EigenmodeIsUnitVector) {
  auto grid = make_grid(kPi, 16);
  ProfileParams p;
  p.kind = ProfileKind::eigenmode;
  p.mode = 2;
  const SpectralField c = to_spectral(sample_profile(p, grid));
  for (std::size_t k = 0; k < c.size(); ++k) EXPECT_NEAR(c.coeffs[k], k == 1 ? 1.0 : 0.0, 1e-14);
}

TEST(ToSpectral, ZeroMapsToZero) {
  auto grid = make_grid(10.0, 64);
  const SpectralField c = to_spectral(RadialField(grid));
  for (double x : c.coeffs) EXPECT_EQ(x, 0.0);
}

TEST(ToSpectral, GaussianRoundTrip) {
  auto grid = make_grid(32.0, 4096);
  ProfileParams p;
  p.kind = ProfileKind::gaussian;
  const RadialField u = sample_profile(p, grid);
  const RadialField back = to_physical(to_spectral(u));
  EXPECT_LE(rel_linf(back.values, u.values), 1e-12);
}

TEST(ToPhysical, SingleModeIsSinc) {
  auto grid = make_grid(kPi, 32);
  SpectralField c(grid);
  c.coeffs[0] = 1.0;
  const RadialField u = to_physical(c);
  const auto r = grid->radii();
  for (std::size_t j = 0; j < u.size(); ++j) EXPECT_NEAR(u.values[j], std::sin(r[j]) / r[j], 1e-14);
  const RadialField z = to_physical(SpectralField(grid));
  for (double x : z.values) EXPECT_EQ(x, 0.0);
}

TEST(ToPhysical, RandomCoefficientsRoundTrip) {
  auto grid = make_grid(20.0, 1024);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  SpectralField c(grid);
  for (double& x : c.coeffs) x = uni(rng);
  const SpectralField back = to_spectral(to_physical(c));
  EXPECT_LE(nlwave::testing::max_abs_diff(back.coeffs, c.coeffs), 1e-12);
}

TEST(L2Pairing, SmoothBallIndicatorMatchesClosedForm) {
  // f^2 = 1 / (1 + exp((r - 1)/eps)); the Sommerfeld expansion is exact for the
  // polynomial weight r^2: 4 pi int f^2 r^2 dr = 4 pi (1/3 + pi^2 eps^2 / 3)
  // up to terms of size exp(-1/eps).
  const double eps = 0.02;
  auto grid = make_grid(4.0, 1023);
  RadialField f(grid);
  const auto r = grid->radii();
  for (std::size_t j = 0; j < f.size(); ++j) f.values[j] = std::sqrt(1.0 / (1.0 + std::exp((r[j] - 1.0) / eps)));
  const double expected = 4.0 * kPi * (1.0 / 3.0 + kPi * kPi * eps * eps / 3.0);
  EXPECT_NEAR(l2_pairing(f, f), expected, 1e-6);
  EXPECT_NEAR(l2_pairing(f, f), 4.0 * kPi / 3.0, 0.02);  // the ball volume itself
}

TEST(L2Pairing, ZeroAndSingleMode) {
  auto grid = make_grid(kPi, 64);
  ProfileParams p;
  p.kind = ProfileKind::eigenmode;
  p.mode = 1;
  const RadialField e1 = sample_profile(p, grid);
  EXPECT_EQ(l2_pairing(RadialField(grid), e1), 0.0);
  EXPECT_NEAR(l2_pairing(e1, e1), 2.0 * kPi * kPi, 1e-10);
}

TEST(L2Pairing, GridMismatchThrows) {
  auto a = make_grid(10.0, 64);
  auto b = make_grid(10.0, 128);
  EXPECT_THROW(l2_pairing(RadialField(a), RadialField(b)), GridMismatch);
  // Equal-valued grids from separate make_grid calls are compatible.
  auto c = make_grid(10.0, 64);
  EXPECT_NO_THROW(l2_pairing(RadialField(a), RadialField(c)));
}

TEST(L2Pairing, PlancherelAndBilinearity) {
  auto grid = make_grid(16.0, 512);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const RadialField f = nlwave::testing::random_smooth_field(grid, rng, 20.0);
    const RadialField h = nlwave::testing::random_smooth_field(grid, rng, 20.0);
    const double ff = l2_pairing(f, f);
    EXPECT_LE(std::abs(ff - spectral_pairing(to_spectral(f), to_spectral(f))), 1e-8 * ff);
    const double fh = l2_pairing(f, h);
    EXPECT_NEAR(fh, spectral_pairing(to_spectral(f), to_spectral(h)), 1e-8 * ff);
    EXPECT_DOUBLE_EQ(fh, l2_pairing(h, f));
  }
}

TEST(L2Pairing, RefinementInvariantForSmoothProfile) {
  ProfileParams p;
  p.kind = ProfileKind::gaussian;
  p.width = 1.5;
  double prev = -1.0;
  for (std::size_t n : {512u, 1024u, 2048u, 4096u}) {
    auto grid = make_grid(20.0, n);
    const RadialField u = sample_profile(p, grid);
    const double v = l2_pairing(u, u);
    if (prev > 0.0) {
      EXPECT_LE(std::abs(v - prev), 1e-8 * v);
    }
    prev = v;
  }
  // Closed form: 4 pi int exp(-2 r^2/w^2) r^2 dr = pi^{3/2} w^3 / 2^{3/2}.
  EXPECT_NEAR(prev, std::pow(kPi, 1.5) * std::pow(1.5, 3) / std::pow(2.0, 1.5), 1e-10);
}

TEST(SampleProfile, Eigenmode) {
  auto grid = make_grid(kPi, 64);
  ProfileParams p;
  p.kind = ProfileKind::eigenmode;
  p.mode = 3;
  const RadialField u = sample_profile(p, grid);
  const auto r = grid->radii();
  for (std::size_t j = 0; j < u.size(); ++j) EXPECT_NEAR(u.values[j], std::sin(3.0 * r[j]) / r[j], 1e-13);
}

TEST(SampleProfile, AnnulusBumpSupport) {
  auto grid = make_grid(64.0, 4096);
  ProfileParams p;
  p.kind = ProfileKind::annulus_bump;
  p.inner = 8.0;
  p.thickness = 2.0;
  const RadialField u = sample_profile(p, grid);
  const auto r = grid->radii();
  double peak = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (r[j] < 8.0 || r[j] > 10.0) {
      EXPECT_EQ(u.values[j], 0.0) << "r = " << r[j];
    }
    peak = std::max(peak, u.values[j]);
  }
  EXPECT_NEAR(peak, 1.0, 1e-4);
  p.inner = 63.0;
  EXPECT_THROW(sample_profile(p, grid), InvalidArgument);
}

TEST(SampleProfile, RandomBandlimitedIsSeeded) {
  auto grid = make_grid(32.0, 512);
  ProfileParams p;
  p.kind = ProfileKind::random_bandlimited;
  p.seed = 7;
  p.band_lo = 1.0;
  p.band_hi = 4.0;
  const RadialField a = sample_profile(p, grid);
  const RadialField b = sample_profile(p, grid);
  EXPECT_EQ(a.values, b.values);
  const SpectralField c = to_spectral(a);
  const auto rho = grid->rho();
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (rho[k] < 1.0 || rho[k] > 4.0) {
      EXPECT_NEAR(c.coeffs[k], 0.0, 1e-14);
    }
  }
  p.seed = 8;
  EXPECT_NE(sample_profile(p, grid).values, a.values);
}

TEST(SampleProfile, RoughTailSignsIndependentOfResolution) {
  ProfileParams p;
  p.kind = ProfileKind::rough_tail;
  p.cutoff = 2.0;
  p.cap = 40.0;
  p.window = 10.0;
  p.seed = 5;
  auto coarse = make_grid(32.0, 1024);
  auto fine = make_grid(32.0, 2048);
  const RadialField a = sample_profile(p, coarse);
  const RadialField b = sample_profile(p, fine);
  // Same continuum function sampled twice: L^2 norms agree.
  EXPECT_NEAR(l2_pairing(a, a), l2_pairing(b, b), 1e-3 * l2_pairing(a, a));
  EXPECT_EQ(effective_support_radius(a) <= 10.0, true);
}

TEST(Derivative, EigenmodeDerivativeIncludingEndpoints) {
  auto grid = make_grid(kPi, 64);
  SpectralField c(grid);
  c.coeffs[2] = 1.0;  // g = sin(3r)
  const auto dg = g_derivative(c);
  ASSERT_EQ(dg.size(), 66u);
  for (std::size_t j = 0; j < dg.size(); ++j)
    EXPECT_NEAR(dg[j], 3.0 * std::cos(3.0 * static_cast<double>(j) * grid->dr()), 1e-12);
}

TEST(Derivative, GaussianGradient) {
  auto grid = make_grid(20.0, 2048);
  ProfileParams p;
  p.kind = ProfileKind::gaussian;
  const RadialField u = sample_profile(p, grid);
  const auto ur = radial_gradient(u);
  const auto r = grid->radii();
  for (std::size_t j = 0; j < ur.size(); ++j)
    EXPECT_NEAR(ur[j], -2.0 * r[j] * std::exp(-r[j] * r[j]), 1e-10);
  EXPECT_NEAR(value_at_origin(u), 1.0, 1e-5);
}

TEST(Quadrature, PartialCellsAreLinear) {
  // H(r) = r sampled on the grid: integral_0^R r dr = R^2/2 exactly.
  const double dr = 0.1;
  std::vector<double> H(12);
  for (std::size_t j = 0; j < H.size(); ++j) H[j] = static_cast<double>(j) * dr;
  for (double R : {0.05, 0.1, 0.37, 0.8, 1.1})
    EXPECT_NEAR(trapezoid_with_endpoints(H, dr, R), 0.5 * R * R, 1e-14) << R;
  EXPECT_NEAR(trapezoid_with_endpoints(H, dr, 5.0), 0.5 * 1.1 * 1.1, 1e-14);
}

TEST(Support, EffectiveSupportRadius) {
  auto grid = make_grid(32.0, 1024);
  EXPECT_EQ(effective_support_radius(RadialField(grid)), 0.0);
  ProfileParams p;
  p.kind = ProfileKind::annulus_bump;
  p.inner = 4.0;
  p.thickness = 3.0;
  EXPECT_LE(effective_support_radius(sample_profile(p, grid)), 7.0);
  EXPECT_GE(effective_support_radius(sample_profile(p, grid)), 6.5);
}
