#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nlwave/config.hpp"
#include "nlwave/experiments.hpp"
#include "nlwave/report.hpp"

using namespace nlwave;

namespace {

constexpr double kPi = std::numbers::pi;

ExperimentConfig small_config(Scenario sc) {
  ExperimentConfig c;
  c.scenario = sc;
  c.r_max = 32.0;
  c.n_modes = 1024;
  c.N_list = {4.0, 8.0};
  c.M_list = {4.0, 8.0};
  c.t_final = 1.0;
  c.dt = 2e-3;
  c.snapshot_stride = 10;
  return c;
}

// Composite Simpson on [a, b] with m (even) panels.
template <class F>
double simpson(F f, double a, double b, std::size_t m) {
  const double h = (b - a) / static_cast<double>(m);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < m; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return acc * h / 3.0;
}

}  // namespace

TEST(Helpers, ParallelMapKeepsIndexOrder) {
  for (unsigned threads : {1u, 2u, 7u}) {
    const auto v = parallel_map(100, threads, [](std::size_t i) { return i * i; });
    ASSERT_EQ(v.size(), 100u);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], i * i);
  }
  EXPECT_TRUE(parallel_map(0, 4, [](std::size_t i) { return i; }).empty());
}

TEST(Helpers, ParallelMapRethrowsLowestIndexError) {
  try {
    parallel_map(50, 4, [](std::size_t i) -> int {
      if (i == 13 || i == 40) throw std::runtime_error("case " + std::to_string(i));
      return 0;
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "case 13");
  }
}

TEST(Helpers, FitLineExactAndQuantile) {
  const Fit f = fit_line("f", {0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
  EXPECT_DOUBLE_EQ(f.slope, 2.0);
  EXPECT_DOUBLE_EQ(f.intercept, 1.0);
  EXPECT_NEAR(f.stderr_slope, 0.0, 1e-15);
  const Fit g = fit_loglog("g", {2.0, 4.0, 8.0}, {8.0, 64.0, 512.0});
  EXPECT_NEAR(g.slope, 3.0, 1e-14);
  EXPECT_THROW(fit_line("h", {1.0}, {1.0}), InvalidArgument);
  EXPECT_DOUBLE_EQ(quantile({3.0, 1.0, 2.0, 4.0}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({3.0, 1.0, 2.0}, 1.0), 3.0);
}

TEST(Report, CheckRowCarriesBoundsAndRejectsNaN) {
  ExperimentReport r;
  r.add_check("a", "inv", 1.0, 0.0, 1.0);
  r.add_check("b", "inv", std::nan(""), -kInf, kInf);
  EXPECT_TRUE(r.checks[0].passed);
  EXPECT_FALSE(r.checks[1].passed);
  EXPECT_EQ(r.checks[0].hi, 1.0);
  EXPECT_FALSE(r.all_passed());
  EXPECT_EQ(r.find_check("b")->invariant, "inv");
  EXPECT_EQ(r.find_check("c"), nullptr);
}

TEST(Validate, ConfigConstraints) {
  auto c = small_config(Scenario::gwp_growth);
  c.N_list = {30.0};  // rho_max/4 = 1024 pi / 128 ~ 25.1
  EXPECT_THROW(validate_experiment(c), ConfigError);
  c = small_config(Scenario::gwp_growth);
  c.n_modes = 4;
  EXPECT_THROW(validate_experiment(c), ConfigError);
  c = small_config(Scenario::huygens);
  c.huygens_T = 1.0;
  c.huygens_R = 2.0;
  EXPECT_THROW(run_huygens(c), ConfigError);
  c = small_config(Scenario::strichartz_ratio);
  c.ensemble = 99;
  EXPECT_THROW(run_strichartz_ratio(c), ConfigError);
  c = small_config(Scenario::bilinear_sweep);
  c.M_list = {16.0};
  EXPECT_THROW(run_bilinear_sweep(c), ConfigError);
}

TEST(ZeroCases, ReportWithNoCasesIsAnError) {
  auto c = small_config(Scenario::scaling);
  c.lambda_list = {};
  EXPECT_THROW(run_scaling(c), Error);
  c = small_config(Scenario::gwp_growth);
  c.N_list = {};
  EXPECT_THROW(run_gwp_growth(c), ConfigError);
}

TEST(GwpGrowth, ZeroDataHasZeroIncrements) {
  auto c = small_config(Scenario::gwp_growth);
  c.data.kind = ProfileKind::zero;
  c.checks = {"increment_zero", "energy_drift"};
  const auto rep = run_gwp_growth(c);
  EXPECT_EQ(rep.cases, 2u);
  EXPECT_TRUE(rep.all_passed());
  for (const auto& row : rep.tables.at(0).rows) EXPECT_EQ(row[3], 0.0);
  EXPECT_NE(rep.artifacts.count("time_series.csv"), 0u);
}

// exp(-(r/3)^2) has spectrum ~ exp(-9 rho^2 / 4), below 1e-15 past rho = 4, and
// its effective support (~17) leaves room for the flow. The cube stays far below
// N in amplitude, so the increment is what the flow pushes above N: negligible.
TEST(GwpGrowth, BandLimitedBelowNHasNegligibleIncrement) {
  auto c = small_config(Scenario::gwp_growth);
  c.data = ProfileParams{.kind = ProfileKind::gaussian, .amplitude = 0.1, .width = 3.0};
  c.data_ut = ProfileParams{.kind = ProfileKind::gaussian, .amplitude = 0.05, .width = 3.0};
  c.checks = {"increment_zero"};
  const auto rep = run_gwp_growth(c);
  ASSERT_EQ(rep.checks.size(), 2u);
  for (const auto& ch : rep.checks) EXPECT_TRUE(ch.passed) << format_check_line(ch);
}

TEST(GwpGrowth, DeterministicAcrossRunsAndThreads) {
  auto c = small_config(Scenario::gwp_growth);
  c.data = ProfileParams{.kind = ProfileKind::rough_tail, .amplitude = 0.5, .cutoff = 1.0, .window = 6.0};
  c.checks = {"increment_trend", "energy_drift"};
  c.threads = 1;
  const Config cfg = parse_config_text("");
  const std::string a = format_report(run_gwp_growth(c), cfg);
  c.threads = 4;
  const auto rep = run_gwp_growth(c);
  EXPECT_EQ(a, format_report(rep, cfg));
}

TEST(Scaling, LambdaOneIsIdentityAndNormsInvariant) {
  auto c = small_config(Scenario::scaling);
  c.data = ProfileParams{.kind = ProfileKind::gaussian, .amplitude = 1.0, .width = 1.0};
  c.data_ut = ProfileParams{.kind = ProfileKind::gaussian, .amplitude = 0.5, .width = 0.8};
  c.lambda_list = {1.0, 2.0};
  const auto rep = run_scaling(c);
  EXPECT_EQ(rep.find_check("equivariance[lambda=1]")->value, 0.0);
  EXPECT_TRUE(rep.find_check("critical_norm_u[lambda=2]")->passed);
  EXPECT_TRUE(rep.find_check("critical_norm_ut[lambda=2]")->passed);
  EXPECT_LE(rep.find_check("equivariance[lambda=2]")->value, 1e-4);
}

TEST(Huygens, PassesOnSmallGrid) {
  auto c = small_config(Scenario::huygens);
  c.huygens_T = 8.0;
  c.huygens_R = 2.0;
  const auto rep = run_huygens(c);
  EXPECT_TRUE(rep.all_passed());
  EXPECT_LE(rep.find_check("huygens_gap")->value, 1e-8);
  EXPECT_GE(rep.find_check("huygens_sanity")->value, 0.1);
  // t = 0 sample is exactly empty inside the ball
  EXPECT_EQ(rep.tables.at(0).rows.at(0)[1], 0.0);
}

TEST(Convergence, LinearRunSitsAtRoundingFloor) {
  auto c = small_config(Scenario::convergence);
  c.nonlinear = false;
  const auto rep = run_convergence(c);
  ASSERT_NE(rep.find_check("temporal_floor"), nullptr);
  EXPECT_TRUE(rep.all_passed());
}

TEST(Strichartz, SingleEigenmodeMatchesDirectQuadrature) {
  const auto grid = make_grid(32.0, 1024);
  const std::size_t k = 3;
  const double a = 0.8, T = 2.0;
  const double rho = static_cast<double>(k) * kPi / 32.0;
  ProfileParams p{.kind = ProfileKind::eigenmode, .amplitude = a, .mode = k};
  const State s0(sample_profile(p, grid), RadialField(grid));
  const auto got = strichartz_ratio(s0, T, 1e-3, Boundary::waive);
  // u = a cos(rho t) sin(rho r)/r; time and space factors separate
  const double time4 = 3.0 * T / 8.0 + std::sin(2.0 * rho * T) / (4.0 * rho) + std::sin(4.0 * rho * T) / (32.0 * rho);
  const double space4 = 4.0 * kPi * std::pow(a, 4) *
                        simpson([&](double r) { return r == 0.0 ? 0.0 : std::pow(std::sin(rho * r), 4) / (r * r); },
                                0.0, 32.0, 200000);
  const double h12 = std::sqrt(4.0 * kPi * 16.0 * rho) * a;
  EXPECT_NEAR(got.ratio / (std::pow(time4 * space4, 0.25) / h12), 1.0, 1e-6);
  EXPECT_FALSE(got.skipped);
}

TEST(Strichartz, ZeroSampleSkipped) {
  const auto grid = make_grid(32.0, 256);
  EXPECT_TRUE(strichartz_ratio(State::zero(grid), 1.0, 0.01).skipped);
}

TEST(Strichartz, EnsembleDeterministicAcrossThreads) {
  auto c = small_config(Scenario::strichartz_ratio);
  c.n_modes = 256;
  c.N_list = {4.0};
  c.ensemble = 100;
  c.seed = 17;
  c.threads = 1;
  const Config cfg = parse_config_text("");
  const std::string a = format_report(run_strichartz_ratio(c), cfg);
  c.threads = 3;
  EXPECT_EQ(a, format_report(run_strichartz_ratio(c), cfg));
  EXPECT_EQ(ensemble_member(make_grid(32.0, 256), 17, 5).u.values,
            ensemble_member(make_grid(32.0, 256), 17, 5).u.values);
}

TEST(Bilinear, ZeroTrajectoryHasZeroLhsAndRatio) {
  auto c = small_config(Scenario::bilinear_sweep);
  c.t_final = 2.0;
  c.N_list = {8.0};
  c.M_list = {4.0, 8.0};
  c.data.kind = ProfileKind::zero;
  const auto rep = run_bilinear_sweep(c);
  for (const auto& row : rep.tables.at(0).rows) {
    EXPECT_EQ(row[3], 0.0);
    EXPECT_EQ(row[9], 0.0);
  }
  EXPECT_TRUE(rep.all_passed());
}
