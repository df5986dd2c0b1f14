#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "nlwave/config.hpp"
#include "nlwave/report.hpp"

using namespace nlwave;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(ParseConfig, MinimalFileGivesDefaults) {
  const Config c = parse_config_text("# nothing\n\n");
  EXPECT_EQ(c.experiment.dt, 1e-3);
  EXPECT_EQ(c.experiment.n_modes, 4096u);
  EXPECT_EQ(c.experiment.r_max, 64.0);
  EXPECT_EQ(c.experiment.scenario, Scenario::gwp_growth);
  EXPECT_EQ(c.experiment.N_list, (std::vector<double>{4.0, 8.0, 16.0, 32.0}));
  EXPECT_EQ(c.out_dir, "out");
}

TEST(ParseConfig, ReadsAllSections) {
  const Config c = parse_config_text(R"(
scenario = huygens   # trailing comment
seed = 12
[grid]
r_max = 32
n_modes = 1024
[time]
dt = 5e-4
t_final = 2
snapshot_stride = 10
margin = 0.5
nonlinear = false
[data]
profile = rough_tail
amplitude = 0.5
cutoff = 2
[data_ut]
profile = gaussian
width = 0.7
[study]
N_list = 2, 4
s_list = 0.6,0.9
M_list = 4
lambda_list = 1, 1.5
ensemble = 100
huygens_T = 6
huygens_R = 1
checks = huygens_gap
[output]
dir = results
verbosity = 2
threads = 3
)");
  const auto& e = c.experiment;
  EXPECT_EQ(e.scenario, Scenario::huygens);
  EXPECT_EQ(e.seed, 12u);
  EXPECT_EQ(e.r_max, 32.0);
  EXPECT_EQ(e.n_modes, 1024u);
  EXPECT_EQ(e.dt, 5e-4);
  EXPECT_FALSE(e.nonlinear);
  EXPECT_EQ(e.data.kind, ProfileKind::rough_tail);
  EXPECT_EQ(e.data.cutoff, 2.0);
  EXPECT_EQ(e.data_ut.kind, ProfileKind::gaussian);
  EXPECT_EQ(e.data_ut.width, 0.7);
  EXPECT_EQ(e.s_list, (std::vector<double>{0.6, 0.9}));
  EXPECT_EQ(e.lambda_list, (std::vector<double>{1.0, 1.5}));
  EXPECT_EQ(e.checks, (std::vector<std::string>{"huygens_gap"}));
  EXPECT_EQ(c.out_dir, "results");
  EXPECT_EQ(c.verbosity, 2);
  EXPECT_EQ(e.threads, 3u);
}

TEST(ParseConfig, UnknownKeyNamedWithLine) {
  const std::string msg = error_of("[grid]\nr_max = 64\ndx = 0.1\n");
  EXPECT_TRUE(contains(msg, "dx")) << msg;
  EXPECT_TRUE(contains(msg, "t.cfg:3")) << msg;
}

TEST(ParseConfig, KeyInWrongSectionIsUnknown) {
  EXPECT_TRUE(contains(error_of("[time]\nn_modes = 1024\n"), "unknown key 'n_modes'"));
  EXPECT_TRUE(contains(error_of("r_max = 64\n"), "unknown key 'r_max'"));
}

TEST(ParseConfig, SyntaxErrorsCarryLineNumbers) {
  EXPECT_TRUE(contains(error_of("\n\n[grid\n"), "t.cfg:3"));
  EXPECT_TRUE(contains(error_of("[grid]\nr_max 64\n"), "t.cfg:2"));
  EXPECT_TRUE(contains(error_of("[bogus]\n"), "unknown section"));
  EXPECT_TRUE(contains(error_of("[grid]\nr_max = abc\n"), "t.cfg:2"));
  EXPECT_TRUE(contains(error_of("[grid]\nr_max =\n"), "missing value"));
  EXPECT_TRUE(contains(error_of("[time]\nnonlinear = maybe\n"), "true or false"));
}

TEST(ParseConfig, DuplicateKeyRejected) {
  EXPECT_TRUE(contains(error_of("[grid]\nr_max = 64\nr_max = 32\n"), "duplicate key 'r_max'"));
}

TEST(ParseConfig, ConstraintViolationsNameTheField) {
  EXPECT_TRUE(contains(error_of("[grid]\nn_modes = 4\n"), "n_modes ≥ 8"));
  EXPECT_TRUE(contains(error_of("[time]\ndt = -1\n"), "dt"));
  EXPECT_TRUE(contains(error_of("[study]\ns_list = 0.4\n"), "s_list"));
  EXPECT_TRUE(contains(error_of("[data]\nprofile = square\n"), "profile"));
  EXPECT_TRUE(contains(error_of("scenario = nope\n"), "scenario"));
  // N above rho_max / 4
  EXPECT_TRUE(contains(error_of("[grid]\nn_modes = 64\n"), "N_list"));
}

TEST(ParseConfig, BoundarySafetyCheckedAtParseTime) {
  // Gaussian of width 1 has effective support near 6; 6 + 60 + 1 > 64
  const std::string msg = error_of("[time]\nt_final = 60\n");
  EXPECT_TRUE(contains(msg, "boundary safety")) << msg;
}

TEST(ParseConfig, MissingFile) { EXPECT_THROW(parse_config("/nonexistent/x.cfg"), ConfigError); }

TEST(ConfigEcho, ReparsesToSameEchoAndHash) {
  const Config a = parse_config_text("seed = 5\n[data]\nprofile = annulus_bump\ninner = 3\n[study]\nN_list = 3\n");
  const Config b = parse_config_text(a.echo());
  EXPECT_EQ(a.echo(), b.echo());
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_TRUE(contains(a.echo(), "dt = 0.001\n"));
  EXPECT_TRUE(contains(a.echo(), "checks =\n"));
  EXPECT_TRUE(contains(a.echo(), "[data]\nprofile = annulus_bump\n"));
}

TEST(ConfigHash, TracksResultsNotOutputLocation) {
  const Config a = parse_config_text("");
  const Config b = parse_config_text("[output]\ndir = elsewhere\nthreads = 7\n");
  const Config c = parse_config_text("seed = 1\n");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Report, CarriesProvenanceAndTolerances) {
  const Config cfg = parse_config_text("seed = 9\n");
  ExperimentReport rep;
  rep.seed = 9;
  rep.cases = 1;
  rep.add_check("alpha", "a must be small", 0.5, 0.0, 1.0);
  rep.add_check("beta", "b must be large", 0.5, 2.0, kInf);
  rep.tables.push_back({"tab", {"x", "y"}, {{1.0, 2.0}}});
  const std::string text = format_report(rep, cfg);
  EXPECT_TRUE(contains(text, "# format_version: 1\n"));
  EXPECT_TRUE(contains(text, "# config_hash: " + cfg.hash() + "\n"));
  EXPECT_TRUE(contains(text, "# seed: 9\n"));
  EXPECT_TRUE(contains(text, "PASS alpha = 0.5 in [0, 1]"));
  EXPECT_TRUE(contains(text, "FAIL beta = 0.5 in [2, inf]"));
  EXPECT_TRUE(contains(text, "status = FAIL (1/2 checks)"));
  EXPECT_TRUE(contains(text, "[table checks]\nname,value,lo,hi,passed\nalpha,0.5,0,1,1\nbeta,0.5,2,inf,0\n"));
  EXPECT_TRUE(contains(text, "[table tab]\nx,y\n1,2\n"));
  EXPECT_TRUE(contains(text, "[config]\n" + cfg.echo()));
}

TEST(Report, FailureReasonForcesFail) {
  const Config cfg = parse_config_text("");
  ExperimentReport rep;
  rep.add_check("ok", "fine", 0.0, 0.0, 1.0);
  const std::string text = format_report(rep, cfg, "overflow: boom");
  EXPECT_TRUE(contains(text, "failure: overflow: boom\n"));
  EXPECT_TRUE(contains(text, "status = FAIL"));
}
