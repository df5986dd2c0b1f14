// nlwave: batch front end for the radial cubic wave experiments.
//
//   nlwave run         --config FILE [--out DIR] [--seed N] [--quiet]
//   nlwave huygens|scaling|convergence  (same flags; scenario forced)
//   nlwave sweep       strichartz_ratio and bilinear_sweep on one config
//   nlwave norms       norms and functionals of the configured trajectory
//   nlwave checkpoint-info FILE
//
// Exit status: 0 all checks passed, 1 a check failed or the run overflowed,
// 2 usage or configuration error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nlwave/config.hpp"
#include "nlwave/evolve.hpp"
#include "nlwave/experiments.hpp"
#include "nlwave/functionals.hpp"
#include "nlwave/io.hpp"
#include "nlwave/report.hpp"

namespace fs = std::filesystem;
using namespace nlwave;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  std::string checkpoint;
};

Config load(const Options& o) {
  Config cfg = parse_config(o.config);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.seed) {
    cfg.experiment.seed = *o.seed;
    validate_config(cfg);
  }
  cfg.experiment.config_hash = cfg.hash();
  return cfg;
}

Progress progress_for(const Options& o) {
  if (o.quiet) return {};
  return [](const std::string& msg) { std::cerr << "nlwave: " << msg << "\n"; };
}

void write_out(const Config& cfg, const std::string& name, const std::string& text) {
  fs::create_directories(cfg.out_dir);
  write_file_atomic(fs::path(cfg.out_dir) / name, text);
}

std::string checkpoint_meta(const Config& cfg, const State& s, const std::string& what) {
  std::string m = provenance_header("checkpoint metadata", cfg.hash(), cfg.experiment.seed);
  m += "# contents: " + what + "\n";
  m += "t = " + format_real(s.t) + "\n";
  return m;
}

// Runs one scenario and writes its report. Returns 0 or 1.
int run_scenario(Config cfg, Scenario scenario, const Options& o, const std::string& report_name) {
  cfg.experiment.scenario = scenario;
  const auto progress = progress_for(o);
  if (progress) progress(to_string(scenario) + ": config " + cfg.hash() + ", seed " + std::to_string(cfg.experiment.seed));
  ExperimentReport rep;
  rep.scenario = scenario;
  rep.seed = cfg.experiment.seed;
  std::string failure;
  try {
    rep = run_experiment(cfg.experiment, progress);
  } catch (const TrajectoryOverflow& e) {
    failure = std::string("overflow: ") + e.what() + " (last good t = " + format_real(e.last_good_state().t) + ")";
    write_out(cfg, "partial.ckpt", encode_checkpoint(e.last_good_state()));
    write_out(cfg, "partial.ckpt.meta", checkpoint_meta(cfg, e.last_good_state(), "last state before overflow"));
    const auto& snaps = e.partial().snapshots;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
      const std::string name = "partial_" + std::to_string(i) + ".ckpt";
      write_out(cfg, name, encode_checkpoint(snaps[i]));
    }
    failure += "; " + std::to_string(snaps.size()) + " snapshots checkpointed as partial_<i>.ckpt";
  } catch (const Overflow& e) {
    failure = std::string("overflow: ") + e.what();
  }
  for (const auto& [name, text] : rep.artifacts) write_out(cfg, name, text);
  write_out(cfg, report_name, format_report(rep, cfg, failure));
  const bool ok = failure.empty() && rep.all_passed();
  if (progress) {
    progress(to_string(scenario) + ": " + (ok ? "PASS" : "FAIL") + ", report " +
             (fs::path(cfg.out_dir) / report_name).string());
    if (!failure.empty()) progress(failure);
  }
  return ok ? 0 : 1;
}

int run_norms(const Config& cfg, const Options& o) {
  const auto progress = progress_for(o);
  const auto& e = cfg.experiment;
  const GridPtr grid = make_grid(e.r_max, e.n_modes);
  const State s0 = initial_state(e, grid);

  std::string out = provenance_header("norms", cfg.hash(), e.seed);
  out += "\n[table data]\n";
  out += "quantity,value\n";
  out += "energy," + format_real(energy(s0)) + "\n";
  out += "H^0.5(u0)," + format_real(sobolev_norm(s0.u, 0.5)) + "\n";
  out += "H^-0.5(u1)," + format_real(sobolev_norm(s0.ut, -0.5)) + "\n";
  for (double s : e.s_list) out += "H^" + format_real(s) + "(u0)," + format_real(sobolev_norm(s0.u, s)) + "\n";
  out += "\n[table modified_energy]\n";
  out += "N,s,E_Iu0\n";
  for (double s : e.s_list)
    for (double N : e.N_list)
      out += format_real(N) + "," + format_real(s) + "," + format_real(modified_energy(s0, N, s)) + "\n";

  std::string failure;
  if (e.t_final > 0.0) {
    EvolveParams ep;
    ep.dt = e.dt;
    ep.t_final = e.t_final;
    ep.snapshot_stride = e.snapshot_stride;
    ep.nonlinearity_on = e.nonlinear;
    ep.margin = e.margin;
    if (progress) progress("norms: evolving to t = " + format_real(e.t_final));
    try {
      const Trajectory tr = evolve(s0, ep).trajectory;
      out += "\n[table trajectory]\n";
      out += "M,N,s,T0,strichartz_l4,frac_strichartz_l4,long_time_S,biltime,blfreq,blspace\n";
      for (double s : e.s_list)
        for (double N : e.N_list)
          for (double M : e.M_list) {
            if (M > N) continue;
            const NormBundle b = norm_bundle(tr, M, N, s, e.t_final);
            out += format_real(M) + "," + format_real(N) + "," + format_real(s) + "," + format_real(e.t_final) + "," +
                   format_real(b.strichartz_l4) + "," + format_real(b.frac_strichartz_l4) + "," +
                   format_real(b.long_time_S);
            for (const auto& [k, v] : b.bilinear) out += "," + format_real(v);
            out += "\n";
          }
    } catch (const TrajectoryOverflow& ex) {
      failure = std::string("overflow: ") + ex.what();
      write_out(cfg, "partial.ckpt", encode_checkpoint(ex.last_good_state()));
      write_out(cfg, "partial.ckpt.meta", checkpoint_meta(cfg, ex.last_good_state(), "last state before overflow"));
    }
  }
  if (!failure.empty()) out += "\nfailure: " + failure + "\n";
  out += "\n[config]\n" + cfg.echo();
  write_out(cfg, "norms.txt", out);
  if (progress) progress("norms: wrote " + (fs::path(cfg.out_dir) / "norms.txt").string());
  return failure.empty() ? 0 : 1;
}

int checkpoint_info(const std::string& path) {
  const std::string bytes = read_file(path);
  const CheckpointHeader h = decode_checkpoint_header(bytes);
  const State s = decode_checkpoint(bytes);
  std::cout << "file: " << path << "\n"
            << "format_version: " << h.version << "\n"
            << "r_max: " << format_real(h.r_max) << "\n"
            << "n_modes: " << h.n_modes << "\n"
            << "t: " << format_real(h.t) << "\n"
            << "energy: " << format_real(energy(s)) << "\n"
            << "fnv1a64: " << hex64(fnv1a64(bytes)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial cubic wave experiments"};
  app.require_subcommand(1);
  Options o;

  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "configuration file")->required();
    sub->add_option("--out", o.out, "output directory (overrides [output] dir)");
    sub->add_option("--seed", o.seed, "random seed (overrides the config)");
    sub->add_flag("--quiet", o.quiet, "no progress on stderr");
  };
  auto* run = app.add_subcommand("run", "run the scenario named in the config");
  auto* sweep = app.add_subcommand("sweep", "Strichartz and bilinear ratio sweeps");
  auto* huygens = app.add_subcommand("huygens", "sharp Huygens test");
  auto* scaling = app.add_subcommand("scaling", "scaling symmetry test");
  auto* convergence = app.add_subcommand("convergence", "integrator convergence study");
  auto* norms = app.add_subcommand("norms", "norms and functionals of the configured data");
  for (auto* sub : {run, sweep, huygens, scaling, convergence, norms}) add_run_flags(sub);
  auto* info = app.add_subcommand("checkpoint-info", "print a checkpoint header");
  info->add_option("file", o.checkpoint, "checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "nlwave: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (info->parsed()) return checkpoint_info(o.checkpoint);
    const Config cfg = load(o);
    if (run->parsed()) return run_scenario(cfg, cfg.experiment.scenario, o, "report.txt");
    if (huygens->parsed()) return run_scenario(cfg, Scenario::huygens, o, "report.txt");
    if (scaling->parsed()) return run_scenario(cfg, Scenario::scaling, o, "report.txt");
    if (convergence->parsed()) return run_scenario(cfg, Scenario::convergence, o, "report.txt");
    if (norms->parsed()) return run_norms(cfg, o);
    if (sweep->parsed()) {
      const int a = run_scenario(cfg, Scenario::strichartz_ratio, o, "report_strichartz_ratio.txt");
      const int b = run_scenario(cfg, Scenario::bilinear_sweep, o, "report_bilinear_sweep.txt");
      return std::max(a, b);
    }
  } catch (const ConfigError& e) {
    std::cerr << "nlwave: config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "nlwave: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const DomainTooSmall& e) {
    std::cerr << "nlwave: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "nlwave: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "nlwave: error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
