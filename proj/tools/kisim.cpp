#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kisim/harness.hpp"

namespace {

// Shared run-configuration flags for correlations / fidelity / reproduce.
struct ConfigCli {
  std::string config_path;
  std::string out_dir;
  std::string preset;
  std::string observable;
  std::vector<int> sites;
  std::vector<double> delta_primes;
  int t_max = 0;
  int samples = 0;
  int threads = 0;
  std::uint64_t seed = 0;
  bool symmetrized = false;

  void attach(CLI::App* cmd) {
    auto* config_opt =
        cmd->add_option("--config", config_path, "JSON config file (or a manifest to replay)");
    cmd->add_option("--preset", preset, "parameter preset: a (h_z=0), b (0.4), c (1.4)")
        ->check(CLI::IsMember({"a", "b", "c"}))
        ->excludes(config_opt);
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("-L,--sites", sites, "chain lengths");
    cmd->add_option("--delta-prime", delta_primes, "scaled perturbation strengths");
    cmd->add_option("--t-max", t_max, "number of Floquet periods");
    cmd->add_option("--seed", seed, "base RNG seed");
    cmd->add_option("--samples", samples, "stochastic sample count");
    cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
    auto* exact = cmd->add_flag("--exact", "trace-exact averaging (every L <= 12)");
    cmd->add_flag("--stochastic", "sampled averaging (default)")->excludes(exact);
    cmd->add_flag("--symmetrized", symmetrized,
                  "split the perturbation as +delta/2 / -delta/2 between the two arms");
    cmd->add_option("--observable", observable, "observable token (default M_x)");
  }

  kisim::ExperimentConfig resolve(const CLI::App* cmd) const {
    kisim::ExperimentConfig config;
    if (cmd->count("--preset")) {
      config = kisim::preset_config(preset[0]);
    }
    if (cmd->count("--config")) {
      config = kisim::load_config_file(config_path);
    }
    if (cmd->count("--out")) {
      config.output_dir = out_dir;
    }
    if (cmd->count("--sites")) {
      config.L_values = sites;
    }
    if (cmd->count("--delta-prime")) {
      config.delta_primes = delta_primes;
    }
    if (cmd->count("--t-max")) {
      config.t_max = t_max;
    }
    if (cmd->count("--seed")) {
      config.averaging.seed = seed;
    }
    if (cmd->count("--samples")) {
      config.averaging.n_samples = samples;
    }
    if (cmd->count("--exact")) {
      config.averaging.mode = "exact";
    }
    if (cmd->count("--stochastic")) {
      config.averaging.mode = "stochastic";
    }
    if (cmd->count("--symmetrized")) {
      config.fidelity_mode = "symmetrized";
    }
    if (cmd->count("--observable")) {
      config.observable = observable;
    }
    return config;
  }

  void apply_threads(const CLI::App* cmd) const {
    if (cmd->count("--threads") && threads > 0) {
      setenv("KISIM_THREADS", std::to_string(threads).c_str(), 1);
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kicked Ising chain: correlation/fidelity simulator and decay theory"};
  app.set_version_flag("--version", kisim::kVersion);
  app.require_subcommand(1);

  ConfigCli corr_cli, fid_cli, repro_cli;
  CLI::App* corr = app.add_subcommand(
      "correlations", "infinite-temperature autocorrelation C_A(t) per site");
  corr_cli.attach(corr);
  CLI::App* fid = app.add_subcommand("fidelity", "fidelity |F(t)| under a kick perturbation");
  fid_cli.attach(fid);
  CLI::App* repro = app.add_subcommand("reproduce", "run a bundled figure preset");
  std::string figure;
  repro->add_option("figure", figure, "fig1 (correlations) or fig2 (fidelity)")->required();
  repro_cli.attach(repro);

  CLI::App* theory = app.add_subcommand("theory", "analytic decay predictions as JSON");
  kisim::TheoryRequest request;
  double s_a = 0.0, c_a = 0.0;
  std::string theory_out;
  theory->add_option("--j-z", request.params.j_z, "Ising coupling");
  theory->add_option("--h-x", request.params.h_x, "transverse kick field");
  theory->add_option("--h-z", request.params.h_z, "longitudinal kick field");
  theory->add_option("-L,--sites", request.L, "chain length");
  theory->add_option("--delta-prime", request.delta_prime, "scaled perturbation strength");
  theory->add_option("--S", s_a, "measured extensive correlation sum (enables tau_ergodic)");
  theory->add_option("--c", c_a, "plateau noise constant (enables delta_p)");
  theory->add_option("--out", theory_out, "also write theory.json here");

  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "compare gate evolution, C_M(t), F(t) against a dense-matrix reference");
  int oracle_L = 6, oracle_steps = 50;
  double oracle_delta = 0.01;
  kisim::KickedIsingParams oracle_params{1.0, 1.4, 0.4};
  std::string oracle_out;
  int oracle_threads = 0;
  oracle->add_option("-L,--sites", oracle_L, "chain length (<= 8)");
  oracle->add_option("--j-z", oracle_params.j_z, "Ising coupling");
  oracle->add_option("--h-x", oracle_params.h_x, "transverse kick field");
  oracle->add_option("--h-z", oracle_params.h_z, "longitudinal kick field");
  oracle->add_option("--delta", oracle_delta, "perturbation strength");
  oracle->add_option("--steps", oracle_steps, "Floquet periods to compare");
  oracle->add_option("--out", oracle_out, "also write oracle_report.json here");
  oracle->add_option("--threads", oracle_threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(corr)) {
      corr_cli.apply_threads(corr);
      return kisim::cmd_correlations(corr_cli.resolve(corr)).exit_code;
    }
    if (app.got_subcommand(fid)) {
      fid_cli.apply_threads(fid);
      return kisim::cmd_fidelity(fid_cli.resolve(fid)).exit_code;
    }
    if (app.got_subcommand(repro)) {
      repro_cli.apply_threads(repro);
      kisim::ExperimentConfig base = repro_cli.resolve(repro);
      if (repro->count("--out") == 0 && repro->count("--config") == 0) {
        base.output_dir = "out";
      }
      return kisim::cmd_reproduce(figure, base).exit_code;
    }
    if (app.got_subcommand(theory)) {
      if (theory->count("--S")) {
        request.s_a = s_a;
      }
      if (theory->count("--c")) {
        request.c_a = c_a;
      }
      return kisim::cmd_theory(request, theory_out).exit_code;
    }
    if (app.got_subcommand(oracle)) {
      if (oracle->count("--threads") && oracle_threads > 0) {
        setenv("KISIM_THREADS", std::to_string(oracle_threads).c_str(), 1);
      }
      return kisim::cmd_oracle_check(oracle_L, oracle_params, oracle_delta, oracle_steps,
                                     oracle_out)
          .exit_code;
    }
  } catch (const kisim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
