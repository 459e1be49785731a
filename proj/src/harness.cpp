#include "kisim/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <utility>

#include "kisim/dense.hpp"
#include "kisim/io.hpp"
#include "kisim/theory.hpp"

namespace fs = std::filesystem;

namespace kisim {

namespace {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string dp_tag(double delta_prime) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", delta_prime);
  return buf;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const nlohmann::json& config_snapshot, const nlohmann::json& run_seeds,
                    const nlohmann::json& wall_seconds, std::vector<std::string>& files) {
  nlohmann::json manifest{{"command", command},
                          {"version", kVersion},
                          {"factor_order", kFactorOrderTag},
                          {"config", config_snapshot},
                          {"run_seeds", run_seeds},
                          {"wall_seconds", wall_seconds}};
  nlohmann::json outputs = nlohmann::json::array();
  for (const std::string& file : files) {
    outputs.push_back({{"path", fs::path(file).filename().string()},
                       {"sha256", io::sha256_hex_file(file)}});
  }
  manifest["outputs"] = outputs;
  const std::string path = (fs::path(out_dir) / "manifest.json").string();
  io::write_text_file(path, manifest.dump(2) + "\n");
  files.push_back(path);
}

void reject_unknown_keys(const nlohmann::json& j, const char* prefix,
                         std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(std::string(prefix) + item.key() + ": unknown field");
    }
  }
}

// Stable seed labels so correlations and fidelity runs agree on shared series.
RngSeed correlation_seed(RngSeed base, int L) {
  return derive_stream_seed(base, 0x10000u + std::uint64_t(L));
}
RngSeed fidelity_seed(RngSeed base, int L, std::size_t dp_index) {
  return derive_stream_seed(base, 0x20000u + std::uint64_t(L) * 1024 + dp_index);
}

nlohmann::json fit_to_json(const FitResult& fit) {
  return nlohmann::json{{"regime_fit", regime_name(fit.regime_fit)},
                        {"tau_fit", fit.tau_fit},
                        {"rmse", fit.rmse},
                        {"tau_exp", fit.tau_exp},
                        {"rmse_exp", fit.rmse_exp},
                        {"tau_gauss", fit.tau_gauss},
                        {"rmse_gauss", fit.rmse_gauss},
                        {"n_points", fit.n_points},
                        {"window", {fit.window_low, fit.window_high}}};
}

}  // namespace

void to_json(nlohmann::json& j, const AveragingSpec& a) {
  j = nlohmann::json{{"mode", a.mode}, {"n_samples", a.n_samples}, {"seed", a.seed}};
}

void from_json(const nlohmann::json& j, AveragingSpec& a) {
  a.mode = j.value("mode", a.mode);
  a.n_samples = j.value("n_samples", a.n_samples);
  a.seed = j.value("seed", a.seed);
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"params", c.params},
                     {"L", c.L_values},
                     {"delta_prime", c.delta_primes},
                     {"t_max", c.t_max},
                     {"averaging", c.averaging},
                     {"observable", c.observable},
                     {"fidelity_mode", c.fidelity_mode},
                     {"output_dir", c.output_dir}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  if (j.contains("params")) {
    j.at("params").get_to(c.params);
  }
  c.L_values = j.value("L", c.L_values);
  c.delta_primes = j.value("delta_prime", c.delta_primes);
  c.t_max = j.value("t_max", c.t_max);
  if (j.contains("averaging")) {
    j.at("averaging").get_to(c.averaging);
  }
  c.observable = j.value("observable", c.observable);
  c.fidelity_mode = j.value("fidelity_mode", c.fidelity_mode);
  c.output_dir = j.value("output_dir", c.output_dir);
}

void validate_config(const ExperimentConfig& config) {
  if (config.L_values.empty()) {
    throw ConfigError("/L: at least one chain length is required");
  }
  for (std::size_t i = 0; i < config.L_values.size(); ++i) {
    const int L = config.L_values[i];
    if (L < 2) {
      throw ConfigError("/L/" + std::to_string(i) + ": chain length must be >= 2");
    }
    if (L > 26) {
      throw ConfigError("/L/" + std::to_string(i) + ": chain length above supported maximum 26");
    }
  }
  for (std::size_t i = 0; i < config.delta_primes.size(); ++i) {
    if (!std::isfinite(config.delta_primes[i])) {
      throw ConfigError("/delta_prime/" + std::to_string(i) + ": must be finite");
    }
  }
  if (config.t_max < 1) {
    throw ConfigError("/t_max: must be >= 1");
  }
  if (config.averaging.mode != "exact" && config.averaging.mode != "stochastic") {
    throw ConfigError("/averaging/mode: expected \"exact\" or \"stochastic\", got \"" +
                      config.averaging.mode + "\"");
  }
  if (config.averaging.mode == "exact") {
    for (int L : config.L_values) {
      if (L > kExactModeSiteCap) {
        throw ConfigError("/averaging/mode: exact mode requires every L <= " +
                          std::to_string(kExactModeSiteCap) + ", got L=" + std::to_string(L));
      }
    }
  } else if (config.averaging.n_samples < 1) {
    throw ConfigError("/averaging/n_samples: must be >= 1 in stochastic mode");
  }
  for (int L : config.L_values) {
    try {
      parse_observable(config.observable, L);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("/observable: ") + e.what());
    }
  }
  if (config.fidelity_mode != "plain" && config.fidelity_mode != "symmetrized") {
    throw ConfigError("/fidelity_mode: expected \"plain\" or \"symmetrized\", got \"" +
                      config.fidelity_mode + "\"");
  }
  if (config.output_dir.empty()) {
    throw ConfigError("/output_dir: must not be empty");
  }
}

ExperimentConfig parse_config_text(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(e.what());  // nlohmann reports line and column
  }
  if (j.contains("config") && j["config"].is_object()) {
    j = j["config"];  // accept a manifest and replay its embedded config
  }
  try {
    reject_unknown_keys(j, "/", {"params", "L", "delta_prime", "t_max", "averaging",
                                 "observable", "fidelity_mode", "output_dir"});
    if (j.contains("averaging")) {
      reject_unknown_keys(j["averaging"], "/averaging/", {"mode", "n_samples", "seed"});
    }
    if (j.contains("params")) {
      reject_unknown_keys(j["params"], "/params/", {"j_z", "h_x", "h_z"});
    }
    ExperimentConfig config = j.get<ExperimentConfig>();
    validate_config(config);
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::string text;
  try {
    text = io::read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return parse_config_text(text);
}

ExperimentConfig preset_config(char which) {
  ExperimentConfig config;
  config.params.j_z = 1.0;
  config.params.h_x = 1.4;
  switch (which) {
    case 'a':
      config.params.h_z = 0.0;
      break;
    case 'b':
      config.params.h_z = 0.4;
      break;
    case 'c':
      config.params.h_z = 1.4;
      break;
    default:
      throw ConfigError("/preset: expected 'a', 'b', or 'c'");
  }
  return config;
}

TraceAverageSpec averaging_to_trace_spec(const AveragingSpec& avg, int n_sites) {
  TraceAverageSpec spec;
  if (avg.mode == "exact") {
    if (n_sites > kExactModeSiteCap) {
      throw ConfigError("/averaging/mode: exact mode requires L <= " +
                        std::to_string(kExactModeSiteCap));
    }
    spec.mode = TraceAverageSpec::Mode::exact_basis_sum;
  } else {
    spec.mode = TraceAverageSpec::Mode::stochastic;
  }
  spec.n_samples = avg.n_samples;
  spec.seed = avg.seed;
  spec.exact_cap = kExactModeSiteCap;
  return spec;
}

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::ergodic:
      return "ergodic";
    case Regime::non_ergodic:
      return "non_ergodic";
    default:
      return "unresolved";
  }
}

nlohmann::json stats_to_json(const SeriesStats& stats) {
  nlohmann::json j{{"S_A", stats.S_A},
                   {"D_A", stats.D_A},
                   {"D_stderr", stats.D_stderr},
                   {"regime", regime_name(stats.regime)},
                   {"s_divergent", stats.s_divergent},
                   {"low_confidence", stats.low_confidence}};
  j["t_mix"] = stats.t_mix_defined ? nlohmann::json(stats.t_mix) : nlohmann::json();
  j["t_ave"] = stats.t_ave_defined ? nlohmann::json(stats.t_ave) : nlohmann::json();
  return j;
}

CommandResult cmd_correlations(const ExperimentConfig& config) {
  validate_config(config);
  fs::create_directories(config.output_dir);
  CommandResult result;
  nlohmann::json seeds = nlohmann::json::object();
  nlohmann::json walls = nlohmann::json::object();
  Timer total;
  for (int L : config.L_values) {
    Timer timer;
    TraceAverageSpec avg = averaging_to_trace_spec(config.averaging, L);
    avg.seed = correlation_seed(config.averaging.seed, L);
    const ObservableSpec obs = parse_observable(config.observable, L);
    const TimeSeries series = correlation_series(config.params, obs, config.t_max, avg);
    const std::string label = "corr_L" + std::to_string(L);
    const std::string csv = (fs::path(config.output_dir) / (label + ".csv")).string();
    io::write_timeseries_csv(csv, series);
    result.files.push_back(csv);

    const SeriesStats stats = estimate_statistics(series);
    nlohmann::json sj = stats_to_json(stats);
    sj["L"] = L;
    sj["observable"] = config.observable;
    sj["values_per_site"] = series.meta.values_per_site;
    if (series.meta.values_per_site) {
      sj["S_A_extensive"] = stats.S_A * L;
      sj["D_A_extensive"] = stats.D_A * L;
    }
    if (config.params.h_z == 0.0) {
      try {
        const double d = d_sigma_x(config.params.j_z, config.params.h_x);
        sj["theory"] = {{"d_sigma_x", d}, {"D_A_extensive", d * L}};
      } catch (const std::domain_error&) {
        sj["theory"] = nullptr;
      }
    }
    const std::string stats_path =
        (fs::path(config.output_dir) / (label + "_stats.json")).string();
    io::write_text_file(stats_path, sj.dump(2) + "\n");
    result.files.push_back(stats_path);

    if (stats.regime == Regime::unresolved) {
      result.exit_code = 3;
    }
    seeds[label] = avg.seed;
    walls[label] = timer.seconds();
    std::cout << label << ": regime=" << regime_name(stats.regime) << " D_A=" << stats.D_A
              << " S_A=" << stats.S_A << "\n";
  }
  walls["total"] = total.seconds();
  write_manifest(config.output_dir, "correlations", config, seeds, walls, result.files);
  return result;
}

CommandResult cmd_fidelity(const ExperimentConfig& config) {
  validate_config(config);
  fs::create_directories(config.output_dir);
  CommandResult result;
  nlohmann::json seeds = nlohmann::json::object();
  nlohmann::json walls = nlohmann::json::object();
  Timer total;
  const bool symmetrized = config.fidelity_mode == "symmetrized";
  for (int L : config.L_values) {
    // A correlation run at the same L supplies the decay-scale estimates the
    // theory curves need; it shares the seed label with cmd_correlations.
    TraceAverageSpec corr_avg = averaging_to_trace_spec(config.averaging, L);
    corr_avg.seed = correlation_seed(config.averaging.seed, L);
    const ObservableSpec obs = parse_observable(config.observable, L);
    Timer corr_timer;
    const TimeSeries corr = correlation_series(config.params, obs, config.t_max, corr_avg);
    const SeriesStats stats = estimate_statistics(corr);
    seeds["corr_L" + std::to_string(L)] = corr_avg.seed;
    walls["corr_L" + std::to_string(L)] = corr_timer.seconds();
    const double scale = corr.meta.values_per_site ? double(L) : 1.0;

    for (std::size_t k = 0; k < config.delta_primes.size(); ++k) {
      Timer timer;
      const double dp = config.delta_primes[k];
      const double delta = delta_from_prime(dp, L);
      TraceAverageSpec avg = averaging_to_trace_spec(config.averaging, L);
      avg.seed = fidelity_seed(config.averaging.seed, L, k);
      const TimeSeries fid =
          fidelity_series(config.params, L, delta, config.t_max, avg, symmetrized);
      const std::string label = "fidelity_L" + std::to_string(L) + "_dp" + dp_tag(dp);
      const std::string csv = (fs::path(config.output_dir) / (label + ".csv")).string();
      io::write_timeseries_csv(csv, fid);
      result.files.push_back(csv);

      nlohmann::json fj{{"L", L},
                        {"delta_prime", dp},
                        {"delta", delta},
                        {"fidelity_mode", config.fidelity_mode}};
      try {
        fj["fit"] = fit_to_json(fit_decay(fid, L));
      } catch (const InsufficientDataError& e) {
        fj["fit"] = nullptr;
        fj["fit_note"] = e.what();
      }
      nlohmann::json sj = stats_to_json(stats);
      if (corr.meta.values_per_site) {
        sj["S_A_extensive"] = stats.S_A * L;
        sj["D_A_extensive"] = stats.D_A * L;
      }
      fj["correlation_stats"] = sj;
      if (stats.regime != Regime::unresolved) {
        try {
          const double scale_value =
              (stats.regime == Regime::ergodic ? stats.S_A : stats.D_A) * scale;
          const DecayPrediction pred =
              predict_decay(stats.regime, scale_value, delta, L);
          fj["theory"] = {{"regime", regime_name(pred.regime)},
                          {"tau", pred.tau},
                          {"t_star", pred.t_star},
                          {"plateau", pred.plateau}};
        } catch (const std::exception& e) {
          fj["theory"] = nullptr;
          fj["theory_note"] = e.what();
        }
      } else {
        fj["theory"] = nullptr;
        result.exit_code = 3;
      }
      if (config.params.h_z == 0.0) {
        try {
          const double d = d_sigma_x(config.params.j_z, config.params.h_x);
          nlohmann::json tj{{"d_sigma_x", d}};
          if (delta != 0.0) {
            const double tau = tau_nonergodic(d * L, delta);
            const Saturation sat = saturation(Regime::non_ergodic, tau, L);
            tj["tau"] = tau;
            tj["t_star"] = sat.t_star;
            tj["plateau"] = sat.plateau;
          }
          fj["theory_integrable"] = tj;
        } catch (const std::domain_error&) {
          fj["theory_integrable"] = nullptr;
        }
      }
      const std::string fit_path =
          (fs::path(config.output_dir) / (label + "_fit.json")).string();
      io::write_text_file(fit_path, fj.dump(2) + "\n");
      result.files.push_back(fit_path);
      seeds[label] = avg.seed;
      walls[label] = timer.seconds();
      std::cout << label << ": regime=" << regime_name(stats.regime)
                << (fj["fit"].is_null() ? " fit=none" : " fit=" +
                        fj["fit"]["regime_fit"].get<std::string>())
                << "\n";
    }
  }
  walls["total"] = total.seconds();
  write_manifest(config.output_dir, "fidelity", config, seeds, walls, result.files);
  return result;
}

nlohmann::json theory_report(const TheoryRequest& request) {
  nlohmann::json out{{"params", request.params},
                     {"L", request.L},
                     {"delta_prime", request.delta_prime}};
  const double delta =
      delta_from_prime(request.delta_prime, request.L);
  out["delta"] = delta;
  const double d = d_sigma_x(request.params.j_z, request.params.h_x);
  out["d_sigma_x"] = d;
  out["D_A_extensive"] = d * request.L;
  if (delta != 0.0) {
    const double tau_ne = tau_nonergodic(d * request.L, delta);
    const Saturation sat_ne =
        saturation(Regime::non_ergodic, tau_ne, request.L);
    out["tau_nonergodic"] = tau_ne;
    out["t_star_nonergodic"] = sat_ne.t_star;
    out["plateau"] = sat_ne.plateau;
  } else {
    out["plateau"] = std::pow(2.0, -0.5 * request.L);
  }
  if (request.s_a) {
    if (delta != 0.0) {
      const double tau_e = tau_ergodic(*request.s_a, delta);
      const Saturation sat_e = saturation(Regime::ergodic, tau_e, request.L);
      out["tau_ergodic"] = tau_e;
      out["t_star_ergodic"] = sat_e.t_star;
    }
    if (request.c_a) {
      out["delta_p"] = perturbative_threshold(*request.s_a, *request.c_a, request.L);
    }
  }
  const FieldMap map =
      perturbed_field_map(request.params.h_x, request.params.h_z, delta);
  out["field_map"] = {{"h_x", map.h_x}, {"h_z", map.h_z}};
  return out;
}

CommandResult cmd_theory(const TheoryRequest& request, const std::string& out_dir) {
  const nlohmann::json report = theory_report(request);
  std::cout << report.dump(2) << "\n";
  CommandResult result;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / "theory.json").string();
    io::write_text_file(path, report.dump(2) + "\n");
    result.files.push_back(path);
    nlohmann::json snapshot{{"params", request.params},
                            {"L", request.L},
                            {"delta_prime", request.delta_prime}};
    if (request.s_a) {
      snapshot["S_A"] = *request.s_a;
    }
    if (request.c_a) {
      snapshot["c_A"] = *request.c_a;
    }
    write_manifest(out_dir, "theory", snapshot, nlohmann::json::object(),
                   nlohmann::json::object(), result.files);
  }
  return result;
}

CommandResult cmd_oracle_check(int n_sites, const KickedIsingParams& params, double delta,
                               int t_steps, const std::string& out_dir) {
  dense::OracleReport report;
  try {
    report = dense::oracle_check(n_sites, params, delta, t_steps);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  constexpr double kThreshold = 1e-10;
  const bool pass = report.worst() <= kThreshold;
  nlohmann::json j{{"L", n_sites},
                   {"params", params},
                   {"delta", delta},
                   {"t_steps", t_steps},
                   {"dev_state", report.dev_state},
                   {"dev_correlation", report.dev_correlation},
                   {"dev_fidelity", report.dev_fidelity},
                   {"worst", report.worst()},
                   {"threshold", kThreshold},
                   {"pass", pass}};
  std::cout << j.dump(2) << "\n";
  CommandResult result;
  result.exit_code = pass ? 0 : 4;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / "oracle_report.json").string();
    io::write_text_file(path, j.dump(2) + "\n");
    result.files.push_back(path);
  }
  return result;
}

CommandResult cmd_reproduce(const std::string& figure, const ExperimentConfig& base) {
  CommandResult result;
  if (figure == "fig1") {
    for (char which : {'a', 'b', 'c'}) {
      ExperimentConfig config = preset_config(which);
      config.L_values = base.L_values;
      config.t_max = base.t_max;
      config.averaging = base.averaging;
      config.observable = base.observable;
      config.output_dir =
          (fs::path(base.output_dir) / "fig1" / (std::string("case_") + which)).string();
      const CommandResult sub = cmd_correlations(config);
      result.exit_code = std::max(result.exit_code, sub.exit_code);
      result.files.insert(result.files.end(), sub.files.begin(), sub.files.end());
    }
    return result;
  }
  if (figure == "fig2") {
    const std::vector<std::pair<char, std::vector<double>>> plan = {
        {'a', {0.01, 0.04}}, {'b', {0.04}}, {'c', {0.04}}};
    for (const auto& [which, dps] : plan) {
      ExperimentConfig config = preset_config(which);
      config.L_values = base.L_values;
      config.delta_primes = dps;
      config.t_max = base.t_max;
      config.averaging = base.averaging;
      config.observable = base.observable;
      config.fidelity_mode = base.fidelity_mode;
      config.output_dir =
          (fs::path(base.output_dir) / "fig2" / (std::string("case_") + which)).string();
      const CommandResult sub = cmd_fidelity(config);
      result.exit_code = std::max(result.exit_code, sub.exit_code);
      result.files.insert(result.files.end(), sub.files.begin(), sub.files.end());
    }
    return result;
  }
  throw ConfigError("/figure: expected \"fig1\" or \"fig2\", got \"" + figure + "\"");
}

}  // namespace kisim
