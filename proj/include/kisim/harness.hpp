#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kisim/dynamics.hpp"
#include "kisim/observables.hpp"
#include "kisim/state.hpp"

namespace kisim {

inline constexpr const char* kVersion = "1.0.0";
// Convention tag recorded in every manifest: the transverse/longitudinal kick
// acts on the state first, then the Ising coupling layer.
inline constexpr const char* kFactorOrderTag = "kick_then_zz";
inline constexpr int kExactModeSiteCap = 12;
inline constexpr double kReferenceChainLength = 24.0;

// Configuration problems carry a JSON-pointer-style location in the message.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AveragingSpec {
  std::string mode = "stochastic";  // "exact" | "stochastic"
  int n_samples = 16;
  RngSeed seed = 0;
};

struct ExperimentConfig {
  KickedIsingParams params{1.0, 1.4, 0.0};
  std::vector<int> L_values = {12, 14, 16};
  std::vector<double> delta_primes = {0.04};  // scaled: delta = dp * sqrt(L0 / L)
  int t_max = 300;
  AveragingSpec averaging;
  std::string observable = "M_x";
  std::string fidelity_mode = "plain";  // "plain" | "symmetrized"
  std::string output_dir = "out";
};

void to_json(nlohmann::json& j, const AveragingSpec& a);
void from_json(const nlohmann::json& j, AveragingSpec& a);
void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

// First violated rule raises ConfigError("/path: reason").
void validate_config(const ExperimentConfig& config);
ExperimentConfig parse_config_text(const std::string& json_text);
// Accepts either a bare config document or a manifest (unwraps its "config").
ExperimentConfig load_config_file(const std::string& path);

// Shipped parameter sets ('a', 'b', 'c'): j_z = 1, h_x = 1.4 with
// h_z = 0 (integrable), 0.4 (intermediate), 1.4 (ergodic).
ExperimentConfig preset_config(char which);

TraceAverageSpec averaging_to_trace_spec(const AveragingSpec& avg, int n_sites);

const char* regime_name(Regime regime);
nlohmann::json stats_to_json(const SeriesStats& stats);

struct CommandResult {
  int exit_code = 0;                // 0 ok, 3 unresolved regime, 4 oracle failure
  std::vector<std::string> files;   // everything written, manifest last
};

// C_A(t)/site per L, with companion statistics JSON and a manifest.
CommandResult cmd_correlations(const ExperimentConfig& config);

// |F(t)| per (L, delta'), with fit + theory-prediction JSON and a manifest.
CommandResult cmd_fidelity(const ExperimentConfig& config);

struct TheoryRequest {
  KickedIsingParams params{1.0, 1.4, 0.0};
  int L = 24;
  double delta_prime = 0.02;
  std::optional<double> s_a;  // extensive correlation sum, enables tau_ergodic
  std::optional<double> c_a;  // plateau noise constant, enables delta_p
};
nlohmann::json theory_report(const TheoryRequest& request);
CommandResult cmd_theory(const TheoryRequest& request, const std::string& out_dir);

CommandResult cmd_oracle_check(int n_sites, const KickedIsingParams& params, double delta,
                               int t_steps, const std::string& out_dir);

// figure is "fig1" (correlation decay, presets a/b/c) or "fig2" (fidelity
// decay; preset a at delta' in {0.01, 0.04}, presets b/c at 0.04).
CommandResult cmd_reproduce(const std::string& figure, const ExperimentConfig& base);

}  // namespace kisim
