#pragma once

#include <string>
#include <vector>

#include "kisim/observables.hpp"
#include "kisim/state.hpp"

namespace kisim {

struct SeriesMeta {
  std::string kind;        // "correlation" or "fidelity"
  KickedIsingParams params;
  int L = 0;
  double delta = 0.0;       // perturbation strength (fidelity series)
  double delta_prime = 0.0; // scaled strength when the run was configured via delta'
  bool symmetrized = false;
  std::string observable;   // empty for fidelity series
  std::string mode;         // "exact" or "stochastic"
  int n_samples = 0;
  RngSeed seed = 0;
  bool values_per_site = false;  // true when values are reported per site (C_M/L)
};

// A complex-valued time series at integer times 0..t_max with per-time
// standard errors (zero in exact mode).
struct TimeSeries {
  std::vector<int> times;
  std::vector<cplx> values;
  std::vector<double> stderrs;
  SeriesMeta meta;
  int t_max() const { return times.empty() ? -1 : times.back(); }
};

// C_A(t) = <A_t A> estimated by co-evolving (psi, A psi) and recording
// <psi(t)|A|phi(t)>, averaged per the trace spec. Values are reported per
// site when the observable uses the per_L (magnetization) convention.
TimeSeries correlation_series(const KickedIsingParams& params, const ObservableSpec& obs,
                              int t_max, const TraceAverageSpec& avg);

// F(t) = <U_delta^{-t} U^t>: per sample the reference branch evolves by U
// (or U_{-delta/2} in symmetrized mode) and the perturbed branch by U_delta
// (or U_{+delta/2}); values are the averaged overlaps <psi_b(t)|psi_a(t)>.
TimeSeries fidelity_series(const KickedIsingParams& params, int n_sites, double delta,
                           int t_max, const TraceAverageSpec& avg, bool symmetrized = false);

// Moments of the time-averaged operator Abar = (1/T) sum_{t<T} A_t.
// moments[k-1] approximates <Abar^{2k}>; ratio = <Abar^4>/<Abar^2>^2 is the
// gaussianity diagnostic (2 for a conserved A, 3 in the fast-mixing limit).
struct MomentEstimates {
  std::vector<double> moments;
  std::vector<double> stderrs;
  double ratio = 0.0;
};
MomentEstimates time_averaged_moments(const KickedIsingParams& params, const ObservableSpec& obs,
                                      int T, int k_max, const TraceAverageSpec& avg);

// Applies Abar (with horizon T) to a single state; exposed for tests of the
// accumulation identities (e.g. Abar = A for conserved A).
StateVector apply_time_averaged(const StateVector& state, const KickedIsingParams& params,
                                const ObservableSpec& obs, int T);

enum class Regime { ergodic, non_ergodic, unresolved };

// Tail/summation statistics of a correlation series:
//   D_A   - mean over the tail window [t_max/2, t_max];
//   S_A   - C(0)/2 + sum_{t=1}^{t_cut} Re(C(t) - D_A), the half two-sided sum
//           folded by C(-t) = conj(C(t)), with the measured tail removed so
//           finite-size noise does not accumulate linearly;
//           t_cut = min(t_max/2, 20*t_mix);
//   t_mix - sum_t |t (C - D)| / sum_t |C - D| over t in [0, t_max/2];
//   t_ave - exponential rate of |C(t) - D_A|, fitted on the log of block-of-4
//           means (blocks below 3x the tail noise are dropped).
// The regime call compares |D_A| against max(3*stderr_tail, 3*c/N): below is
// ergodic, above 10x the bound is non-ergodic, in between is unresolved.
struct SeriesStats {
  double S_A = 0.0;
  double D_A = 0.0;
  double D_stderr = 0.0;
  double t_mix = 0.0;
  double t_ave = 0.0;
  Regime regime = Regime::unresolved;
  bool s_divergent = false;    // D_A resolved nonzero: the unsubtracted sum diverges
  bool t_mix_defined = false;
  bool t_ave_defined = false;
  bool low_confidence = false; // t_max < 10 * t_mix
};

// Noise-floor constant for the regime call: the measured ergodic-preset tail
// sits at D ~ c/N with c ~ 44-50 across L = 12..16; pinned at 48.
inline constexpr double kPlateauNoiseConstant = 48.0;

SeriesStats estimate_statistics(const TimeSeries& series,
                                double c_noise = kPlateauNoiseConstant);

}  // namespace kisim
