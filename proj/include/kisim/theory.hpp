#pragma once

#include <stdexcept>

#include "kisim/dynamics.hpp"

namespace kisim {

// Closed-form long-time plateau of the sigma^x autocorrelation in the
// transverse-field (h_z = 0) chain:
//   (max{|cos 2J_z|, |cos 2h_x|} - cos^2 2h_x) / sin^2 2h_x.
// Throws std::domain_error when |sin 2h_x| < 1e-12 (singular denominator).
double d_sigma_x(double j_z, double h_x);

// Decay time scales: tau_e = 1/(S_A delta^2) for the mixing (exponential)
// law, tau_ne = 1/(sqrt(D_A) delta) for the non-ergodic (gaussian) law.
// Non-positive S_A/D_A or delta = 0 throw std::domain_error.
double tau_ergodic(double S_A, double delta);
double tau_nonergodic(double D_A, double delta);

// Predicted |F|: exp(-t/tau) in the ergodic regime, exp(-t^2/(2 tau^2)) in
// the non-ergodic one.
double decay_curve(Regime regime, double tau, double t);

// Finite-size saturation: the decay terminates at t* with residual plateau
// N^{-1/2}; t*_ne = tau sqrt(L ln 2), t*_e = tau L ln(2)/2, so that
// decay_curve(regime, tau, t*) = plateau exactly.
struct Saturation {
  double t_star = 0.0;
  double plateau = 0.0;
};
Saturation saturation(Regime regime, double tau, int L);

// Perturbative threshold delta_p = sqrt(c_A) / (S_A 2^{L/2}) below which the
// finite-size plateau D_A ~ c_A/N dominates the decay.
double perturbative_threshold(double S_A, double c_A, int L);

// Scaled perturbation strength: delta = delta' sqrt(L0/L), L0 = 24.
double delta_from_prime(double delta_prime, int L, int L0 = 24);

// Bundled prediction for one regime; model(t) is the decay curve floored at
// the saturation plateau (monotone non-increasing, model(0) = 1).
struct DecayPrediction {
  Regime regime = Regime::unresolved;
  double tau = 0.0;
  double t_star = 0.0;
  double plateau = 0.0;
  double model(double t) const;
};

// S_or_D is S_A for the ergodic regime and D_A for the non-ergodic one.
DecayPrediction predict_decay(Regime regime, double S_or_D, double delta, int L);

// Truncated second-order fidelity
//   F2(t) = 1 - (delta^2/2) sum_{t'=-t}^{t} (t - |t'|) C(t'),
// folded by C(-t') = conj(C(t')) so the result is real. Per-site series
// (magnetization convention) are rescaled by L internally. Throws
// std::out_of_range when t exceeds the series.
double fidelity_quadratic(const TimeSeries& corr, double delta, int t);

// First-order parameter map absorbing the perturbation kick into shifted
// fields: h_x' = h_x + (h_x^2 + h_z^2 h cot h) delta / h^2,
// h_z' = h_z + h_x h_z (1 - h cot h) delta / h^2, h = sqrt(h_x^2 + h_z^2).
// Throws std::domain_error at h = 0. Note: the map drops a first-order
// sigma^y component (~ h_z delta), so its operator residual is O(delta) for
// h_z != 0; the tests pin this scaling.
struct FieldMap {
  double h_x = 0.0;
  double h_z = 0.0;
};
FieldMap perturbed_field_map(double h_x, double h_z, double delta);

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Log-space least-squares fit of |F| against both decay laws over the window
// 3*2^{-L/2} < |F| < 0.95 (saturation plateau and flat early region both
// excluded); the regime with the lower RMSE wins. Throws
// InsufficientDataError with fewer than 5 points in the window.
struct FitResult {
  Regime regime_fit = Regime::unresolved;
  double tau_fit = 0.0;
  double rmse = 0.0;
  double tau_exp = 0.0;
  double rmse_exp = 0.0;
  double tau_gauss = 0.0;
  double rmse_gauss = 0.0;
  int n_points = 0;
  double window_low = 0.0;
  double window_high = 0.0;
};
FitResult fit_decay(const TimeSeries& series, int L);

}  // namespace kisim
