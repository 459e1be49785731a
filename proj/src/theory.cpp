#include "kisim/theory.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace kisim {

namespace {
constexpr double kLn2 = 0.69314718055994530942;
}

double d_sigma_x(double j_z, double h_x) {
  const double s = std::sin(2.0 * h_x);
  if (std::abs(s) < 1e-12) {
    throw std::domain_error("d_sigma_x: sin(2 h_x) vanishes; plateau formula is singular");
  }
  const double c = std::cos(2.0 * h_x);
  const double m = std::max(std::abs(std::cos(2.0 * j_z)), std::abs(c));
  return (m - c * c) / (s * s);
}

double tau_ergodic(double S_A, double delta) {
  if (S_A <= 0.0) throw std::domain_error("tau_ergodic: S_A must be positive");
  if (delta == 0.0) throw std::domain_error("tau_ergodic: delta must be nonzero");
  return 1.0 / (S_A * delta * delta);
}

double tau_nonergodic(double D_A, double delta) {
  if (D_A <= 0.0) throw std::domain_error("tau_nonergodic: D_A must be positive");
  if (delta == 0.0) throw std::domain_error("tau_nonergodic: delta must be nonzero");
  return 1.0 / (std::sqrt(D_A) * std::abs(delta));
}

double decay_curve(Regime regime, double tau, double t) {
  if (tau <= 0.0) throw std::domain_error("decay_curve: tau must be positive");
  switch (regime) {
    case Regime::ergodic: return std::exp(-t / tau);
    case Regime::non_ergodic: return std::exp(-t * t / (2.0 * tau * tau));
    default: throw std::invalid_argument("decay_curve: regime must be resolved");
  }
}

Saturation saturation(Regime regime, double tau, int L) {
  if (tau <= 0.0) throw std::domain_error("saturation: tau must be positive");
  if (L < 2) throw std::domain_error("saturation: L must be >= 2");
  Saturation s;
  s.plateau = std::pow(2.0, -0.5 * L);
  const double l_ln2 = static_cast<double>(L) * kLn2;
  switch (regime) {
    case Regime::non_ergodic: s.t_star = tau * std::sqrt(l_ln2); break;
    case Regime::ergodic: s.t_star = tau * l_ln2 * 0.5; break;
    default: throw std::invalid_argument("saturation: regime must be resolved");
  }
  return s;
}

double perturbative_threshold(double S_A, double c_A, int L) {
  if (S_A <= 0.0 || c_A <= 0.0) {
    throw std::domain_error("perturbative_threshold: S_A and c_A must be positive");
  }
  return std::sqrt(c_A) / (S_A * std::pow(2.0, 0.5 * L));
}

double delta_from_prime(double delta_prime, int L, int L0) {
  if (L < 2 || L0 < 2) throw std::domain_error("delta_from_prime: L and L0 must be >= 2");
  return delta_prime * std::sqrt(static_cast<double>(L0) / static_cast<double>(L));
}

double DecayPrediction::model(double t) const {
  return std::max(decay_curve(regime, tau, t), plateau);
}

DecayPrediction predict_decay(Regime regime, double S_or_D, double delta, int L) {
  DecayPrediction p;
  p.regime = regime;
  p.tau = regime == Regime::ergodic ? tau_ergodic(S_or_D, delta)
                                    : tau_nonergodic(S_or_D, delta);
  const Saturation s = saturation(regime, p.tau, L);
  p.t_star = s.t_star;
  p.plateau = s.plateau;
  return p;
}

double fidelity_quadratic(const TimeSeries& corr, double delta, int t) {
  if (t < 0 || static_cast<std::size_t>(t) >= corr.values.size()) {
    throw std::out_of_range("fidelity_quadratic: t beyond the correlation series");
  }
  const double scale = corr.meta.values_per_site ? static_cast<double>(corr.meta.L) : 1.0;
  // sum_{t'=-t}^{t} (t - |t'|) C(t') = t C(0) + sum_{t'=1}^{t} (t - t') 2 Re C(t')
  double acc = static_cast<double>(t) * corr.values[0].real();
  for (int tp = 1; tp <= t; ++tp) {
    acc += static_cast<double>(t - tp) * 2.0 * corr.values[static_cast<std::size_t>(tp)].real();
  }
  return 1.0 - 0.5 * delta * delta * scale * acc;
}

FieldMap perturbed_field_map(double h_x, double h_z, double delta) {
  const double h = std::hypot(h_x, h_z);
  if (h == 0.0) throw std::domain_error("perturbed_field_map: requires h > 0");
  const double hcot = h * std::cos(h) / std::sin(h);
  FieldMap m;
  m.h_x = h_x + (h_x * h_x + h_z * h_z * hcot) * delta / (h * h);
  m.h_z = h_z + h_x * h_z * (1.0 - hcot) * delta / (h * h);
  return m;
}

FitResult fit_decay(const TimeSeries& series, int L) {
  FitResult r;
  r.window_low = 3.0 * std::pow(2.0, -0.5 * L);
  r.window_high = 0.95;
  double st2 = 0.0, st4 = 0.0, sty = 0.0, st2y = 0.0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    const double t = static_cast<double>(series.times[i]);
    const double a = std::abs(series.values[i]);
    if (t <= 0.0 || a <= r.window_low || a >= r.window_high) continue;
    const double y = std::log(a);
    pts.emplace_back(t, y);
    st2 += t * t;
    st4 += t * t * t * t;
    sty += t * y;
    st2y += t * t * y;
  }
  r.n_points = static_cast<int>(pts.size());
  if (r.n_points < 5) {
    throw InsufficientDataError("fit_decay: fewer than 5 points inside the fit window");
  }
  const double alpha = -sty / st2;    // ln|F| = -alpha t
  const double beta = -st2y / st4;    // ln|F| = -beta t^2
  double se = 0.0, sg = 0.0;
  for (const auto& [t, y] : pts) {
    const double de = y + alpha * t;
    const double dg = y + beta * t * t;
    se += de * de;
    sg += dg * dg;
  }
  r.rmse_exp = std::sqrt(se / r.n_points);
  r.rmse_gauss = std::sqrt(sg / r.n_points);
  r.tau_exp = alpha > 0.0 ? 1.0 / alpha : std::numeric_limits<double>::infinity();
  r.tau_gauss = beta > 0.0 ? 1.0 / std::sqrt(2.0 * beta) : std::numeric_limits<double>::infinity();
  if (r.rmse_exp <= r.rmse_gauss) {
    r.regime_fit = Regime::ergodic;
    r.tau_fit = r.tau_exp;
    r.rmse = r.rmse_exp;
  } else {
    r.regime_fit = Regime::non_ergodic;
    r.tau_fit = r.tau_gauss;
    r.rmse = r.rmse_gauss;
  }
  return r;
}

}  // namespace kisim
