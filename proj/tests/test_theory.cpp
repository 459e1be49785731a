#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "kisim/dynamics.hpp"
#include "kisim/theory.hpp"

using kisim::cplx;
using kisim::Regime;
using kisim::TimeSeries;

namespace {
constexpr double kPi = 3.14159265358979323846;

TimeSeries curve_series(int t_max, int L, const std::function<double(int)>& f) {
  TimeSeries s;
  s.meta.kind = "fidelity";
  s.meta.L = L;
  for (int t = 0; t <= t_max; ++t) {
    s.times.push_back(t);
    s.values.emplace_back(f(t), 0.0);
    s.stderrs.push_back(0.0);
  }
  return s;
}

// exp(-i (hx sx + hy sy + hz sz)) in closed form, for the field-map tests.
Eigen::Matrix2cd rotation(double hx, double hy, double hz) {
  const double h = std::sqrt(hx * hx + hy * hy + hz * hz);
  Eigen::Matrix2cd n;
  n << cplx(hz, 0), cplx(hx, -hy), cplx(hx, hy), cplx(-hz, 0);
  if (h == 0.0) {
    return Eigen::Matrix2cd::Identity();
  }
  return std::cos(h) * Eigen::Matrix2cd::Identity() - cplx(0, 1) * (std::sin(h) / h) * n;
}
}  // namespace

TEST_CASE("integrable plateau constant") {
  CHECK(kisim::d_sigma_x(1.0, 1.4) == doctest::Approx(0.485126).epsilon(2e-6));
  CHECK(std::abs(kisim::d_sigma_x(kPi / 4, kPi / 4)) < 1e-14);
  CHECK_THROWS_AS(kisim::d_sigma_x(1.0, kPi / 2), std::domain_error);
  CHECK_THROWS_AS(kisim::d_sigma_x(1.0, 0.0), std::domain_error);
}

TEST_CASE("decay-time formulas reproduce the reference values") {
  // Ergodic: S = 2.54 * 24 at delta = 0.01 gives tau close to 164.
  CHECK(kisim::tau_ergodic(2.54 * 24, 0.01) == doctest::Approx(164.0).epsilon(1e-3));
  // Non-ergodic: D = 0.485126 * 24 at delta = 0.02 gives tau close to 14.65.
  const double tau_ne = kisim::tau_nonergodic(kisim::d_sigma_x(1.0, 1.4) * 24, 0.02);
  CHECK(tau_ne == doctest::Approx(14.65).epsilon(1e-3));
  // And the plateau is reached near t* = tau sqrt(24 ln 2) ~ 59.8.
  const kisim::Saturation sat = kisim::saturation(Regime::non_ergodic, tau_ne, 24);
  CHECK(sat.t_star == doctest::Approx(59.8).epsilon(2e-3));

  CHECK_THROWS_AS(kisim::tau_ergodic(-1.0, 0.01), std::domain_error);
  CHECK_THROWS_AS(kisim::tau_ergodic(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(kisim::tau_nonergodic(0.0, 0.01), std::domain_error);
}

TEST_CASE("saturation time is where the decay curve meets the plateau") {
  for (const Regime regime : {Regime::ergodic, Regime::non_ergodic}) {
    for (const int L : {10, 14, 20}) {
      const double tau = 9.5;
      const kisim::Saturation sat = kisim::saturation(regime, tau, L);
      CHECK(sat.plateau == doctest::Approx(std::pow(2.0, -0.5 * L)).epsilon(1e-14));
      CHECK(kisim::decay_curve(regime, tau, sat.t_star) ==
            doctest::Approx(sat.plateau).epsilon(1e-12));
    }
  }
  CHECK(kisim::saturation(Regime::ergodic, 3.0, 20).plateau ==
        doctest::Approx(1.0 / 1024.0).epsilon(1e-14));
  CHECK_THROWS_AS(kisim::saturation(Regime::unresolved, 3.0, 20), std::invalid_argument);
}

TEST_CASE("scaled perturbation strength") {
  CHECK(kisim::delta_from_prime(0.04, 24) == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(kisim::delta_from_prime(0.04, 6) == doctest::Approx(0.08).epsilon(1e-15));
  CHECK_THROWS_AS(kisim::delta_from_prime(0.04, 1), std::domain_error);
}

TEST_CASE("tau_ergodic is chain-length independent for extensive S at fixed delta'") {
  const double s_per_site = 2.54;
  std::vector<double> taus;
  for (const int L : {12, 16, 20}) {
    taus.push_back(kisim::tau_ergodic(s_per_site * L, kisim::delta_from_prime(0.04, L)));
  }
  CHECK(std::abs(taus[1] - taus[0]) / taus[0] < 1e-12);
  CHECK(std::abs(taus[2] - taus[0]) / taus[0] < 1e-12);
}

TEST_CASE("perturbative threshold scales with noise floor and plateau") {
  const double base = kisim::perturbative_threshold(60.0, 48.0, 14);
  CHECK(base == doctest::Approx(std::sqrt(48.0) / (60.0 * 128.0)).epsilon(1e-13));
  // Halves for each two added sites, shrinks with S, grows with sqrt(c).
  CHECK(kisim::perturbative_threshold(60.0, 48.0, 16) == doctest::Approx(base / 2).epsilon(1e-12));
  CHECK(kisim::perturbative_threshold(120.0, 48.0, 14) ==
        doctest::Approx(base / 2).epsilon(1e-12));
  CHECK(kisim::perturbative_threshold(60.0, 4 * 48.0, 14) ==
        doctest::Approx(2 * base).epsilon(1e-12));
  CHECK_THROWS_AS(kisim::perturbative_threshold(0.0, 48.0, 14), std::domain_error);
}

TEST_CASE("bundled decay prediction is a monotone curve floored at the plateau") {
  const kisim::DecayPrediction pred = kisim::predict_decay(Regime::non_ergodic, 6.8, 0.05, 14);
  CHECK(pred.regime == Regime::non_ergodic);
  CHECK(pred.tau == doctest::Approx(kisim::tau_nonergodic(6.8, 0.05)).epsilon(1e-13));
  CHECK(pred.model(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  double prev = 2.0;
  for (int t = 0; t <= 200; t += 5) {
    const double m = pred.model(t);
    CHECK(m <= prev + 1e-15);
    CHECK(m >= pred.plateau - 1e-15);
    prev = m;
  }
  CHECK(pred.model(1e4) == doctest::Approx(pred.plateau).epsilon(1e-14));
}

TEST_CASE("quadratic response on a hand-built series") {
  TimeSeries corr;
  corr.meta.kind = "correlation";
  corr.meta.L = 4;
  corr.meta.values_per_site = false;
  corr.times = {0, 1, 2, 3};
  corr.values = {cplx(2.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)};
  corr.stderrs = {0, 0, 0, 0};

  // Only C(0) contributes: F2(t) = 1 - (delta^2/2) t C(0).
  CHECK(kisim::fidelity_quadratic(corr, 0.1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kisim::fidelity_quadratic(corr, 0.1, 3) ==
        doctest::Approx(1.0 - 0.005 * 3 * 2.0).epsilon(1e-13));
  CHECK_THROWS_AS(kisim::fidelity_quadratic(corr, 0.1, 4), std::out_of_range);

  // Per-site series are rescaled by L internally.
  corr.meta.values_per_site = true;
  CHECK(kisim::fidelity_quadratic(corr, 0.1, 3) ==
        doctest::Approx(1.0 - 0.005 * 3 * 2.0 * 4).epsilon(1e-13));
}

TEST_CASE("field map is exact for a pure transverse kick") {
  const kisim::FieldMap m = kisim::perturbed_field_map(1.4, 0.0, 1e-3);
  CHECK(m.h_x == doctest::Approx(1.4 + 1e-3).epsilon(1e-14));
  CHECK(std::abs(m.h_z) < 1e-15);
  CHECK_THROWS_AS(kisim::perturbed_field_map(0.0, 0.0, 1e-3), std::domain_error);
}

TEST_CASE("field map drops an O(delta) sigma_y component for tilted fields") {
  // The composed rotation K(h) * exp(-i delta sx) leaves the xz-plane, so a
  // two-component map has an O(delta) operator residual; adding the
  // commutator-generated h_y' = h_z delta pushes it to O(delta^2). The two
  // scalings are pinned here.
  const double h_x = 1.4, h_z = 0.4;
  auto residuals = [&](double delta) {
    const Eigen::Matrix2cd target = rotation(h_x, 0.0, h_z) * rotation(delta, 0.0, 0.0);
    const kisim::FieldMap m = kisim::perturbed_field_map(h_x, h_z, delta);
    const double planar = (rotation(m.h_x, 0.0, m.h_z) - target).norm();
    const double lifted = (rotation(m.h_x, h_z * delta, m.h_z) - target).norm();
    return std::make_pair(planar, lifted);
  };
  const auto [p1, l1] = residuals(1e-3);
  const auto [p2, l2] = residuals(2e-3);
  CHECK(l1 < 0.01 * p1);               // the y-lift removes the leading error
  CHECK(p2 / p1 == doctest::Approx(2.0).epsilon(0.12));  // O(delta)
  CHECK(l2 / l1 == doctest::Approx(4.0).epsilon(0.12));  // O(delta^2)
}

TEST_CASE("decay fits recover synthetic laws and pick the right model") {
  SUBCASE("exponential") {
    const double tau = 30.0;
    const TimeSeries s = curve_series(240, 14, [&](int t) {
      return std::max(std::exp(-t / tau), 1e-4);
    });
    const kisim::FitResult fit = kisim::fit_decay(s, 14);
    CHECK(fit.regime_fit == Regime::ergodic);
    CHECK(fit.tau_fit == doctest::Approx(tau).epsilon(1e-3));
    CHECK(fit.rmse_exp < fit.rmse_gauss);
    CHECK(fit.n_points >= 5);
    CHECK(fit.window_low == doctest::Approx(3.0 * std::pow(2.0, -7.0)).epsilon(1e-13));
  }
  SUBCASE("gaussian") {
    const double tau = 15.0;
    const TimeSeries s = curve_series(100, 14, [&](int t) {
      return std::max(std::exp(-0.5 * t * t / (tau * tau)), 1e-4);
    });
    const kisim::FitResult fit = kisim::fit_decay(s, 14);
    CHECK(fit.regime_fit == Regime::non_ergodic);
    CHECK(fit.tau_fit == doctest::Approx(tau).epsilon(1e-3));
    CHECK(fit.rmse_gauss < fit.rmse_exp);
  }
  SUBCASE("insufficient data") {
    const TimeSeries flat = curve_series(50, 14, [](int) { return 0.97; });
    CHECK_THROWS_AS(kisim::fit_decay(flat, 14), kisim::InsufficientDataError);
  }
}
