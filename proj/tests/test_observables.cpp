#include <doctest.h>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "kisim/dense.hpp"
#include "kisim/observables.hpp"
#include "kisim/state.hpp"

using kisim::cplx;
using kisim::ObservableSpec;
using kisim::StateVector;
using kisim::TraceAverageSpec;

namespace {
TraceAverageSpec exact_spec() {
  TraceAverageSpec spec;
  spec.mode = TraceAverageSpec::Mode::exact_basis_sum;
  return spec;
}
}  // namespace

TEST_CASE("magnetization token binds one term per site, reported per site") {
  const ObservableSpec m = kisim::parse_observable("M_x", 6);
  CHECK(m.terms.size() == 6);
  CHECK(m.normalization == kisim::Normalization::per_L);
  CHECK(m.n_sites == 6);
  const ObservableSpec m2 = kisim::magnetization_x(6);
  CHECK(m2.terms.size() == m.terms.size());
}

TEST_CASE("translation-averaged Z tokens carry the 1/sqrt(L) factor") {
  const int L = 6;
  const ObservableSpec z = kisim::parse_observable("Z:z", L);
  CHECK(z.terms.size() == 6);
  CHECK(z.normalization == kisim::Normalization::per_sqrt_L);
  // On the all-up basis state each sigma^z term contributes +1.
  const StateVector up = StateVector::basis(L, 0);
  const cplx val = kisim::expectation(up, z);
  CHECK(val.real() == doctest::Approx(std::sqrt(double(L))).epsilon(1e-13));
  CHECK(std::abs(val.imag()) < 1e-14);
}

TEST_CASE("invalid tokens are rejected with a reason") {
  CHECK_THROWS_AS(kisim::parse_observable("Q_x", 6), std::invalid_argument);
  CHECK_THROWS_AS(kisim::parse_observable("Z:", 6), std::invalid_argument);
  CHECK_THROWS_AS(kisim::parse_observable("Z:xq", 6), std::invalid_argument);
  CHECK_THROWS_AS(kisim::parse_observable("Z:xxxxxxx", 6), std::invalid_argument);
}

TEST_CASE("gate-based observable application matches the dense matrix") {
  const int L = 5;
  const StateVector psi = StateVector::random(L, 99);
  for (const std::string token :
       {"M_x", "M_y", "M_z", "Z:x", "Z:y", "Z:zz", "Z:x0z", "Z:yy", "Z:xyz"}) {
    CAPTURE(token);
    const ObservableSpec obs = kisim::parse_observable(token, L);
    const StateVector applied = kisim::apply_observable(psi, obs);
    const kisim::dense::Mat mat = kisim::dense::observable_matrix(obs);
    const kisim::dense::Vec ref = mat * kisim::dense::to_vector(psi);
    double dev = 0.0;
    for (std::size_t i = 0; i < applied.size(); ++i) {
      dev = std::max(dev, std::abs(applied[i] - ref[Eigen::Index(i)]));
    }
    CHECK(dev < 1e-13);
  }
}

TEST_CASE("expectations of hermitian observables are real") {
  const int L = 6;
  const StateVector psi = StateVector::random(L, 5);
  for (const std::string token : {"M_x", "Z:y", "Z:xz"}) {
    const cplx v = kisim::expectation(psi, kisim::parse_observable(token, L));
    CHECK(std::abs(v.imag()) < 1e-12);
  }
}

TEST_CASE("exact trace average reproduces tr(Z^2)/N = 1") {
  const int L = 8;
  const ObservableSpec z = kisim::parse_observable("Z:z", L);
  auto fn = [&](const StateVector& psi) {
    const StateVector zpsi = kisim::apply_observable(psi, z);
    return kisim::inner_product(zpsi, zpsi);
  };
  const kisim::TraceAverage exact = kisim::trace_average(fn, L, exact_spec());
  CHECK(exact.value.real() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(exact.stderr_est == 0.0);

  TraceAverageSpec sampled;
  sampled.n_samples = 32;
  sampled.seed = 4;
  const kisim::TraceAverage stoch = kisim::trace_average(fn, L, sampled);
  CHECK(stoch.stderr_est > 0.0);
  CHECK(std::abs(stoch.value.real() - 1.0) < 5 * stoch.stderr_est + 1e-3);
}

TEST_CASE("exact trace refuses chains above the cap") {
  TraceAverageSpec spec = exact_spec();
  spec.exact_cap = 6;
  auto fn = [](const StateVector& psi) { return kisim::inner_product(psi, psi); };
  CHECK_THROWS_AS(kisim::trace_average(fn, 7, spec), std::invalid_argument);
}

TEST_CASE("single-site moments are gaussian: <Z^2> = 1, <Z^4> = 3 - 2/L") {
  const int L = 8;
  const double m2 = kisim::moment_test_z_observables("x", L, 1, exact_spec());
  const double m4 = kisim::moment_test_z_observables("x", L, 2, exact_spec());
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(3.0 - 2.0 / L).epsilon(1e-12));
  CHECK_THROWS_AS(kisim::moment_test_z_observables("x", L, 4, exact_spec()),
                  std::invalid_argument);
}

TEST_CASE("stochastic moment estimates agree with exact ones") {
  const int L = 8;
  TraceAverageSpec sampled;
  sampled.n_samples = 24;
  sampled.seed = 12;
  const double exact = kisim::moment_test_z_observables("zz", L, 2, exact_spec());
  const double stoch = kisim::moment_test_z_observables("zz", L, 2, sampled);
  CHECK(std::abs(stoch - exact) / exact < 0.15);
}
