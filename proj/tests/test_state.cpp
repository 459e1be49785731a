#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <vector>

#include "kisim/state.hpp"

using kisim::cplx;
using kisim::KickedIsingParams;
using kisim::StateVector;

namespace {
constexpr double kPi = 3.14159265358979323846;

double max_amp_diff(const StateVector& a, const StateVector& b) {
  double dev = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dev = std::max(dev, std::abs(a[i] - b[i]));
  }
  return dev;
}

// Bond sum computed naively from the bit encoding, for cross-checking the
// popcount kernel.
int bond_sum(std::uint64_t idx, int L) {
  int sum = 0;
  for (int j = 0; j < L; ++j) {
    const int sj = 1 - 2 * int((idx >> j) & 1);
    const int sk = 1 - 2 * int((idx >> ((j + 1) % L)) & 1);
    sum += sj * sk;
  }
  return sum;
}
}  // namespace

TEST_CASE("basis and random states are normalized") {
  const StateVector e5 = StateVector::basis(4, 5);
  CHECK(e5.size() == 16);
  CHECK(e5[5] == cplx(1.0, 0.0));
  CHECK(e5.norm() == doctest::Approx(1.0).epsilon(1e-15));

  const StateVector psi = StateVector::random(10, 42);
  CHECK(psi.size() == 1024);
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("random states are seed-deterministic and seed-sensitive") {
  const StateVector a = StateVector::random(8, 7);
  const StateVector b = StateVector::random(8, 7);
  const StateVector c = StateVector::random(8, 8);
  CHECK(max_amp_diff(a, b) == 0.0);
  CHECK(max_amp_diff(a, c) > 1e-3);
}

TEST_CASE("derived stream seeds separate samples") {
  const auto s0 = kisim::derive_stream_seed(123, 0);
  const auto s1 = kisim::derive_stream_seed(123, 1);
  const auto t0 = kisim::derive_stream_seed(124, 0);
  CHECK(s0 != s1);
  CHECK(s0 != t0);
  CHECK(s0 == kisim::derive_stream_seed(123, 0));
}

TEST_CASE("gaussian stream has unit variance and zero mean") {
  kisim::GaussianStream g(2024);
  const int n = 40000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.next();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("kick matrix is unitary and matches closed forms") {
  SUBCASE("zero field is the identity") {
    const auto u = kisim::kick_matrix(0.0, 0.0);
    CHECK(std::abs(u[0] - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(u[1]) < 1e-15);
    CHECK(std::abs(u[2]) < 1e-15);
    CHECK(std::abs(u[3] - cplx(1, 0)) < 1e-15);
  }
  SUBCASE("pure transverse quarter turn gives -i sigma_x") {
    const auto u = kisim::kick_matrix(kPi / 2, 0.0);
    CHECK(std::abs(u[0]) < 1e-15);
    CHECK(std::abs(u[1] - cplx(0, -1)) < 1e-15);
    CHECK(std::abs(u[2] - cplx(0, -1)) < 1e-15);
    CHECK(std::abs(u[3]) < 1e-15);
  }
  SUBCASE("generic field: u u^dagger = 1") {
    const auto u = kisim::kick_matrix(1.4, 0.4);
    // rows of u times conjugate rows of u
    const cplx d00 = u[0] * std::conj(u[0]) + u[1] * std::conj(u[1]);
    const cplx d01 = u[0] * std::conj(u[2]) + u[1] * std::conj(u[3]);
    const cplx d11 = u[2] * std::conj(u[2]) + u[3] * std::conj(u[3]);
    CHECK(std::abs(d00 - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(d01) < 1e-15);
    CHECK(std::abs(d11 - cplx(1, 0)) < 1e-15);
  }
}

TEST_CASE("Ising layer phases match the naive bond sum") {
  const int L = 5;
  const double j_z = 0.73;
  StateVector psi = StateVector::random(L, 11);
  StateVector phased = psi;
  kisim::apply_zz_layer(phased, j_z);
  for (std::size_t idx = 0; idx < psi.size(); ++idx) {
    const cplx expected = psi[idx] * std::exp(cplx(0, -j_z * bond_sum(idx, L)));
    CHECK(std::abs(phased[idx] - expected) < 1e-14);
  }
}

TEST_CASE("Ising layer on aligned and alternating basis states") {
  const double j_z = 1.0;
  StateVector aligned = StateVector::basis(4, 0);  // all s_j = +1: bond sum +4
  kisim::apply_zz_layer(aligned, j_z);
  CHECK(std::abs(aligned[0] - std::exp(cplx(0, -4.0))) < 1e-14);

  StateVector staggered = StateVector::basis(4, 0b0101);  // bond sum -4
  kisim::apply_zz_layer(staggered, j_z);
  CHECK(std::abs(staggered[0b0101] - std::exp(cplx(0, 4.0))) < 1e-14);
}

TEST_CASE("Floquet step is unitary and invertible") {
  const KickedIsingParams params{1.0, 1.4, 0.4};
  StateVector psi = StateVector::random(8, 3);
  const StateVector original = psi;
  for (int t = 0; t < 20; ++t) {
    kisim::floquet_step(psi, params);
  }
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(max_amp_diff(psi, original) > 1e-3);  // actually evolves
  for (int t = 0; t < 20; ++t) {
    kisim::floquet_step_inverse(psi, params);
  }
  CHECK(max_amp_diff(psi, original) < 1e-12);
}

TEST_CASE("norm survives long evolutions") {
  const KickedIsingParams params{1.0, 1.4, 1.4};
  StateVector psi = StateVector::random(10, 5);
  for (int t = 0; t < 100; ++t) {
    kisim::floquet_step(psi, params);
  }
  CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
}

TEST_CASE("perturbation kick equals a pure transverse kick layer") {
  StateVector a = StateVector::random(7, 17);
  StateVector b = a;
  kisim::apply_perturbation_kick(a, 0.31);
  kisim::apply_kick_layer(b, 0.31, 0.0);
  CHECK(max_amp_diff(a, b) == 0.0);

  StateVector c = StateVector::random(7, 18);
  const StateVector before = c;
  kisim::apply_perturbation_kick(c, 0.0);
  CHECK(max_amp_diff(c, before) == 0.0);
}

TEST_CASE("symmetrized perturbed step halves the perturbation") {
  const KickedIsingParams params{1.0, 1.4, 0.0};
  StateVector a = StateVector::random(6, 21);
  StateVector b = a;
  kisim::perturbed_floquet_step(a, params, 0.2, /*symmetrized=*/true);
  kisim::perturbed_floquet_step(b, params, 0.1, /*symmetrized=*/false);
  CHECK(max_amp_diff(a, b) < 1e-15);
}

TEST_CASE("inner product is a proper sesquilinear form") {
  const StateVector a = StateVector::random(9, 1);
  const StateVector b = StateVector::random(9, 2);
  const cplx aa = kisim::inner_product(a, a);
  CHECK(aa.real() == doctest::Approx(a.norm() * a.norm()).epsilon(1e-13));
  CHECK(std::abs(aa.imag()) < 1e-14);
  const cplx ab = kisim::inner_product(a, b);
  const cplx ba = kisim::inner_product(b, a);
  CHECK(std::abs(ab - std::conj(ba)) < 1e-14);
}

TEST_CASE("results are bitwise identical across worker counts") {
  const KickedIsingParams params{1.0, 1.4, 0.4};
  auto run = [&](const char* threads) {
    setenv("KISIM_THREADS", threads, 1);
    StateVector psi = StateVector::random(10, 33);
    StateVector phi = StateVector::random(10, 34);
    for (int t = 0; t < 5; ++t) {
      kisim::floquet_step(psi, params);
      kisim::floquet_step(phi, params);
    }
    return kisim::inner_product(psi, phi);
  };
  const cplx one = run("1");
  const cplx four = run("4");
  unsetenv("KISIM_THREADS");
  CHECK(one.real() == four.real());
  CHECK(one.imag() == four.imag());
}
