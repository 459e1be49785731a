#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kisim/state.hpp"

namespace kisim {

enum class Axis { X, Y, Z };

// A single product of Pauli operators on distinct sites, with a coefficient.
struct PauliString {
  std::vector<std::pair<int, Axis>> ops;  // (site, axis), sites distinct
  cplx coeff{1.0, 0.0};
};

// How series built from an observable are reported:
//   none       - raw operator values.
//   per_sqrt_L - the 1/sqrt(L) factor is part of the operator itself
//                (translation-averaged Z observables); series stay raw.
//   per_L      - operator applied raw, but correlation values are reported
//                per site (magnetization convention C_M(t)/L).
enum class Normalization { none, per_sqrt_L, per_L };

struct ObservableSpec {
  std::vector<PauliString> terms;
  std::string name;
  Normalization normalization = Normalization::none;
  int n_sites = 0;
};

// Builds an observable from a config token, bound to an L-site chain:
//   "M_x" | "M_y" | "M_z"  - magnetization sum_j sigma^a_j (reported per site)
//   "Z:<pattern>"          - L^{-1/2} sum_j prod_k sigma^{p_k}_{j+k} with
//                            pattern letters x, y, z and 0 for identity on
//                            interior sites, e.g. "Z:x", "Z:xx", "Z:x0z".
ObservableSpec parse_observable(const std::string& token, int n_sites);

// Convenience: the transverse magnetization M = sum_j sigma^x_j.
ObservableSpec magnetization_x(int n_sites);

// obs|psi> as a new state. sigma^x flips bit j; sigma^z contributes the sign
// s_j = 1 - 2*bit_j; sigma^y = i sigma^x sigma^z under the fixed encoding.
StateVector apply_observable(const StateVector& state, const ObservableSpec& obs);

// <psi|A|psi>; real to rounding for hermitian A.
cplx expectation(const StateVector& state, const ObservableSpec& obs);

// Infinite-temperature averaging spec: (1/N) tr(.) either as an exact sum
// over all computational basis states (L capped) or as a mean over random
// gaussian states with a standard-error estimate.
struct TraceAverageSpec {
  enum class Mode { exact_basis_sum, stochastic };
  Mode mode = Mode::stochastic;
  int n_samples = 16;
  RngSeed seed = 0;
  int exact_cap = 12;
};

struct TraceAverage {
  cplx value{0.0, 0.0};
  double stderr_est = 0.0;  // 0 in exact mode
};

// Averages fn over initial states per the spec. fn must be linear in the
// density of the sampled state so the stochastic estimator is unbiased.
TraceAverage trace_average(const std::function<cplx(const StateVector&)>& fn, int n_sites,
                           const TraceAverageSpec& spec);

// <Z_pattern^{2k}> via trace averaging of ||Z^k psi||^2, k <= 3. For the
// single-site x pattern the exact value is 3 - 2/L at 2k = 4.
double moment_test_z_observables(const std::string& pattern, int n_sites, int k,
                                 const TraceAverageSpec& spec);

}  // namespace kisim
