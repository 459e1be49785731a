#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace kisim {

using cplx = std::complex<double>;
using RngSeed = std::uint64_t;

// Kicked Ising chain parameters, in units where the period and hbar are 1.
// One Floquet period applies the uniform tilted-field kick exp(-i sum_j
// (h_x sx_j + h_z sz_j)) followed by the Ising coupling layer
// exp(-i j_z sum_j sz_j sz_{j+1}) on the periodic chain.
struct KickedIsingParams {
  double j_z = 0.0;
  double h_x = 0.0;
  double h_z = 0.0;
};

// splitmix64: fully specified 64-bit mixer, used both as the RNG core and to
// derive independent per-sample streams from a base seed.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline RngSeed derive_stream_seed(RngSeed base, std::uint64_t index) {
  std::uint64_t s = base;
  std::uint64_t a = splitmix64_next(s);
  s = base ^ (0x9e3779b97f4a7c15ull * (index + 1));
  return a ^ splitmix64_next(s);
}

// Deterministic gaussian stream (Box-Muller over splitmix64 uniforms); avoids
// the implementation-defined algorithm behind std::normal_distribution so
// that a seed pins the exact sequence on any toolchain.
class GaussianStream {
 public:
  explicit GaussianStream(RngSeed seed) : state_(seed) {}
  double next();

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// State vector of an L-site spin-1/2 chain over the computational (sigma^z)
// basis. Amplitude index bit j encodes site j, with bit value 0 meaning
// sigma^z eigenvalue +1 and bit value 1 meaning -1.
class StateVector {
 public:
  StateVector(int n_sites, std::vector<cplx> amplitudes);

  // Computational basis state |index>.
  static StateVector basis(int n_sites, std::uint64_t index);
  // Normalized state with i.i.d. complex-gaussian amplitudes ("typical"
  // infinite-temperature sample); identical seed gives identical amplitudes.
  static StateVector random(int n_sites, RngSeed seed);

  int n_sites() const { return n_sites_; }
  std::size_t size() const { return amps_.size(); }
  const std::vector<cplx>& amplitudes() const { return amps_; }
  std::vector<cplx>& amplitudes() { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[i]; }

  double norm() const;

 private:
  int n_sites_;
  std::vector<cplx> amps_;
};

// Diagonal Ising layer: multiplies each amplitude by
// exp(-i j_z sum_j s_j s_{j+1}) with s_j = +-1 read off bit j and periodic
// bonds. The bond sum is L - 2*popcount(idx ^ rotr(idx)), so only L+1
// distinct phases occur.
void apply_zz_layer(StateVector& state, double j_z);

// Uniform kick layer: applies the single-site unitary
// cos(h) - i sin(h)/h * (h_x sx + h_z sz), h = sqrt(h_x^2 + h_z^2),
// to every site (identity when h = 0).
void apply_kick_layer(StateVector& state, double h_x, double h_z);

// One Floquet period: kick layer first (rightmost factor acts first), then
// the Ising layer.
void floquet_step(StateVector& state, const KickedIsingParams& params);

// Inverse of floquet_step: conjugate Ising phases, then the inverse kick.
void floquet_step_inverse(StateVector& state, const KickedIsingParams& params);

// exp(-i delta sx_j) on every site, i.e. exp(-i delta M) with
// M = sum_j sx_j.
void apply_perturbation_kick(StateVector& state, double delta);

// Perturbed period U_delta = U exp(-i delta M). With symmetrized=true the
// step uses delta/2: fidelity in symmetrized mode pairs a forward branch at
// +delta with a reference branch at -delta, each stepping by half.
void perturbed_floquet_step(StateVector& state, const KickedIsingParams& params,
                            double delta, bool symmetrized = false);

// <a|b> = sum conj(a_i) b_i. The reduction uses a fixed 256-chunk policy with
// an ordered combine, so the result is bitwise reproducible for any worker
// count.
cplx inner_product(const StateVector& a, const StateVector& b);

// Applies an arbitrary single-site unitary u (row-major 2x2) to site j.
void apply_site_gate(StateVector& state, int site, const std::array<cplx, 4>& u);

// The kick-layer 2x2 in closed form; shared by the kick and perturbation
// gates and by the dense oracle tests.
std::array<cplx, 4> kick_matrix(double h_x, double h_z);

}  // namespace kisim
