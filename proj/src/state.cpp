#include "kisim/state.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "kisim/parallel.hpp"

namespace kisim {

namespace {
constexpr std::size_t kReduceChunks = 256;
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1], u2 in [0, 1): 53-bit uniforms from the top of splitmix64.
  double u1 = 1.0 - static_cast<double>(splitmix64_next(state_) >> 11) * 0x1.0p-53;
  double u2 = static_cast<double>(splitmix64_next(state_) >> 11) * 0x1.0p-53;
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

StateVector::StateVector(int n_sites, std::vector<cplx> amplitudes)
    : n_sites_(n_sites), amps_(std::move(amplitudes)) {
  if (n_sites_ < 2) throw std::invalid_argument("StateVector: n_sites must be >= 2");
  if (amps_.size() != (std::size_t{1} << n_sites_)) {
    throw std::invalid_argument("StateVector: amplitude count must be 2^n_sites");
  }
}

StateVector StateVector::basis(int n_sites, std::uint64_t index) {
  if (n_sites < 2) throw std::invalid_argument("StateVector: n_sites must be >= 2");
  std::vector<cplx> amps(std::size_t{1} << n_sites, cplx{0.0, 0.0});
  if (index >= amps.size()) throw std::invalid_argument("StateVector: basis index out of range");
  amps[index] = cplx{1.0, 0.0};
  return StateVector(n_sites, std::move(amps));
}

StateVector StateVector::random(int n_sites, RngSeed seed) {
  if (n_sites < 2) throw std::invalid_argument("StateVector: n_sites must be >= 2");
  const std::size_t n = std::size_t{1} << n_sites;
  std::vector<cplx> amps(n);
  GaussianStream g(seed);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double re = g.next();
    double im = g.next();
    amps[i] = cplx{re, im};
    norm2 += re * re + im * im;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& a : amps) a *= inv;
  return StateVector(n_sites, std::move(amps));
}

double StateVector::norm() const {
  double acc = 0.0;
  for (const auto& a : amps_) acc += std::norm(a);
  return std::sqrt(acc);
}

void apply_zz_layer(StateVector& state, double j_z) {
  const int L = state.n_sites();
  const std::uint64_t mask = (std::uint64_t{1} << L) - 1;
  // Bond phase table indexed by the number of anti-aligned bonds d:
  // sum_j s_j s_{j+1} = L - 2d.
  std::vector<cplx> phase(static_cast<std::size_t>(L) + 1);
  for (int d = 0; d <= L; ++d) {
    double angle = -j_z * static_cast<double>(L - 2 * d);
    phase[static_cast<std::size_t>(d)] = cplx{std::cos(angle), std::sin(angle)};
  }
  auto* amps = state.amplitudes().data();
  parallel_for(state.size(), 4096, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::uint64_t idx = i;
      std::uint64_t rot = ((idx >> 1) | ((idx & 1) << (L - 1))) & mask;
      int d = std::popcount(idx ^ rot);
      amps[i] *= phase[static_cast<std::size_t>(d)];
    }
  });
}

void apply_site_gate(StateVector& state, int site, const std::array<cplx, 4>& u) {
  const int L = state.n_sites();
  if (site < 0 || site >= L) throw std::invalid_argument("apply_site_gate: site out of range");
  const std::size_t low = std::size_t{1} << site;
  const std::size_t pair_block = low << 1;
  auto* amps = state.amplitudes().data();
  // Ranges aligned to whole (i, i+low) pair blocks stay independent.
  parallel_for(state.size(), std::max<std::size_t>(pair_block, 4096),
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t base = begin; base < end; base += pair_block) {
                   for (std::size_t off = 0; off < low; ++off) {
                     const std::size_t i0 = base + off;
                     const std::size_t i1 = i0 + low;
                     const cplx a0 = amps[i0];
                     const cplx a1 = amps[i1];
                     amps[i0] = u[0] * a0 + u[1] * a1;
                     amps[i1] = u[2] * a0 + u[3] * a1;
                   }
                 }
               });
}

std::array<cplx, 4> kick_matrix(double h_x, double h_z) {
  const double h = std::hypot(h_x, h_z);
  if (h == 0.0) {
    return {cplx{1.0, 0.0}, cplx{0.0, 0.0}, cplx{0.0, 0.0}, cplx{1.0, 0.0}};
  }
  const double c = std::cos(h);
  const double s = std::sin(h) / h;
  return {cplx{c, -s * h_z}, cplx{0.0, -s * h_x},
          cplx{0.0, -s * h_x}, cplx{c, s * h_z}};
}

void apply_kick_layer(StateVector& state, double h_x, double h_z) {
  if (h_x == 0.0 && h_z == 0.0) return;
  const std::array<cplx, 4> u = kick_matrix(h_x, h_z);
  for (int j = 0; j < state.n_sites(); ++j) apply_site_gate(state, j, u);
}

void floquet_step(StateVector& state, const KickedIsingParams& params) {
  apply_kick_layer(state, params.h_x, params.h_z);
  apply_zz_layer(state, params.j_z);
}

void floquet_step_inverse(StateVector& state, const KickedIsingParams& params) {
  apply_zz_layer(state, -params.j_z);
  apply_kick_layer(state, -params.h_x, -params.h_z);
}

void apply_perturbation_kick(StateVector& state, double delta) {
  if (delta == 0.0) return;
  const std::array<cplx, 4> u = kick_matrix(delta, 0.0);
  for (int j = 0; j < state.n_sites(); ++j) apply_site_gate(state, j, u);
}

void perturbed_floquet_step(StateVector& state, const KickedIsingParams& params,
                            double delta, bool symmetrized) {
  apply_perturbation_kick(state, symmetrized ? delta * 0.5 : delta);
  floquet_step(state, params);
}

cplx inner_product(const StateVector& a, const StateVector& b) {
  if (a.n_sites() != b.n_sites()) {
    throw std::invalid_argument("inner_product: dimension mismatch");
  }
  const std::size_t n = a.size();
  const std::size_t chunks = std::min(kReduceChunks, n);
  std::vector<cplx> partial(chunks, cplx{0.0, 0.0});
  const auto* pa = a.amplitudes().data();
  const auto* pb = b.amplitudes().data();
  parallel_for_index(chunks, [&](std::size_t c) {
    const std::size_t begin = c * n / chunks;
    const std::size_t end = (c + 1) * n / chunks;
    cplx acc{0.0, 0.0};
    for (std::size_t i = begin; i < end; ++i) acc += std::conj(pa[i]) * pb[i];
    partial[c] = acc;
  });
  cplx total{0.0, 0.0};
  for (const auto& p : partial) total += p;
  return total;
}

}  // namespace kisim
