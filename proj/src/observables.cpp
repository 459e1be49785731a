#include "kisim/observables.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "kisim/parallel.hpp"

namespace kisim {

namespace {

Axis axis_from_char(char c, const std::string& token) {
  switch (c) {
    case 'x': return Axis::X;
    case 'y': return Axis::Y;
    case 'z': return Axis::Z;
    default: throw std::invalid_argument("unknown axis '" + std::string(1, c) + "' in observable token '" + token + "'");
  }
}

constexpr std::size_t kReduceChunks = 256;

}  // namespace

ObservableSpec parse_observable(const std::string& token, int n_sites) {
  ObservableSpec obs;
  obs.name = token;
  obs.n_sites = n_sites;
  if (token == "M_x" || token == "M_y" || token == "M_z") {
    Axis axis = axis_from_char(token[2], token);
    for (int j = 0; j < n_sites; ++j) {
      obs.terms.push_back(PauliString{{{j, axis}}, cplx{1.0, 0.0}});
    }
    obs.normalization = Normalization::per_L;
    return obs;
  }
  if (token.rfind("Z:", 0) == 0) {
    const std::string pattern = token.substr(2);
    if (pattern.empty()) throw std::invalid_argument("empty pattern in observable token '" + token + "'");
    if (static_cast<int>(pattern.size()) > n_sites) {
      throw std::invalid_argument("pattern longer than chain in observable token '" + token + "'");
    }
    for (int j = 0; j < n_sites; ++j) {
      PauliString ps;
      for (std::size_t k = 0; k < pattern.size(); ++k) {
        if (pattern[k] == '0') continue;
        ps.ops.emplace_back((j + static_cast<int>(k)) % n_sites, axis_from_char(pattern[k], token));
      }
      obs.terms.push_back(std::move(ps));
    }
    obs.normalization = Normalization::per_sqrt_L;
    return obs;
  }
  throw std::invalid_argument("unknown observable token '" + token + "'");
}

ObservableSpec magnetization_x(int n_sites) { return parse_observable("M_x", n_sites); }

StateVector apply_observable(const StateVector& state, const ObservableSpec& obs) {
  if (obs.n_sites != state.n_sites()) {
    throw std::invalid_argument("observable bound to different chain length");
  }
  const std::size_t n = state.size();
  std::vector<cplx> out(n, cplx{0.0, 0.0});
  const auto* in = state.amplitudes().data();
  for (const auto& term : obs.terms) {
    std::uint64_t flip_mask = 0;  // X and Y flip the bit
    std::uint64_t sign_mask = 0;  // Z and Y read the sign off the source bit
    int n_y = 0;
    for (const auto& [site, axis] : term.ops) {
      if (site < 0 || site >= state.n_sites()) {
        throw std::invalid_argument("observable site index out of range");
      }
      const std::uint64_t bit = std::uint64_t{1} << site;
      if (axis == Axis::X) flip_mask |= bit;
      if (axis == Axis::Y) { flip_mask |= bit; sign_mask |= bit; ++n_y; }
      if (axis == Axis::Z) sign_mask |= bit;
    }
    // sigma^y = i sigma^x sigma^z, so each Y contributes a global factor i.
    cplx base = term.coeff;
    for (int q = 0; q < (n_y & 3); ++q) base *= cplx{0.0, 1.0};
    auto* dst = out.data();
    parallel_for(n, 4096, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const bool neg = std::popcount(i & sign_mask) & 1;
        const cplx v = neg ? -base * in[i] : base * in[i];
        dst[i ^ flip_mask] += v;
      }
    });
  }
  if (obs.normalization == Normalization::per_sqrt_L) {
    const double f = 1.0 / std::sqrt(static_cast<double>(state.n_sites()));
    for (auto& a : out) a *= f;
  }
  return StateVector(state.n_sites(), std::move(out));
}

cplx expectation(const StateVector& state, const ObservableSpec& obs) {
  return inner_product(state, apply_observable(state, obs));
}

TraceAverage trace_average(const std::function<cplx(const StateVector&)>& fn, int n_sites,
                           const TraceAverageSpec& spec) {
  TraceAverage result;
  if (spec.mode == TraceAverageSpec::Mode::exact_basis_sum) {
    if (n_sites > spec.exact_cap) {
      throw std::invalid_argument("exact trace requested above the L cap (" +
                                  std::to_string(spec.exact_cap) + ")");
    }
    const std::size_t n = std::size_t{1} << n_sites;
    const std::size_t chunks = std::min(kReduceChunks, n);
    std::vector<cplx> partial(chunks, cplx{0.0, 0.0});
    parallel_for_index(chunks, [&](std::size_t c) {
      const std::size_t begin = c * n / chunks;
      const std::size_t end = (c + 1) * n / chunks;
      cplx acc{0.0, 0.0};
      for (std::size_t b = begin; b < end; ++b) acc += fn(StateVector::basis(n_sites, b));
      partial[c] = acc;
    });
    cplx total{0.0, 0.0};
    for (const auto& p : partial) total += p;
    result.value = total / static_cast<double>(n);
    result.stderr_est = 0.0;
    return result;
  }
  const int n = spec.n_samples;
  if (n < 1) throw std::invalid_argument("stochastic trace requires n_samples >= 1");
  std::vector<cplx> vals(static_cast<std::size_t>(n));
  parallel_for_index(static_cast<std::size_t>(n), [&](std::size_t s) {
    vals[s] = fn(StateVector::random(n_sites, derive_stream_seed(spec.seed, s)));
  });
  cplx mean{0.0, 0.0};
  for (const auto& v : vals) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const auto& v : vals) var += std::norm(v - mean);
  result.value = mean;
  result.stderr_est = n > 1 ? std::sqrt(var / (static_cast<double>(n - 1) * n)) : 0.0;
  return result;
}

double moment_test_z_observables(const std::string& pattern, int n_sites, int k,
                                 const TraceAverageSpec& spec) {
  if (k < 1 || k > 3) throw std::invalid_argument("moment order 2k supported for k in 1..3");
  const ObservableSpec obs = parse_observable("Z:" + pattern, n_sites);
  auto fn = [&](const StateVector& psi) -> cplx {
    StateVector phi = psi;
    for (int q = 0; q < k; ++q) phi = apply_observable(phi, obs);
    // <psi|Z^{2k}|psi> = ||Z^k psi||^2 for hermitian Z.
    return inner_product(phi, phi);
  };
  return trace_average(fn, n_sites, spec).value.real();
}

}  // namespace kisim
