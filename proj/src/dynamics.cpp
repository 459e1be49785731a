#include "kisim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kisim/parallel.hpp"

namespace kisim {

namespace {

constexpr std::size_t kExactChunks = 256;

// Runs `row_fn(initial_state) -> values over t = 0..t_max` for every averaged
// initial state and combines rows in a fixed order. Exact mode accumulates
// per fixed chunk of the basis; stochastic mode keeps one row per sample and
// attaches standard errors.
template <typename RowFn>
TimeSeries averaged_series(int n_sites, int t_max, const TraceAverageSpec& avg,
                           const RowFn& row_fn) {
  TimeSeries series;
  const std::size_t nt = static_cast<std::size_t>(t_max) + 1;
  series.times.resize(nt);
  for (int t = 0; t <= t_max; ++t) series.times[static_cast<std::size_t>(t)] = t;
  series.values.assign(nt, cplx{0.0, 0.0});
  series.stderrs.assign(nt, 0.0);

  if (avg.mode == TraceAverageSpec::Mode::exact_basis_sum) {
    if (n_sites > avg.exact_cap) {
      throw std::invalid_argument("exact trace requested above the L cap (" +
                                  std::to_string(avg.exact_cap) + ")");
    }
    const std::size_t n = std::size_t{1} << n_sites;
    const std::size_t chunks = std::min(kExactChunks, n);
    std::vector<std::vector<cplx>> partial(chunks);
    parallel_for_index(chunks, [&](std::size_t c) {
      const std::size_t begin = c * n / chunks;
      const std::size_t end = (c + 1) * n / chunks;
      std::vector<cplx> acc(nt, cplx{0.0, 0.0});
      for (std::size_t b = begin; b < end; ++b) {
        std::vector<cplx> row = row_fn(StateVector::basis(n_sites, b));
        for (std::size_t t = 0; t < nt; ++t) acc[t] += row[t];
      }
      partial[c] = std::move(acc);
    });
    for (std::size_t c = 0; c < chunks; ++c) {
      for (std::size_t t = 0; t < nt; ++t) series.values[t] += partial[c][t];
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& v : series.values) v *= inv;
    return series;
  }

  const int n = avg.n_samples;
  if (n < 1) throw std::invalid_argument("stochastic averaging requires n_samples >= 1");
  std::vector<std::vector<cplx>> rows(static_cast<std::size_t>(n));
  parallel_for_index(static_cast<std::size_t>(n), [&](std::size_t s) {
    rows[s] = row_fn(StateVector::random(n_sites, derive_stream_seed(avg.seed, s)));
  });
  for (std::size_t t = 0; t < nt; ++t) {
    cplx mean{0.0, 0.0};
    for (int s = 0; s < n; ++s) mean += rows[static_cast<std::size_t>(s)][t];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (int s = 0; s < n; ++s) var += std::norm(rows[static_cast<std::size_t>(s)][t] - mean);
    series.values[t] = mean;
    series.stderrs[t] = n > 1 ? std::sqrt(var / (static_cast<double>(n - 1) * n)) : 0.0;
  }
  return series;
}

void fill_common_meta(SeriesMeta& meta, const KickedIsingParams& params, int n_sites,
                      const TraceAverageSpec& avg) {
  meta.params = params;
  meta.L = n_sites;
  meta.mode = avg.mode == TraceAverageSpec::Mode::exact_basis_sum ? "exact" : "stochastic";
  meta.n_samples = avg.mode == TraceAverageSpec::Mode::exact_basis_sum ? 0 : avg.n_samples;
  meta.seed = avg.seed;
}

}  // namespace

TimeSeries correlation_series(const KickedIsingParams& params, const ObservableSpec& obs,
                              int t_max, const TraceAverageSpec& avg) {
  if (t_max < 1) throw std::invalid_argument("correlation_series: t_max must be >= 1");
  const int L = obs.n_sites;
  auto row_fn = [&](const StateVector& init) {
    StateVector psi = init;
    StateVector phi = apply_observable(psi, obs);
    std::vector<cplx> row(static_cast<std::size_t>(t_max) + 1);
    for (int t = 0;; ++t) {
      row[static_cast<std::size_t>(t)] = inner_product(psi, apply_observable(phi, obs));
      if (t == t_max) break;
      floquet_step(psi, params);
      floquet_step(phi, params);
    }
    return row;
  };
  TimeSeries series = averaged_series(L, t_max, avg, row_fn);
  series.meta.kind = "correlation";
  series.meta.observable = obs.name;
  fill_common_meta(series.meta, params, L, avg);
  if (obs.normalization == Normalization::per_L) {
    const double inv = 1.0 / static_cast<double>(L);
    for (auto& v : series.values) v *= inv;
    for (auto& e : series.stderrs) e *= inv;
    series.meta.values_per_site = true;
  }
  return series;
}

TimeSeries fidelity_series(const KickedIsingParams& params, int n_sites, double delta,
                           int t_max, const TraceAverageSpec& avg, bool symmetrized) {
  if (t_max < 1) throw std::invalid_argument("fidelity_series: t_max must be >= 1");
  auto row_fn = [&](const StateVector& init) {
    StateVector ref = init;   // U^t (or U_{-delta/2}^t) branch
    StateVector pert = init;  // U_delta^t (or U_{+delta/2}^t) branch
    std::vector<cplx> row(static_cast<std::size_t>(t_max) + 1);
    for (int t = 0;; ++t) {
      row[static_cast<std::size_t>(t)] = inner_product(pert, ref);
      if (t == t_max) break;
      if (symmetrized) {
        perturbed_floquet_step(ref, params, -delta, true);
        perturbed_floquet_step(pert, params, delta, true);
      } else {
        floquet_step(ref, params);
        perturbed_floquet_step(pert, params, delta);
      }
    }
    return row;
  };
  TimeSeries series = averaged_series(n_sites, t_max, avg, row_fn);
  series.meta.kind = "fidelity";
  series.meta.delta = delta;
  series.meta.symmetrized = symmetrized;
  fill_common_meta(series.meta, params, n_sites, avg);
  return series;
}

StateVector apply_time_averaged(const StateVector& state, const KickedIsingParams& params,
                                const ObservableSpec& obs, int T) {
  if (T < 1) throw std::invalid_argument("time averaging requires T >= 1");
  StateVector phi = state;                      // U^t |psi>
  StateVector acc = apply_observable(phi, obs); // U^t sum_{t'<=t} A_{t'} |psi>
  for (int t = 1; t < T; ++t) {
    floquet_step(phi, params);
    floquet_step(acc, params);
    StateVector a_phi = apply_observable(phi, obs);
    auto* dst = acc.amplitudes().data();
    const auto* src = a_phi.amplitudes().data();
    for (std::size_t i = 0; i < acc.size(); ++i) dst[i] += src[i];
  }
  for (int t = 1; t < T; ++t) floquet_step_inverse(acc, params);
  const double inv = 1.0 / static_cast<double>(T);
  for (auto& a : acc.amplitudes()) a *= inv;
  return acc;
}

MomentEstimates time_averaged_moments(const KickedIsingParams& params, const ObservableSpec& obs,
                                      int T, int k_max, const TraceAverageSpec& avg) {
  if (k_max < 1 || k_max > 2) throw std::invalid_argument("time-averaged moments support k_max in {1, 2}");
  const int L = obs.n_sites;
  struct Sample { double m2, m4; };
  auto sample_fn = [&](const StateVector& init) {
    Sample s{0.0, 0.0};
    StateVector g = apply_time_averaged(init, params, obs, T);
    s.m2 = inner_product(g, g).real();  // <psi|Abar^2|psi> = ||Abar psi||^2
    if (k_max >= 2) {
      StateVector g2 = apply_time_averaged(g, params, obs, T);
      s.m4 = inner_product(g2, g2).real();
    }
    return s;
  };

  std::vector<Sample> samples;
  if (avg.mode == TraceAverageSpec::Mode::exact_basis_sum) {
    if (L > avg.exact_cap) {
      throw std::invalid_argument("exact trace requested above the L cap (" +
                                  std::to_string(avg.exact_cap) + ")");
    }
    const std::size_t n = std::size_t{1} << L;
    samples.resize(n);
    parallel_for_index(n, [&](std::size_t b) { samples[b] = sample_fn(StateVector::basis(L, b)); });
  } else {
    if (avg.n_samples < 1) throw std::invalid_argument("stochastic averaging requires n_samples >= 1");
    samples.resize(static_cast<std::size_t>(avg.n_samples));
    parallel_for_index(samples.size(), [&](std::size_t s) {
      samples[s] = sample_fn(StateVector::random(L, derive_stream_seed(avg.seed, s)));
    });
  }

  MomentEstimates out;
  const double n = static_cast<double>(samples.size());
  const bool exact = avg.mode == TraceAverageSpec::Mode::exact_basis_sum;
  for (int k = 1; k <= k_max; ++k) {
    double mean = 0.0;
    for (const auto& s : samples) mean += (k == 1 ? s.m2 : s.m4);
    mean /= n;
    double var = 0.0;
    for (const auto& s : samples) {
      const double d = (k == 1 ? s.m2 : s.m4) - mean;
      var += d * d;
    }
    out.moments.push_back(mean);
    out.stderrs.push_back(!exact && samples.size() > 1
                              ? std::sqrt(var / ((n - 1.0) * n))
                              : 0.0);
  }
  if (k_max >= 2 && out.moments[0] != 0.0) {
    out.ratio = out.moments[1] / (out.moments[0] * out.moments[0]);
  }
  return out;
}

SeriesStats estimate_statistics(const TimeSeries& series, double c_noise) {
  const int t_max = series.t_max();
  if (t_max < 1) throw std::invalid_argument("estimate_statistics: series too short");
  const std::size_t nt = series.values.size();
  SeriesStats st;

  // Tail plateau and its (conservative) standard error: tail values at
  // different t share samples and are correlated, so the per-t errors are
  // averaged rather than reduced by the window length.
  const std::size_t tail_begin = static_cast<std::size_t>(t_max) / 2;
  double d_acc = 0.0, e_acc = 0.0;
  for (std::size_t t = tail_begin; t < nt; ++t) {
    d_acc += series.values[t].real();
    e_acc += series.stderrs.empty() ? 0.0 : series.stderrs[t];
  }
  const double tail_len = static_cast<double>(nt - tail_begin);
  st.D_A = d_acc / tail_len;
  st.D_stderr = e_acc / tail_len;
  double tail_var = 0.0;
  for (std::size_t t = tail_begin; t < nt; ++t) {
    const double r = series.values[t].real() - st.D_A;
    tail_var += r * r;
  }
  const double tail_resid = std::sqrt(tail_var / std::max(1.0, tail_len - 1.0));

  // Mixing time on C - D over the first half of the series.
  const std::size_t t_half = static_cast<std::size_t>(t_max) / 2;
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t <= t_half; ++t) {
    const double a = std::abs(series.values[t] - st.D_A);
    num += static_cast<double>(t) * a;
    den += a;
  }
  st.t_mix_defined = den > 0.0;
  st.t_mix = st.t_mix_defined ? num / den : 0.0;
  st.low_confidence = st.t_mix_defined && static_cast<double>(t_max) < 10.0 * st.t_mix;

  // Integrated correlation sum, tail-subtracted and truncated.
  std::size_t t_cut = t_half;
  if (st.t_mix_defined && st.t_mix > 0.0) {
    t_cut = std::min(t_cut, static_cast<std::size_t>(std::ceil(20.0 * st.t_mix)));
  }
  st.S_A = 0.5 * series.values[0].real();
  for (std::size_t t = 1; t <= t_cut; ++t) st.S_A += series.values[t].real() - st.D_A;

  // Approach time: exponential fit on block means of |C - D| so the log is
  // not dominated by near-zero oscillation dips.
  const double noise = 3.0 * std::max(st.D_stderr, tail_resid);
  constexpr std::size_t kBlock = 4;
  std::vector<double> centers, logs;
  for (std::size_t lo = 1; lo + kBlock <= t_half + 1; lo += kBlock) {
    double m = 0.0;
    for (std::size_t t = lo; t < lo + kBlock; ++t) m += std::abs(series.values[t] - st.D_A);
    m /= static_cast<double>(kBlock);
    if (m > noise && m > 0.0) {
      centers.push_back(static_cast<double>(lo) + (kBlock - 1) * 0.5);
      logs.push_back(std::log(m));
    }
  }
  if (centers.size() >= 3) {
    const double n = static_cast<double>(centers.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      sx += centers[i];
      sy += logs[i];
      sxx += centers[i] * centers[i];
      sxy += centers[i] * logs[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (slope < 0.0) {
      st.t_ave = -1.0 / slope;
      st.t_ave_defined = true;
    }
  }

  // Regime call against the finite-size plateau scale.
  const double n_dim = series.meta.L > 0 ? std::ldexp(1.0, series.meta.L) : 0.0;
  const double floor_scale = n_dim > 0.0 ? 3.0 * c_noise / n_dim : 0.0;
  const double bound = std::max(3.0 * st.D_stderr, floor_scale);
  const double mag = std::abs(st.D_A);
  if (st.D_stderr > mag && st.D_stderr > std::abs(st.S_A)) {
    st.regime = Regime::unresolved;  // non-convergent tail
  } else if (bound > 0.0 && mag < bound) {
    st.regime = Regime::ergodic;
  } else if (bound == 0.0 ? mag > 0.0 : mag > 10.0 * bound) {
    st.regime = Regime::non_ergodic;
  } else {
    st.regime = Regime::unresolved;
  }
  st.s_divergent = st.regime == Regime::non_ergodic;
  return st;
}

}  // namespace kisim
