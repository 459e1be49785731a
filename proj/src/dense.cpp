#include "kisim/dense.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace kisim::dense {

namespace {
constexpr cplx kI{0.0, 1.0};
constexpr int kMaxOracleSites = 8;
}  // namespace

Mat pauli(Axis axis) {
  Mat m(2, 2);
  switch (axis) {
    case Axis::X:
      m << cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0);
      break;
    case Axis::Y:
      m << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
      break;
    case Axis::Z:
      m << cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(-1, 0);
      break;
  }
  return m;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Mat site_op(int n_sites, int site, const Mat& op2) {
  // Index bit j encodes site j, so site 0 must be the rightmost Kronecker
  // factor: op = I_{L-1} x ... x op2 x ... x I_0.
  Mat out = Mat::Identity(1, 1);
  for (int j = n_sites - 1; j >= 0; --j) {
    out = kron(out, j == site ? op2 : Mat::Identity(2, 2));
  }
  return out;
}

Mat sum_sites(int n_sites, const Mat& op2) {
  const Eigen::Index dim = Eigen::Index(1) << n_sites;
  Mat out = Mat::Zero(dim, dim);
  for (int j = 0; j < n_sites; ++j) {
    out += site_op(n_sites, j, op2);
  }
  return out;
}

Mat zz_coupling(int n_sites) {
  const Eigen::Index dim = Eigen::Index(1) << n_sites;
  const Mat sz = pauli(Axis::Z);
  Mat out = Mat::Zero(dim, dim);
  for (int j = 0; j < n_sites; ++j) {
    out += site_op(n_sites, j, sz) * site_op(n_sites, (j + 1) % n_sites, sz);
  }
  return out;
}

Mat expm_hermitian(const Mat& h, double factor) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(h);
  const Eigen::VectorXd& evals = solver.eigenvalues();
  Vec phases(evals.size());
  for (Eigen::Index k = 0; k < evals.size(); ++k) {
    phases[k] = std::exp(-kI * factor * evals[k]);
  }
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

Mat floquet_matrix(int n_sites, const KickedIsingParams& params) {
  return floquet_matrix_xyz(n_sites, params.j_z, params.h_x, 0.0, params.h_z);
}

Mat floquet_matrix_swapped(int n_sites, const KickedIsingParams& params) {
  const Mat kick = expm_hermitian(
      params.h_x * sum_sites(n_sites, pauli(Axis::X)) +
          params.h_z * sum_sites(n_sites, pauli(Axis::Z)),
      1.0);
  const Mat ising = expm_hermitian(zz_coupling(n_sites), params.j_z);
  return kick * ising;  // Ising layer first: intentionally the wrong order.
}

Mat floquet_matrix_xyz(int n_sites, double j_z, double h_x, double h_y, double h_z) {
  const Mat kick_h = h_x * sum_sites(n_sites, pauli(Axis::X)) +
                     h_y * sum_sites(n_sites, pauli(Axis::Y)) +
                     h_z * sum_sites(n_sites, pauli(Axis::Z));
  const Mat kick = expm_hermitian(kick_h, 1.0);
  const Mat ising = expm_hermitian(zz_coupling(n_sites), j_z);
  return ising * kick;  // kick acts on the state first
}

Mat perturbed_matrix(int n_sites, const KickedIsingParams& params, double delta) {
  const Mat extra = expm_hermitian(sum_sites(n_sites, pauli(Axis::X)), delta);
  return floquet_matrix(n_sites, params) * extra;
}

Mat observable_matrix(const ObservableSpec& obs) {
  const Eigen::Index dim = Eigen::Index(1) << obs.n_sites;
  Mat out = Mat::Zero(dim, dim);
  for (const PauliString& term : obs.terms) {
    Mat factor = Mat::Identity(dim, dim);
    for (const auto& [site, axis] : term.ops) {
      factor = factor * site_op(obs.n_sites, site, pauli(axis));
    }
    out += term.coeff * factor;
  }
  if (obs.normalization == Normalization::per_sqrt_L) {
    out *= 1.0 / std::sqrt(double(obs.n_sites));
  }
  return out;
}

Vec to_vector(const StateVector& state) {
  Vec v(Eigen::Index(state.size()));
  for (std::size_t i = 0; i < state.size(); ++i) {
    v[Eigen::Index(i)] = state[i];
  }
  return v;
}

StateVector from_vector(int n_sites, const Vec& v) {
  std::vector<cplx> amps(std::size_t(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    amps[std::size_t(i)] = v[i];
  }
  return StateVector(n_sites, std::move(amps));
}

double OracleReport::worst() const {
  return std::max(dev_state, std::max(dev_correlation, dev_fidelity));
}

OracleReport oracle_check(int n_sites, const KickedIsingParams& params, double delta,
                          int t_steps) {
  if (n_sites > kMaxOracleSites) {
    throw std::invalid_argument("oracle_check: dense reference limited to 8 sites");
  }
  if (n_sites < 2 || t_steps < 1) {
    throw std::invalid_argument("oracle_check: need at least 2 sites and 1 step");
  }
  OracleReport report;
  const double dim = std::ldexp(1.0, n_sites);
  const Mat u = floquet_matrix(n_sites, params);
  const Mat u_pert = perturbed_matrix(n_sites, params, delta);

  // State propagation under U and under U_delta.
  StateVector plain = StateVector::random(n_sites, 1234);
  StateVector pert = plain;
  Vec v_plain = to_vector(plain);
  Vec v_pert = v_plain;
  for (int t = 0; t < t_steps; ++t) {
    floquet_step(plain, params);
    perturbed_floquet_step(pert, params, delta);
    v_plain = u * v_plain;
    v_pert = u_pert * v_pert;
    for (std::size_t i = 0; i < plain.size(); ++i) {
      report.dev_state = std::max(report.dev_state, std::abs(plain[i] - v_plain[Eigen::Index(i)]));
      report.dev_state = std::max(report.dev_state, std::abs(pert[i] - v_pert[Eigen::Index(i)]));
    }
  }

  // Infinite-temperature correlation of the per-site transverse magnetization.
  const ObservableSpec obs = parse_observable("M_x", n_sites);
  const Mat m = observable_matrix(obs);
  TraceAverageSpec exact;
  exact.mode = TraceAverageSpec::Mode::exact_basis_sum;
  const TimeSeries corr = correlation_series(params, obs, t_steps, exact);
  Mat heisenberg = m;  // M(t) = U^{-t} M U^t
  for (int t = 0; t <= t_steps; ++t) {
    const cplx dense_value = (heisenberg * m).trace() / dim / double(n_sites);
    report.dev_correlation =
        std::max(report.dev_correlation, std::abs(dense_value - corr.values[std::size_t(t)]));
    heisenberg = u.adjoint() * heisenberg * u;
  }

  // Fidelity F(t) = tr(U_delta^{-t} U^t) / 2^L (the simulator averages
  // <psi_pert(t)|psi_ref(t)> over initial states).
  const TimeSeries fid = fidelity_series(params, n_sites, delta, t_steps, exact);
  Mat overlap = Mat::Identity(Eigen::Index(dim), Eigen::Index(dim));
  for (int t = 0; t <= t_steps; ++t) {
    const cplx dense_value = overlap.trace() / dim;
    report.dev_fidelity =
        std::max(report.dev_fidelity, std::abs(dense_value - fid.values[std::size_t(t)]));
    overlap = u_pert.adjoint() * overlap * u;
  }
  return report;
}

}  // namespace kisim::dense
