#pragma once

#include <Eigen/Dense>

#include "kisim/dynamics.hpp"
#include "kisim/observables.hpp"
#include "kisim/state.hpp"

// Dense-matrix oracle built from explicit Kronecker products and Hermitian
// eigendecomposition exponentials. Deliberately shares no kernels with the
// bitwise simulator so it can adjudicate every gate convention independently.
// Intended for L <= 8.
namespace kisim::dense {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

Mat pauli(Axis axis);
Mat kron(const Mat& a, const Mat& b);

// Operator acting as op2 on site j and identity elsewhere, under the
// convention that amplitude index bit j encodes site j.
Mat site_op(int n_sites, int site, const Mat& op2);
Mat sum_sites(int n_sites, const Mat& op2);

// sum_j sz_j sz_{j+1} with periodic closure.
Mat zz_coupling(int n_sites);

// exp(-i factor H) for Hermitian H.
Mat expm_hermitian(const Mat& h, double factor);

// One Floquet period (kick first, then Ising layer), its deliberately
// wrong-order variant for convention-sensitivity tests, and a generalization
// with a sigma^y field component.
Mat floquet_matrix(int n_sites, const KickedIsingParams& params);
Mat floquet_matrix_swapped(int n_sites, const KickedIsingParams& params);
Mat floquet_matrix_xyz(int n_sites, double j_z, double h_x, double h_y, double h_z);

// U exp(-i delta M), M = sum_j sx_j.
Mat perturbed_matrix(int n_sites, const KickedIsingParams& params, double delta);

// Dense form of a bound observable, including its per_sqrt_L factor.
Mat observable_matrix(const ObservableSpec& obs);

Vec to_vector(const StateVector& state);
StateVector from_vector(int n_sites, const Vec& v);

// Compares gate-based evolution, C_M(t), and F(t) against the dense results.
struct OracleReport {
  double dev_state = 0.0;        // max amplitude deviation after t steps (U and U_delta)
  double dev_correlation = 0.0;  // max deviation of exact-mode C_M(t)/L
  double dev_fidelity = 0.0;     // max deviation of exact-mode F(t)
  double worst() const;
};
OracleReport oracle_check(int n_sites, const KickedIsingParams& params, double delta,
                          int t_steps);

}  // namespace kisim::dense
