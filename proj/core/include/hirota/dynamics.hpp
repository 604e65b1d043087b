#pragma once

#include "hirota/weyl.hpp"

namespace hirota {

// w_j = u_{j-1} v_{j-1} u_j v_j^{-1}, site 0 identified with site 2N.
// Neighbouring variables obey w_{j-1} w_j = q^2 w_j w_{j-1}; all others commute.
Mat build_w(int j, const ChainGeometry& geom, const WeylPair& pair);

// Coefficients of the finite sum r(kappa^2, w) = sum_k c_k w^k,
// k = -(m-1)/2 .. (m-1)/2, c_0 = 1,
// c_k = prod_{l=1}^{|k|} (kappa^2 q^{1-l} - q^{l-1}) / (kappa^2 q^l - q^{-l}).
std::vector<cx> r_matrix_coefficients(cx kappa2, const RootOfUnity& root);

// Evaluates the sum on any invertible w (two-site operator or full chain operator).
Mat r_matrix(cx kappa2, const Mat& w, const RootOfUnity& root);

// Scales r by the positive constant making it unitary.  Requires r r^dag
// proportional to the identity (real kappa); otherwise reports the deviation.
Mat unitarize_r(const Mat& r, double proportionality_tol = 1e-10);

struct Propagator {
  Mat u_even;
  Mat u_odd;
  Mat u_full;  // u_even * u_odd
  cx kappa;
  ChainGeometry geometry;
};

// U = prod_n r(kappa^2, w_{2n}) * prod_n r(kappa^2, w_{2n-1}); factors inside
// each product commute.  With unitarize=true (requires real kappa) every local
// factor is rescaled to a unitary.
Propagator build_propagator(const ChainGeometry& geom, const WeylPair& pair, cx kappa,
                            bool unitarize);

// Heisenberg step: U^{-1} w U.
Mat step_conjugate(const Mat& w, const Propagator& prop);

// f(w) = (1 + kappa^2 w)(kappa^2 + w)^{-1}, evaluated through a linear solve.
Mat apply_f(cx kappa2, const Mat& w);

// One step of the closed-form map: even sublattice first from time-t data,
// then the odd sublattice using the already-updated even variables.
// ws[0..2N-1] holds w_1..w_{2N}; updated in place.
void step_closed_form(std::vector<Mat>& ws, cx kappa2, const RootOfUnity& root);

// I_even = prod_n w_{2n}, I_odd = prod_n w_{2n-1}.
std::pair<Mat, Mat> trivial_charges(const ChainGeometry& geom, const WeylPair& pair);

struct FloquetHamiltonians {
  Mat h_even;
  Mat h_odd;
  double max_phase_defect;  // | exp(-iH) - U | over both halves
};

// H = i sum_n log r(kappa^2, w_n) with the principal matrix logarithm per
// local factor.  Refuses when a factor has an eigenvalue on the branch cut.
FloquetHamiltonians floquet_hamiltonians(const Propagator& prop, const ChainGeometry& geom,
                                         const WeylPair& pair);

// m=3 closed form: log r = 1/3 log[(1+2a)(1-a)^2] * 1 + 1/3 log[(1+2a)/(1-a)] * (w + w^{-1})
// with a = (kappa^2 - 1)/(kappa^2 q - q^{-1}).
cx appendix_a_alpha(cx kappa2, const RootOfUnity& root);
Mat appendix_a_log_r(cx kappa2, const Mat& w, const RootOfUnity& root);

std::vector<CheckRecord> verify_dynamics(const RootOfUnity& root, int n_half, cx kappa,
                                         const Tolerances& tol);

}  // namespace hirota
