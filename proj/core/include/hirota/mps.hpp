#pragma once

#include "hirota/quasilocality.hpp"

namespace hirota {

// (L_0(lambda q^1/2, lambda q^-1/2) / Lambda_s(lambda))^n; converges to the
// rank-1 singlet projector inside the wedge.
Mat4 singlet_projector_limit(cx lambda, double kappa, const RootOfUnity& root, int n);

// Thermodynamic-limit HS projection of X(lambda) onto the basis string with
// double-site keys k_1..k_r (k_1 carries the spectral derivative and sits at
// the rightmost factor / lowest lattice cell):
//   <psi_s| L^[k_r] ... L^[k_2] d2 L^[k_1] |psi_s> / Lambda_s(lambda)^r .
cx mps_coefficient(cx lambda, const std::vector<Key4>& keys, double kappa,
                   const RootOfUnity& root);

struct MpsString {
  std::vector<Key4> keys;  // keys[0] = k_1 (derivative cell)
  cx coefficient;
};

struct MpsTable {
  cx lambda;
  double kappa;
  RootOfUnity root;
  int r_max = 0;
  std::vector<MpsString> strings;  // nonzero coefficients, lexicographically sorted
};

// Enumerates anchored strings (k_1 != 0 and k_r != 0, both drawn from the
// double-Lax support) for r = 2..r_max and keeps coefficients above prune_tol.
MpsTable build_mps_table(cx lambda, double kappa, const RootOfUnity& root, int r_max,
                         double prune_tol = 1e-14);

// Dense chain operator of the basis string at cells 1..r (cell alpha = sites
// 2alpha-1, 2alpha carrying e_{i,j} and e_{k,l}), shifted by `shift_cells`
// double-site cells with periodic wrap.
Mat basis_string_dense(const std::vector<Key4>& keys, int shift_cells, const ChainGeometry& geom,
                       const RootOfUnity& root);

// sum_strings coeff * sum_{j=0}^{N-1} S^j(string); S shifts by two sites.
Mat assemble_truncated(const MpsTable& table, const ChainGeometry& geom,
                       const MemoryGuard& guard = {});

struct DecayRow {
  int r = 0;
  double weight = 0.0;  // sum over key strings at this support of |coeff|^2
};

struct DecayProfile {
  std::vector<DecayRow> rows;
  double gamma = 0.0;  // fitted exponential decay rate of the weights
};

// Per-support-size HS weight through the 16x16 contraction
//   <Psi_s| M_edge M^{r-2} D_edge |Psi_s> / |Lambda_s|^{2r},
// M the equal-spectral auxiliary transfer matrix, the edge factors excluding
// the zero key; no key enumeration involved.
DecayProfile decay_profile(cx lambda, double kappa, const RootOfUnity& root, int r_max);

std::vector<CheckRecord> verify_mps(const RootOfUnity& root, const Tolerances& tol);

}  // namespace hirota
