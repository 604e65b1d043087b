#pragma once

#include "hirota/types.hpp"

namespace hirota {

// Unitary m x m pair with u v = q v u and u^m = v^m = 1.
// Convention fixed to the shift/clock representation: u has ones on the first
// superdiagonal wrapping at position (m,1), v = diag(1, q, ..., q^(m-1)).
struct WeylPair {
  Mat u;
  Mat v;
  RootOfUnity root;
};

WeylPair clock_shift(const RootOfUnity& root);

// u^i v^j with indices reduced mod m; {e_ij} is orthonormal for the plain
// normalized trace product.
Mat basis_element(int i, int j, const WeylPair& pair);

// identity^(j-1) (x) op (x) identity^(2N-j), site j in 1..2N (site 1 is the
// most significant Kronecker factor).
Mat embed(int site, const Mat& op, const ChainGeometry& geom);

// Plain normalized trace product tr(A^dag B)/dim.  The local operator basis is
// orthonormal under this form.
cx hs_dot(const Mat& a, const Mat& b);

// Hilbert-Schmidt semi-inner product: tr(A^dag B)/tr(1) - tr(A^dag)/tr(1) * tr(B)/tr(1).
// Vanishes whenever either argument is a multiple of the identity.
cx hs_inner(const Mat& a, const Mat& b);

inline double hs_norm2(const Mat& a) { return std::real(hs_inner(a, a)); }

// Invariant suite for cmd_verify: algebra relations, unitarity, Gram matrix,
// conjugate symmetry, cross-site commutation.
std::vector<CheckRecord> verify_weyl(const RootOfUnity& root, const Tolerances& tol);

}  // namespace hirota
