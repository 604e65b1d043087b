#pragma once

#include <array>
#include <optional>

#include "hirota/types.hpp"

namespace hirota {

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Mat6 = Eigen::Matrix<cx, 6, 6>;
using Mat16 = Eigen::Matrix<cx, 16, 16>;
using Vec4 = Eigen::Vector4cd;
using Vec6 = Eigen::Matrix<cx, 6, 1>;
using Vec16 = Eigen::Matrix<cx, 16, 1>;

// Operator-basis exponent 4-tuple (i,j,k,l) in Z_m^4.
struct Key4 {
  std::array<int, 4> v{0, 0, 0, 0};
  bool is_zero() const { return v[0] == 0 && v[1] == 0 && v[2] == 0 && v[3] == 0; }
};
bool operator==(const Key4& a, const Key4& b);
bool operator<(const Key4& a, const Key4& b);
Key4 key_mod(std::array<int, 4> raw, int m);
Key4 key_add(const Key4& a, const Key4& b, int m);
Key4 key_sub(const Key4& a, const Key4& b, int m);
Key4 key_neg(const Key4& a, int m);

// One of the eight nonzero components of the staggered Lax operator
// L_2(lambda/kappa) L_1(lambda kappa) in the operator basis.  The 2x2 matrix
// is coeff * lambda^degree * |bra_row><bra_col| and is independent of m.
struct StaggeredComponent {
  Key4 key;           // with m-1 entries written for the given m
  int row = 0, col = 0;
  int degree = 0;     // power of lambda
  cx coeff;           // includes the kappa factor and sign
};

std::vector<StaggeredComponent> staggered_components_list(cx kappa, int m);

// Dense 2x2 value (zero if the key is not among the eight).
Mat2 staggered_component(const Key4& key, cx lambda, cx kappa, int m);
Mat2 staggered_component_dlambda(const Key4& key, cx lambda, cx kappa, int m);

// Keys reachable as the sum of two staggered keys; support of the double Lax.
std::vector<Key4> double_lax_support(int m);

// Double Lax component on V (x) V:
//   sum over splittings key' + key'' = key of
//   q^{(i'-i)j' + (k'-k)l'}  L^{[key']}(lambda1) (x) L^{[key'']}(lambda2).
Mat4 double_lax(const Key4& key, cx lambda1, cx lambda2, const RootOfUnity& root, cx kappa);
// Derivative in the second spectral slot.
Mat4 double_lax_d2(const Key4& key, cx lambda1, cx lambda2, const RootOfUnity& root, cx kappa);

// Eigenvalues of the leading component L_0(lambda1,lambda2).
cx lambda_singlet(cx lambda1, cx lambda2, cx kappa);
cx lambda_triplet(cx lambda1, cx lambda2, cx kappa);
// One-argument forms at the factorized spectrals (lambda q^{1/2}, lambda q^{-1/2}).
cx lambda_singlet(cx lambda, cx kappa);
Vec4 psi_singlet();
Vec4 psi_triplet();

// 16x16 auxiliary transfer matrix, entrywise conjugate on the first factor:
//   T = sum_keys conj(L[key](l1,l2)) (x) L[key](m1,m2).
Mat16 aux_transfer(cx l1, cx l2, cx m1, cx m2, const RootOfUnity& root, cx kappa);
// Mixed derivative sum_keys conj(d2 L[key](l1,l2)) (x) d2 L[key](m1,m2); the
// conjugated factor realizes the antiholomorphic derivative of the entries.
Mat16 aux_transfer_dxy(cx l1, cx l2, cx m1, cx m2, const RootOfUnity& root, cx kappa);
Mat16 aux_transfer_dx(cx l1, cx l2, cx m1, cx m2, const RootOfUnity& root, cx kappa);
Mat16 aux_transfer_dy(cx l1, cx l2, cx m1, cx m2, const RootOfUnity& root, cx kappa);

// Charge-conserving subspace n1+n2 == n3+n4 of V^(x)4 in lexicographic order:
// |0000>, |0101>, |0110>, |1001>, |1010>, |1111>.
const std::array<int, 6>& reduced_basis_indices();

struct ReducedAux {
  cx lambda, mu;
  cx kappa;
  RootOfUnity root;
  Mat6 matrix;
  double complement_residual = 0.0;  // largest entry outside the 6-dim block
};

// T(lambda q^½, lambda q^-½, mu q^½, mu q^-½) restricted to the 6-dim block.
// Throws if the 10-dim complement fails to vanish.
ReducedAux reduce_aux(cx lambda, cx mu, const RootOfUnity& root, cx kappa,
                      double complement_tol = 1e-9);

struct ReducedEigensystem {
  Vec6 values;
  Eigen::Matrix<cx, 6, 6> right;       // columns
  Eigen::Matrix<cx, 6, 6> left;        // columns x with x^T M = value x^T
  std::array<double, 6> condition;     // 1/|x^T r| for unit x, r
  bool near_defective = false;
};

ReducedEigensystem reduced_eigensystem(const ReducedAux& red, double defect_threshold = 1e8);

// Closed forms tau_1, tau_2, tau_3, tau of the q-independent eigenvalues
// (real kappa).
std::array<cx, 4> reduced_closed_form_eigenvalues(cx lambda, cx mu, double kappa);

struct FactorizationCheck {
  double max_component_residual;  // max over nonzero keys of |L[key] psi_s|
  double eigen_residual;          // |T Psi_s - tau Psi_s|
};
FactorizationCheck check_factorization(cx lambda, cx mu, const RootOfUnity& root, cx kappa);

// |[T^(r)(lambda,mu;kappa), T^(r)(lambda,mu;kappa')]|_F
double check_kappa_commutation(cx lambda, cx mu, const RootOfUnity& root, double kappa,
                               double kappa_prime);

// Anti-diagonal permutation on the reduced block, and the restriction of
// P (x) P with P = -sigma_y (x) sigma_y (they coincide in this basis).
Mat6 parity_antidiagonal();
Mat6 parity_restriction();

std::vector<CheckRecord> verify_aux_transfer(const RootOfUnity& root, const Tolerances& tol);

}  // namespace hirota
