#pragma once

#include "hirota/aux_transfer.hpp"
#include "hirota/transfer.hpp"

namespace hirota {

// Angular domain of quasilocality: half opening angle eta*pi/(2m) around the
// positive and negative real axes, eta = min(ell, m - ell).
struct WedgeDomain {
  RootOfUnity root;
  int eta = 0;
  double half_angle = 0.0;
  bool contains(cx z) const;
};

WedgeDomain wedge_domain(const RootOfUnity& root);
bool wedge_predicate(cx z, const RootOfUnity& root);

// X(lambda) = Lambda_s(lambda)^{-N} T(lambda q^{1/2}) T'(lambda q^{-1/2}),
// T' the derivative of the transfer matrix in its own argument.
struct QuasilocalCharge {
  cx lambda;
  cx kappa;
  RootOfUnity root;
  ChainOperator op;
};

QuasilocalCharge build_charge(cx lambda, cx kappa, const RootOfUnity& root,
                              const ChainGeometry& geom, const MemoryGuard& guard = {});

// Parity automorphism u -> u^{-1}, v -> v^{-1} on every site, realized by
// conjugation with the product of local index-reversal permutations.
Mat parity_transform(const Mat& a, const ChainGeometry& geom, const RootOfUnity& root);

// Closed-form Hilbert-Schmidt kernel (real kappa).
cx hs_kernel(cx lambda, cx mu, double kappa, const RootOfUnity& root);

enum class FactorizedEigenpair { Singlet, Triplet };

// Kernel from the auxiliary-transfer derivative expression; independent of the
// closed form.  Derivatives of the 16x16 construction are exact polynomial
// derivatives in the second/fourth spectral slots.
cx hs_kernel_from_aux(cx lambda, cx mu, double kappa, const RootOfUnity& root,
                      FactorizedEigenpair kind = FactorizedEigenpair::Singlet);

struct ExtensivityRow {
  int n_half = 0;
  double x_norm2 = 0.0;       // brute-force ||X(lambda)||^2_HS
  double n_kernel = 0.0;      // N * K(lambda, lambda)
  double deviation = 0.0;     // |x_norm2 - n_kernel|
  bool in_wedge = false;
};

std::vector<ExtensivityRow> extensivity_study(cx lambda, double kappa, const RootOfUnity& root,
                                              const std::vector<int>& n_half_list,
                                              const MemoryGuard& guard = {});

// <X(lambda), X(mu)> by brute force at one size.
cx charge_overlap(cx lambda, cx mu, double kappa, const RootOfUnity& root, int n_half,
                  const MemoryGuard& guard = {});

struct ScanRecord {
  double r = 0.0;
  double phi = 0.0;
  std::array<double, 6> abs_eigenvalues{};  // sorted descending
  double tau = 0.0;                         // |Lambda_s|^2
  bool tau_leading = false;
  double gap_observable = 0.0;              // 1 - tau / spectral radius
  bool solver_ok = true;
};

std::vector<ScanRecord> wedge_scan(const RootOfUnity& root, double kappa,
                                   const std::vector<double>& r_list, int phi_count,
                                   int workers = 2);

// Bisection of the leading-flag transition in phi at fixed radius, started
// from the predicted wedge interior/exterior.
double locate_wedge_boundary(const RootOfUnity& root, double kappa, double r,
                             double tol = 1e-5);

std::vector<CheckRecord> verify_quasilocality(const RootOfUnity& root, const Tolerances& tol);

}  // namespace hirota
