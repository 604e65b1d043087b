#pragma once

#include "hirota/weyl.hpp"

namespace hirota {

// Spectral-parameter staggering of the monodromy product.  The default
// assigns lambda*kappa to odd sites and lambda/kappa to even sites; the
// swapped convention exists as a debugging aid.
enum class Stagger { OddTimesKappa, EvenTimesKappa };

// Lax operator on V (x) H_j as a 2x2 array of m x m blocks:
//   (0,0) = u, (0,1) = lambda v, (1,0) = -lambda v^{-1}, (1,1) = u^{-1}.
struct LaxOperator {
  int site = 0;
  cx lambda;
  std::array<std::array<Mat, 2>, 2> blocks;
};

LaxOperator lax(int site, cx lambda, const WeylPair& pair);

// Dense 2m x 2m realization on V (x) H (auxiliary index major).
Mat lax_full(cx lambda, const WeylPair& pair);

// T(lambda) = tr_V [ L_{2N}(s_{2N} lambda) ... L_1(s_1 lambda) ] expanded over
// closed auxiliary paths.  Every path contributes a fixed generalized
// permutation (a Kronecker string of u, u^{-1}, v, v^{-1}) times
// coeff * lambda^p, where p counts the off-diagonal auxiliary steps.  All
// lambda-derivatives are exact polynomial derivatives of the path weights,
// and the 2^{2N}-term expansion never touches the (2 m^{2N})-dimensional
// space V (x) H^{2N}.
class TransferTable {
 public:
  TransferTable(const ChainGeometry& geom, const WeylPair& pair, cx kappa,
                Stagger stagger = Stagger::OddTimesKappa);

  const ChainGeometry& geometry() const { return geom_; }
  cx kappa() const { return kappa_; }

  // Dense d^n T / d lambda^n at the given lambda.
  Mat dense(cx lambda, int deriv_order, const MemoryGuard& guard) const;

  // d^n T / d lambda^n (lambda) * B without materializing the transfer matrix.
  Mat apply(cx lambda, int deriv_order, const Mat& b, const MemoryGuard& guard,
            int workers = 2) const;

  // tr d^n T / d lambda^n (lambda); only the two all-diagonal paths survive at n=0.
  cx trace(cx lambda, int deriv_order) const;

  // || d^n T / d lambda^n |_0 ||^2_HS from the path weights alone (the strings
  // are HS-orthonormal), used as the scaling probe's cross-check.
  double derivative_norm2_at_zero(int deriv_order) const;

  struct Path {
    std::uint32_t mask;      // auxiliary state bits beta_0 .. beta_{2N-1}
    int power;               // lambda exponent
    cx coeff;                // sign * kappa^{net exponent}
  };
  const std::vector<Path>& paths() const { return paths_; }

 private:
  ChainGeometry geom_;
  RootOfUnity root_;
  cx kappa_;
  Stagger stagger_;
  std::vector<Path> paths_;
  // per path: column -> row map and column phases (lambda independent)
  std::vector<std::vector<Eigen::Index>> rows_;
  std::vector<std::vector<cx>> phases_;
};

Mat transfer_dense(cx lambda, cx kappa, const ChainGeometry& geom, const WeylPair& pair,
                   const MemoryGuard& guard = {}, Stagger stagger = Stagger::OddTimesKappa);

Mat transfer_derivative(cx lambda, cx kappa, const ChainGeometry& geom, const WeylPair& pair,
                        int order, const MemoryGuard& guard = {},
                        Stagger stagger = Stagger::OddTimesKappa);

// Frobenius residual of L_j(lambda/kappa) L_{j-1}(lambda kappa) r(kappa^2, w_j)
//  - r(kappa^2, w_j) L_j(lambda kappa) L_{j-1}(lambda/kappa)  on V (x) H (x) H.
double check_intertwining(cx lambda, cx kappa, const WeylPair& pair);

struct ScalingProbe {
  std::vector<std::pair<int, double>> norms;  // (N, ||d^n T|_0||^2_HS)
  double slope = 0.0;                         // log-log fit vs N
};

// Brute-force || d^n T / d lambda^n |_0 ||^2 over a list of half-sizes.
ScalingProbe derivative_scaling_probe(int order, cx kappa, const RootOfUnity& root,
                                      const std::vector<int>& n_half_list,
                                      const MemoryGuard& guard = {});

std::vector<CheckRecord> verify_transfer(const RootOfUnity& root, int n_half, cx kappa,
                                         const Tolerances& tol);

}  // namespace hirota
