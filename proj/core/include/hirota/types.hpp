#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace hirota {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Thrown on invalid model parameters (bad root of unity, site out of range, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a requested dense computation would exceed the configured memory cap.
class MemoryCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a formula is evaluated at a pole / singular parameter point.
class SingularParameterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deformation parameter q = exp(i*pi*ell/m), m odd, ell even, 0 < ell < m.
// The square root is fixed on the principal branch, q_half = exp(i*pi*ell/(2m)).
struct RootOfUnity {
  int ell = 0;
  int m = 0;
  cx q;
  cx q_half;
};

RootOfUnity make_root(int ell, int m);

// Periodic chain of 2N physical sites, each carrying an m-dimensional space.
struct ChainGeometry {
  int n_half = 0;   // N
  int n_sites = 0;  // 2N
  Eigen::Index dim_total = 0;  // m^(2N)
};

ChainGeometry make_geometry(int n_half, int m);

// Tolerance pair: algebraic identities at local dimension vs full-chain dimension.
struct Tolerances {
  double local = 1e-12;
  double chain = 1e-9;
};

// Guard consulted before any m^(2N) x m^(2N) allocation.
struct MemoryGuard {
  std::size_t cap_bytes = 4'000'000'000;  // default 4 GB

  static std::size_t dense_bytes(const ChainGeometry& g) {
    return static_cast<std::size_t>(g.dim_total) * static_cast<std::size_t>(g.dim_total) *
           sizeof(cx);
  }
  void require(const ChainGeometry& g, int n_matrices) const;
};

// Dense operator on the full chain space together with its geometry.
struct ChainOperator {
  Mat matrix;
  ChainGeometry geometry;
};

// One row of a verification report (cmd_verify and the module invariant suites).
struct CheckRecord {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline CheckRecord make_check(const std::string& name, double residual, double tolerance) {
  return CheckRecord{name, residual, tolerance, residual <= tolerance};
}

// Deterministic parallel map: results land at their index regardless of schedule.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace hirota
