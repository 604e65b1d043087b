#include "hirota/types.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

namespace hirota {

RootOfUnity make_root(int ell, int m) {
  if (m <= 0 || m % 2 == 0) {
    throw ValidationError("make_root: order m must be a positive odd integer, got m=" +
                          std::to_string(m));
  }
  if (ell <= 0) {
    throw ValidationError("make_root: ell must be positive, got ell=" + std::to_string(ell));
  }
  if (ell % 2 != 0) {
    throw ValidationError("make_root: ell must be even, got ell=" + std::to_string(ell));
  }
  if (ell >= m) {
    throw ValidationError("make_root: require ell < m, got ell=" + std::to_string(ell) +
                          ", m=" + std::to_string(m));
  }
  RootOfUnity r;
  r.ell = ell;
  r.m = m;
  const double pi = std::numbers::pi;
  r.q = std::polar(1.0, pi * static_cast<double>(ell) / static_cast<double>(m));
  r.q_half = std::polar(1.0, pi * static_cast<double>(ell) / (2.0 * static_cast<double>(m)));
  return r;
}

ChainGeometry make_geometry(int n_half, int m) {
  if (n_half <= 0) {
    throw ValidationError("make_geometry: N must be positive, got N=" + std::to_string(n_half));
  }
  ChainGeometry g;
  g.n_half = n_half;
  g.n_sites = 2 * n_half;
  // m^(2N) with overflow check
  long double dim = 1.0L;
  for (int i = 0; i < g.n_sites; ++i) dim *= m;
  if (dim > 1e17L) {
    throw ValidationError("make_geometry: m^(2N) overflows a practical index range");
  }
  Eigen::Index d = 1;
  for (int i = 0; i < g.n_sites; ++i) d *= m;
  g.dim_total = d;
  return g;
}

void MemoryGuard::require(const ChainGeometry& g, int n_matrices) const {
  const long double need =
      static_cast<long double>(g.dim_total) * static_cast<long double>(g.dim_total) *
      sizeof(cx) * n_matrices;
  if (need > static_cast<long double>(cap_bytes)) {
    throw MemoryCapError("memory cap exceeded: need ~" + std::to_string(static_cast<double>(need)) +
                         " bytes for " + std::to_string(n_matrices) + " dense operator(s) at dim " +
                         std::to_string(g.dim_total) + ", cap is " + std::to_string(cap_bytes));
  }
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t nthreads = std::min<std::size_t>(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::atomic<std::size_t> next{0};
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace hirota
