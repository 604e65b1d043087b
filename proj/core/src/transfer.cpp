#include "hirota/transfer.hpp"

#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "hirota/dynamics.hpp"

namespace hirota {

LaxOperator lax(int site, cx lambda, const WeylPair& pair) {
  LaxOperator l;
  l.site = site;
  l.lambda = lambda;
  l.blocks[0][0] = pair.u;
  l.blocks[0][1] = lambda * pair.v;
  l.blocks[1][0] = -lambda * pair.v.adjoint();
  l.blocks[1][1] = pair.u.adjoint();
  return l;
}

Mat lax_full(cx lambda, const WeylPair& pair) {
  const int m = pair.root.m;
  Mat out = Mat::Zero(2 * m, 2 * m);
  const LaxOperator l = lax(1, lambda, pair);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out.block(a * m, b * m, m, m) = l.blocks[a][b];
  return out;
}

namespace {

// local operator kinds selected by one auxiliary step
enum LocalKind : int { kU = 0, kUInv = 1, kV = 2, kVInv = 3 };

inline LocalKind kind_for(int beta_row, int beta_col) {
  if (beta_row == 0 && beta_col == 0) return kU;
  if (beta_row == 1 && beta_col == 1) return kUInv;
  if (beta_row == 0 && beta_col == 1) return kV;
  return kVInv;
}

}  // namespace

TransferTable::TransferTable(const ChainGeometry& geom, const WeylPair& pair, cx kappa,
                             Stagger stagger)
    : geom_(geom), root_(pair.root), kappa_(kappa), stagger_(stagger) {
  const int n_sites = geom.n_sites;
  if (n_sites > 30) throw ValidationError("TransferTable: chain too long for the path expansion");
  const std::uint32_t n_paths = 1u << n_sites;
  const int m = root_.m;

  paths_.reserve(n_paths);
  for (std::uint32_t mask = 0; mask < n_paths; ++mask) {
    Path p;
    p.mask = mask;
    p.power = 0;
    int kappa_exp = 0;
    double sign = 1.0;
    for (int j = 1; j <= n_sites; ++j) {
      const int beta_col = (mask >> ((j - 1) % n_sites)) & 1;  // beta_{j-1}
      const int beta_row = (mask >> (j % n_sites)) & 1;        // beta_j, beta_{2N} = beta_0
      const LocalKind k = kind_for(beta_row, beta_col);
      if (k == kV || k == kVInv) {
        ++p.power;
        const bool odd_site = (j % 2 == 1);
        const bool times_kappa =
            (stagger_ == Stagger::OddTimesKappa) ? odd_site : !odd_site;
        kappa_exp += times_kappa ? 1 : -1;
        if (k == kVInv) sign = -sign;
      }
    }
    p.coeff = sign * std::pow(kappa_, kappa_exp);
    paths_.push_back(p);
  }

  // column -> row maps and phases per path
  rows_.resize(paths_.size());
  phases_.resize(paths_.size());
  std::vector<int> digits(n_sites);
  for (std::size_t pi = 0; pi < paths_.size(); ++pi) {
    const std::uint32_t mask = paths_[pi].mask;
    auto& rows = rows_[pi];
    auto& phases = phases_[pi];
    rows.resize(geom.dim_total);
    phases.resize(geom.dim_total);
    std::vector<LocalKind> kinds(n_sites + 1);
    for (int j = 1; j <= n_sites; ++j) {
      const int beta_col = (mask >> ((j - 1) % n_sites)) & 1;
      const int beta_row = (mask >> (j % n_sites)) & 1;
      kinds[j] = kind_for(beta_row, beta_col);
    }
    for (Eigen::Index col = 0; col < geom.dim_total; ++col) {
      Eigen::Index rest = col;
      for (int j = n_sites; j >= 1; --j) {  // site 2N is least significant? no: site 1 most significant
        digits[j - 1] = static_cast<int>(rest % m);
        rest /= m;
      }
      // site 1 is the most significant digit, so digits[0] belongs to site 1
      Eigen::Index row = 0;
      double ang = 0.0;
      for (int j = 1; j <= n_sites; ++j) {
        const int a = digits[j - 1];
        int b = a;
        switch (kinds[j]) {
          case kU: b = (a + m - 1) % m; break;
          case kUInv: b = (a + 1) % m; break;
          case kV: ang += root_.ell * a; break;
          case kVInv: ang -= root_.ell * a; break;
        }
        row = row * m + b;
      }
      rows[col] = row;
      phases[col] = std::polar(1.0, std::numbers::pi * ang / static_cast<double>(m));
    }
  }
}

namespace {

// d^n/d lambda^n of lambda^p : p!/(p-n)! lambda^{p-n}
cx monomial_derivative(int p, int n, cx lambda) {
  if (n > p) return 0.0;
  double fac = 1.0;
  for (int k = 0; k < n; ++k) fac *= (p - k);
  if (p - n == 0) return fac;
  return fac * std::pow(lambda, p - n);
}

}  // namespace

Mat TransferTable::dense(cx lambda, int deriv_order, const MemoryGuard& guard) const {
  guard.require(geom_, 1);
  Mat out = Mat::Zero(geom_.dim_total, geom_.dim_total);
  for (std::size_t pi = 0; pi < paths_.size(); ++pi) {
    const cx w = paths_[pi].coeff * monomial_derivative(paths_[pi].power, deriv_order, lambda);
    if (w == cx(0.0)) continue;
    const auto& rows = rows_[pi];
    const auto& phases = phases_[pi];
    for (Eigen::Index col = 0; col < geom_.dim_total; ++col) {
      out(rows[col], col) += w * phases[col];
    }
  }
  return out;
}

Mat TransferTable::apply(cx lambda, int deriv_order, const Mat& b, const MemoryGuard& guard,
                         int workers) const {
  if (b.rows() != geom_.dim_total) throw ValidationError("TransferTable::apply: dimension mismatch");
  guard.require(geom_, 1);
  const Eigen::Index dim = geom_.dim_total;
  Mat out = Mat::Zero(dim, b.cols());
  std::vector<std::pair<std::size_t, cx>> active;
  for (std::size_t pi = 0; pi < paths_.size(); ++pi) {
    const cx w = paths_[pi].coeff * monomial_derivative(paths_[pi].power, deriv_order, lambda);
    if (w != cx(0.0)) active.emplace_back(pi, w);
  }
  parallel_for(static_cast<std::size_t>(b.cols()), workers, [&](std::size_t c) {
    const cx* bc = b.col(static_cast<Eigen::Index>(c)).data();
    cx* oc = out.col(static_cast<Eigen::Index>(c)).data();
    for (const auto& [pi, w] : active) {
      const auto& rows = rows_[pi];
      const auto& phases = phases_[pi];
      for (Eigen::Index x = 0; x < dim; ++x) {
        oc[rows[x]] += w * phases[x] * bc[x];
      }
    }
  });
  return out;
}

cx TransferTable::trace(cx lambda, int deriv_order) const {
  cx tr = 0.0;
  for (std::size_t pi = 0; pi < paths_.size(); ++pi) {
    const cx w = paths_[pi].coeff * monomial_derivative(paths_[pi].power, deriv_order, lambda);
    if (w == cx(0.0)) continue;
    const auto& rows = rows_[pi];
    const auto& phases = phases_[pi];
    cx s = 0.0;
    for (Eigen::Index col = 0; col < geom_.dim_total; ++col) {
      if (rows[col] == col) s += phases[col];
    }
    tr += w * s;
  }
  return tr;
}

double TransferTable::derivative_norm2_at_zero(int deriv_order) const {
  // Distinct paths give HS-orthonormal traceless strings, so the squared HS
  // norm is the sum of squared weights of the paths with power == order.
  double fac = 1.0;
  for (int k = 2; k <= deriv_order; ++k) fac *= k;
  double total = 0.0;
  for (const auto& p : paths_) {
    if (p.power != deriv_order) continue;
    total += std::norm(fac * p.coeff);
  }
  return total;
}

Mat transfer_dense(cx lambda, cx kappa, const ChainGeometry& geom, const WeylPair& pair,
                   const MemoryGuard& guard, Stagger stagger) {
  return TransferTable(geom, pair, kappa, stagger).dense(lambda, 0, guard);
}

Mat transfer_derivative(cx lambda, cx kappa, const ChainGeometry& geom, const WeylPair& pair,
                        int order, const MemoryGuard& guard, Stagger stagger) {
  if (order < 1) throw ValidationError("transfer_derivative: order must be >= 1");
  return TransferTable(geom, pair, kappa, stagger).dense(lambda, order, guard);
}

double check_intertwining(cx lambda, cx kappa, const WeylPair& pair) {
  const int m = pair.root.m;
  const Eigen::Index d = 2 * m * m;
  const cx kappa2 = kappa * kappa;
  // two physical sites (j-1, j); L_{j-1} acts on the first, L_j on the second
  auto lift = [&](const Mat& local2, int which) {
    // auxiliary (2) major, then H_{j-1} (x) H_j
    Mat out = Mat::Zero(d, d);
    const Mat id = Mat::Identity(m, m);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        Mat phys;
        if (which == 0)
          phys = Eigen::kroneckerProduct(local2.block(a * m, b * m, m, m), id).eval();
        else
          phys = Eigen::kroneckerProduct(id, local2.block(a * m, b * m, m, m)).eval();
        out.block(a * m * m, b * m * m, m * m, m * m) = phys;
      }
    return out;
  };
  const Mat lj_over = lift(lax_full(lambda / kappa, pair), 1);
  const Mat ljm_times = lift(lax_full(lambda * kappa, pair), 0);
  const Mat lj_times = lift(lax_full(lambda * kappa, pair), 1);
  const Mat ljm_over = lift(lax_full(lambda / kappa, pair), 0);
  // w_j = (u v) (x) (u v^{-1}) on the two physical sites, identity on V
  const Mat uv = pair.u * pair.v;
  const Mat uvinv = pair.u * pair.v.adjoint();
  const Mat w2 = Eigen::kroneckerProduct(uv, uvinv).eval();
  const Mat r2 = r_matrix(kappa2, w2, pair.root);
  const Mat r_lift = Eigen::kroneckerProduct(Mat::Identity(2, 2), r2).eval();
  const Mat lhs = lj_over * ljm_times * r_lift;
  const Mat rhs = r_lift * lj_times * ljm_over;
  return (lhs - rhs).norm();
}

ScalingProbe derivative_scaling_probe(int order, cx kappa, const RootOfUnity& root,
                                      const std::vector<int>& n_half_list,
                                      const MemoryGuard& guard) {
  if (order < 1) throw ValidationError("derivative_scaling_probe: order must be >= 1");
  ScalingProbe probe;
  const WeylPair pair = clock_shift(root);
  for (int n_half : n_half_list) {
    const ChainGeometry geom = make_geometry(n_half, root.m);
    guard.require(geom, 1);
    TransferTable table(geom, pair, kappa);
    const Mat d = table.dense(0.0, order, guard);
    probe.norms.emplace_back(n_half, hs_norm2(d));
  }
  // least-squares slope of log(norm^2) vs log(N)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& [n, v] : probe.norms) {
    if (v <= 0.0) continue;
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(v);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++cnt;
  }
  probe.slope = (cnt >= 2) ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : 0.0;
  return probe;
}

std::vector<CheckRecord> verify_transfer(const RootOfUnity& root, int n_half, cx kappa,
                                         const Tolerances& tol) {
  std::vector<CheckRecord> out;
  const std::string tag =
      "transfer.m" + std::to_string(root.m) + ".N" + std::to_string(n_half) + ".";
  const ChainGeometry geom = make_geometry(n_half, root.m);
  const WeylPair pair = clock_shift(root);
  const MemoryGuard guard;
  TransferTable table(geom, pair, kappa);

  // T(0) identity and its HS norm
  const Mat t0 = table.dense(0.0, 0, guard);
  auto [i_even, i_odd] = trivial_charges(geom, pair);
  const Mat oe = i_odd * i_even;
  out.push_back(make_check(tag + "T0_identity", (t0 - oe - oe * oe).norm(), tol.chain));
  out.push_back(make_check(tag + "T0_norm2_eq_2", std::abs(hs_norm2(t0) - 2.0), tol.chain));

  // conservation and commuting family at fixed spectral points
  const bool real_kappa = std::abs(kappa.imag()) < 1e-14;
  const Propagator prop = build_propagator(geom, pair, kappa, real_kappa);
  const cx l1(0.7, 0.0), l2(0.3, 0.2);
  const Mat t1 = table.dense(l1, 0, guard);
  const Mat t2 = table.dense(l2, 0, guard);
  out.push_back(make_check(tag + "UT_commute",
                           (prop.u_full * t1 - t1 * prop.u_full).norm() / t1.norm(), tol.chain));
  out.push_back(make_check(tag + "TT_commute", (t1 * t2 - t2 * t1).norm() / (t1.norm() * t2.norm()),
                           tol.chain));

  // first derivative against a central finite difference
  const double h = 1e-4;
  const Mat fd = (table.dense(l1 + h, 0, guard) - table.dense(l1 - h, 0, guard)) / (2 * h);
  const Mat ex = table.dense(l1, 1, guard);
  out.push_back(make_check(tag + "dT_finite_difference", (fd - ex).norm() / ex.norm(), 1e-6));

  // intertwining relation on two sites
  out.push_back(make_check(tag + "intertwining",
                           check_intertwining(cx(0.4) * std::polar(1.0, std::numbers::pi / 7),
                                              kappa, pair),
                           tol.chain * 10));
  return out;
}

}  // namespace hirota
