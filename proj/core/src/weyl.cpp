#include "hirota/weyl.hpp"

#include <numbers>
#include <random>

namespace hirota {

WeylPair clock_shift(const RootOfUnity& root) {
  const int m = root.m;
  WeylPair p;
  p.root = root;
  p.u = Mat::Zero(m, m);
  p.v = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    p.u(i, (i + 1) % m) = 1.0;
    // exact phase, never accumulated products
    p.v(i, i) = std::polar(1.0, std::numbers::pi * root.ell * i / static_cast<double>(root.m));
  }
  return p;
}

Mat basis_element(int i, int j, const WeylPair& pair) {
  const int m = pair.root.m;
  const int ii = ((i % m) + m) % m;
  const int jj = ((j % m) + m) % m;
  Mat e = Mat::Identity(m, m);
  for (int k = 0; k < ii; ++k) e = pair.u * e;
  for (int k = 0; k < jj; ++k) e = e * pair.v;
  return e;
}

Mat embed(int site, const Mat& op, const ChainGeometry& geom) {
  if (site < 1 || site > geom.n_sites) {
    throw ValidationError("embed: site " + std::to_string(site) + " out of range 1.." +
                          std::to_string(geom.n_sites));
  }
  const Eigen::Index m = op.rows();
  if (op.cols() != m) throw ValidationError("embed: local operator must be square");
  Eigen::Index left = 1;
  for (int k = 1; k < site; ++k) left *= m;
  Eigen::Index right = 1;
  for (int k = site; k < geom.n_sites; ++k) right *= m;
  if (left * m * right != geom.dim_total) {
    throw ValidationError("embed: local dimension does not match geometry");
  }
  Mat out = Mat::Zero(geom.dim_total, geom.dim_total);
  for (Eigen::Index l = 0; l < left; ++l) {
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) {
        const cx val = op(a, b);
        if (val == cx(0.0)) continue;
        const Eigen::Index row0 = (l * m + a) * right;
        const Eigen::Index col0 = (l * m + b) * right;
        for (Eigen::Index r = 0; r < right; ++r) out(row0 + r, col0 + r) = val;
      }
    }
  }
  return out;
}

cx hs_dot(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError("hs_dot: dimension mismatch");
  }
  return (a.conjugate().cwiseProduct(b)).sum() / static_cast<double>(a.rows());
}

cx hs_inner(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError("hs_inner: dimension mismatch");
  }
  const double dim = static_cast<double>(a.rows());
  const cx tra = a.trace();
  const cx trb = b.trace();
  return hs_dot(a, b) - std::conj(tra) * trb / (dim * dim);
}

std::vector<CheckRecord> verify_weyl(const RootOfUnity& root, const Tolerances& tol) {
  std::vector<CheckRecord> out;
  const int m = root.m;
  const std::string tag = "weyl.m" + std::to_string(m) + ".";
  WeylPair p = clock_shift(root);

  out.push_back(make_check(tag + "uv_qvu", (p.u * p.v - root.q * p.v * p.u).norm(), tol.local));
  Mat um = Mat::Identity(m, m);
  Mat vm = Mat::Identity(m, m);
  for (int k = 0; k < m; ++k) {
    um = um * p.u;
    vm = vm * p.v;
  }
  out.push_back(make_check(tag + "u_pow_m", (um - Mat::Identity(m, m)).norm(), tol.local));
  out.push_back(make_check(tag + "v_pow_m", (vm - Mat::Identity(m, m)).norm(), tol.local));
  out.push_back(make_check(tag + "u_unitary",
                           (p.u * p.u.adjoint() - Mat::Identity(m, m)).norm(), tol.local));
  out.push_back(make_check(tag + "v_unitary",
                           (p.v * p.v.adjoint() - Mat::Identity(m, m)).norm(), tol.local));

  // Gram matrix of all m^2 basis elements under the plain trace product
  double gram_resid = 0.0;
  std::vector<Mat> basis;
  basis.reserve(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) basis.push_back(basis_element(i, j, p));
  for (std::size_t a = 0; a < basis.size(); ++a) {
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const cx g = hs_dot(basis[a], basis[b]);
      const cx want = (a == b) ? cx(1.0) : cx(0.0);
      gram_resid = std::max(gram_resid, std::abs(g - want));
    }
  }
  out.push_back(make_check(tag + "basis_gram", gram_resid, tol.local));

  // conjugate symmetry of hs_inner on random operators
  std::mt19937_64 rng(97 + m);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_mat = [&](int d) {
    Mat r(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) r(i, j) = cx(gauss(rng), gauss(rng));
    return r;
  };
  double sym_resid = 0.0;
  for (int rep = 0; rep < 4; ++rep) {
    Mat a = random_mat(m), b = random_mat(m);
    sym_resid = std::max(sym_resid, std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))));
  }
  out.push_back(make_check(tag + "hs_conj_symmetric", sym_resid, tol.local));

  // embedded operators at distinct sites commute (all local basis pairs, 2N=4)
  ChainGeometry g = make_geometry(2, m);
  double comm_resid = 0.0;
  for (const Mat& a : {p.u, p.v}) {
    for (const Mat& b : {p.u, p.v}) {
      Mat a1 = embed(1, a, g);
      Mat b3 = embed(3, b, g);
      comm_resid = std::max(comm_resid, (a1 * b3 - b3 * a1).norm());
    }
  }
  out.push_back(make_check(tag + "embed_commute", comm_resid, tol.chain));
  return out;
}

}  // namespace hirota
