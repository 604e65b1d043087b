#include "hirota/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace hirota {

Mat build_w(int j, const ChainGeometry& geom, const WeylPair& pair) {
  if (j < 1 || j > geom.n_sites) {
    throw ValidationError("build_w: index " + std::to_string(j) + " out of range 1.." +
                          std::to_string(geom.n_sites));
  }
  const int prev = (j == 1) ? geom.n_sites : j - 1;
  const Mat uv = pair.u * pair.v;
  const Mat uvinv = pair.u * pair.v.adjoint();  // v unitary, v^{-1} = v^dag
  return embed(prev, uv, geom) * embed(j, uvinv, geom);
}

std::vector<cx> r_matrix_coefficients(cx kappa2, const RootOfUnity& root) {
  const int half = (root.m - 1) / 2;
  std::vector<cx> c(half + 1);
  c[0] = 1.0;
  for (int l = 1; l <= half; ++l) {
    const cx qp = std::pow(root.q, l);
    const cx qm = std::pow(root.q, -l);
    const cx den = kappa2 * qp - qm;
    if (std::abs(den) < 1e-14) {
      throw SingularParameterError(
          "r_matrix: singular coefficient denominator kappa^2 q^l - q^{-l} at l=" +
          std::to_string(l) + " for kappa^2 = (" + std::to_string(kappa2.real()) + "," +
          std::to_string(kappa2.imag()) + ")");
    }
    c[l] = c[l - 1] * (kappa2 * qm * root.q - qp / root.q) / den;
  }
  return c;
}

Mat r_matrix(cx kappa2, const Mat& w, const RootOfUnity& root) {
  const auto c = r_matrix_coefficients(kappa2, root);
  const int half = (root.m - 1) / 2;
  const Eigen::Index d = w.rows();
  const Mat winv = w.adjoint();  // w unitary in every use; adjoint is the inverse
  Mat out = Mat::Identity(d, d);
  Mat wp = Mat::Identity(d, d);
  Mat wm = Mat::Identity(d, d);
  for (int k = 1; k <= half; ++k) {
    wp = wp * w;
    wm = wm * winv;
    out += c[k] * (wp + wm);  // c_k = c_{-k}
  }
  return out;
}

Mat unitarize_r(const Mat& r, double proportionality_tol) {
  const Eigen::Index d = r.rows();
  const Mat rr = r * r.adjoint();
  const double c = rr.trace().real() / static_cast<double>(d);
  const double deviation = (rr - c * Mat::Identity(d, d)).norm() / std::sqrt(static_cast<double>(d));
  if (c <= 0.0 || deviation > proportionality_tol * std::max(1.0, c)) {
    throw ValidationError(
        "unitarize_r: r r^dag is not proportional to the identity (deviation " +
        std::to_string(deviation) + "); kappa is likely not real");
  }
  return r / std::sqrt(c);
}

Propagator build_propagator(const ChainGeometry& geom, const WeylPair& pair, cx kappa,
                            bool unitarize) {
  if (unitarize && std::abs(kappa.imag()) > 1e-14) {
    throw ValidationError("build_propagator: unitarization requires real kappa");
  }
  const cx kappa2 = kappa * kappa;
  Propagator prop;
  prop.kappa = kappa;
  prop.geometry = geom;
  prop.u_even = Mat::Identity(geom.dim_total, geom.dim_total);
  prop.u_odd = Mat::Identity(geom.dim_total, geom.dim_total);
  for (int n = 1; n <= geom.n_half; ++n) {
    Mat re = r_matrix(kappa2, build_w(2 * n, geom, pair), pair.root);
    Mat ro = r_matrix(kappa2, build_w(2 * n - 1, geom, pair), pair.root);
    if (unitarize) {
      re = unitarize_r(re);
      ro = unitarize_r(ro);
    }
    prop.u_even = prop.u_even * re;
    prop.u_odd = prop.u_odd * ro;
  }
  prop.u_full = prop.u_even * prop.u_odd;
  return prop;
}

Mat step_conjugate(const Mat& w, const Propagator& prop) {
  // U is unitary when built with unitarize=true; fall back to a solve otherwise.
  const double unit_defect =
      (prop.u_full * prop.u_full.adjoint() -
       Mat::Identity(prop.u_full.rows(), prop.u_full.cols()))
          .norm();
  if (unit_defect < 1e-10) {
    return prop.u_full.adjoint() * w * prop.u_full;
  }
  return prop.u_full.partialPivLu().solve(w * prop.u_full);
}

Mat apply_f(cx kappa2, const Mat& w) {
  const Eigen::Index d = w.rows();
  const Mat num = Mat::Identity(d, d) + kappa2 * w;
  const Mat den = kappa2 * Mat::Identity(d, d) + w;
  Eigen::PartialPivLU<Mat> lu(den);
  const Mat result = lu.solve(num);  // (kappa^2 + w)^{-1} (1 + kappa^2 w); factors commute
  const double resid = (den * result - num).norm() / std::max(1.0, num.norm());
  if (resid > 1e-8) {
    throw SingularParameterError("apply_f: kappa^2 + w is numerically singular");
  }
  return result;
}

namespace {

// A * B^{-1} through a transposed solve.
Mat solve_right(const Mat& a, const Mat& b) {
  return b.transpose().partialPivLu().solve(a.transpose()).transpose();
}

}  // namespace

void step_closed_form(std::vector<Mat>& ws, cx kappa2, const RootOfUnity& root) {
  const int n_sites = static_cast<int>(ws.size());
  if (n_sites % 2 != 0 || n_sites < 4) {
    throw ValidationError("step_closed_form: need an even number >= 4 of dynamical variables");
  }
  auto at = [&](int j) -> Mat& {  // 1-based with periodic wrap
    return ws[((j - 1) % n_sites + n_sites) % n_sites];
  };
  const cx q = root.q;
  // even sublattice from time-t data
  std::vector<Mat> even_new(n_sites / 2);
  for (int n = 1; n <= n_sites / 2; ++n) {
    const Mat fp = apply_f(kappa2, q * at(2 * n + 1));
    const Mat fm = apply_f(kappa2, q * at(2 * n - 1));
    even_new[n - 1] = solve_right(fp * at(2 * n), fm);
  }
  for (int n = 1; n <= n_sites / 2; ++n) at(2 * n) = even_new[n - 1];
  // odd sublattice from the already-updated even variables
  std::vector<Mat> odd_new(n_sites / 2);
  for (int n = 0; n < n_sites / 2; ++n) {
    const int j = 2 * n + 1;
    const Mat fp = apply_f(kappa2, q * at(j + 1));
    const Mat fm = apply_f(kappa2, q * at(j - 1));
    odd_new[n] = solve_right(fp * at(j), fm);
  }
  for (int n = 0; n < n_sites / 2; ++n) at(2 * n + 1) = odd_new[n];
}

std::pair<Mat, Mat> trivial_charges(const ChainGeometry& geom, const WeylPair& pair) {
  Mat even = Mat::Identity(geom.dim_total, geom.dim_total);
  Mat odd = Mat::Identity(geom.dim_total, geom.dim_total);
  for (int n = 1; n <= geom.n_half; ++n) {
    even = even * build_w(2 * n, geom, pair);
    odd = odd * build_w(2 * n - 1, geom, pair);
  }
  return {even, odd};
}

namespace {

// Principal log with an explicit branch-cut check.
Mat principal_log_checked(const Mat& a, const char* what) {
  Eigen::ComplexEigenSolver<Mat> es(a, false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error(std::string(what) + ": eigensolver failed");
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const cx ev = es.eigenvalues()(i);
    if (std::abs(ev) < 1e-14 || (ev.real() < 0.0 && std::abs(ev.imag()) < 1e-12 * std::abs(ev))) {
      throw SingularParameterError(std::string(what) +
                                   ": eigenvalue on the principal branch cut, log refused");
    }
  }
  return a.log();
}

}  // namespace

FloquetHamiltonians floquet_hamiltonians(const Propagator& prop, const ChainGeometry& geom,
                                         const WeylPair& pair) {
  if (std::abs(prop.kappa.imag()) > 1e-14) {
    throw ValidationError("floquet_hamiltonians: requires real kappa");
  }
  const cx kappa2 = prop.kappa * prop.kappa;
  const cx iu(0.0, 1.0);
  Mat h_even = Mat::Zero(geom.dim_total, geom.dim_total);
  Mat h_odd = Mat::Zero(geom.dim_total, geom.dim_total);
  for (int n = 1; n <= geom.n_half; ++n) {
    const Mat re = unitarize_r(r_matrix(kappa2, build_w(2 * n, geom, pair), pair.root));
    const Mat ro = unitarize_r(r_matrix(kappa2, build_w(2 * n - 1, geom, pair), pair.root));
    h_even += iu * principal_log_checked(re, "floquet_hamiltonians[even]");
    h_odd += iu * principal_log_checked(ro, "floquet_hamiltonians[odd]");
  }
  FloquetHamiltonians fh;
  fh.h_even = h_even;
  fh.h_odd = h_odd;
  const Mat ee = (-iu * h_even).exp();
  const Mat eo = (-iu * h_odd).exp();
  fh.max_phase_defect = std::max((ee - prop.u_even).norm(), (eo - prop.u_odd).norm());
  return fh;
}

cx appendix_a_alpha(cx kappa2, const RootOfUnity& root) {
  if (root.m != 3) throw ValidationError("appendix_a_alpha: closed form is specific to m=3");
  return (kappa2 - 1.0) / (kappa2 * root.q - 1.0 / root.q);
}

Mat appendix_a_log_r(cx kappa2, const Mat& w, const RootOfUnity& root) {
  const cx a = appendix_a_alpha(kappa2, root);
  const Eigen::Index d = w.rows();
  const Mat winv = w.adjoint();
  const cx c_id = std::log((1.0 + 2.0 * a) * (1.0 - a) * (1.0 - a)) / 3.0;
  const cx c_w = std::log((1.0 + 2.0 * a) / (1.0 - a)) / 3.0;
  return c_id * Mat::Identity(d, d) + c_w * (w + winv);
}

std::vector<CheckRecord> verify_dynamics(const RootOfUnity& root, int n_half, cx kappa,
                                         const Tolerances& tol) {
  std::vector<CheckRecord> out;
  const std::string tag = "dynamics.m" + std::to_string(root.m) + ".N" + std::to_string(n_half) + ".";
  const ChainGeometry geom = make_geometry(n_half, root.m);
  const WeylPair pair = clock_shift(root);
  const cx q2 = root.q * root.q;
  const cx kappa2 = kappa * kappa;

  // w-algebra
  std::vector<Mat> ws(geom.n_sites);
  for (int j = 1; j <= geom.n_sites; ++j) ws[j - 1] = build_w(j, geom, pair);
  double nn = 0.0, far_comm = 0.0;
  for (int j = 1; j <= geom.n_sites; ++j) {
    const Mat& a = ws[(j + geom.n_sites - 2) % geom.n_sites];  // w_{j-1}
    const Mat& b = ws[j - 1];
    nn = std::max(nn, (a * b - q2 * b * a).norm());
    for (int k = j + 2; k <= j + geom.n_sites - 2; ++k) {
      const Mat& c = ws[(k - 1) % geom.n_sites];
      far_comm = std::max(far_comm, (b * c - c * b).norm());
    }
  }
  out.push_back(make_check(tag + "w_neighbour_q2", nn, tol.chain * 10));
  out.push_back(make_check(tag + "w_far_commute", far_comm, tol.chain * 10));

  // propagator and trivial charges
  const bool real_kappa = std::abs(kappa.imag()) < 1e-14;
  const Propagator prop = build_propagator(geom, pair, kappa, real_kappa);
  if (real_kappa) {
    out.push_back(make_check(
        tag + "U_unitary",
        (prop.u_full * prop.u_full.adjoint() - Mat::Identity(geom.dim_total, geom.dim_total)).norm(),
        tol.chain));
  }
  auto [i_even, i_odd] = trivial_charges(geom, pair);
  out.push_back(make_check(tag + "U_Ieven_commute",
                           (prop.u_full * i_even - i_even * prop.u_full).norm(), tol.chain * 10));
  out.push_back(make_check(tag + "U_Iodd_commute",
                           (prop.u_full * i_odd - i_odd * prop.u_full).norm(), tol.chain * 10));

  // one closed-form step against Heisenberg conjugation
  std::vector<Mat> ws_cf = ws;
  step_closed_form(ws_cf, kappa2, root);
  double step_resid = 0.0;
  for (int j = 1; j <= geom.n_sites; ++j) {
    step_resid = std::max(step_resid, (ws_cf[j - 1] - step_conjugate(ws[j - 1], prop)).norm());
  }
  out.push_back(make_check(tag + "closed_form_vs_conjugation", step_resid, tol.chain * 10));

  // invariance of the multiplicative charges under the closed-form map
  Mat ie1 = Mat::Identity(geom.dim_total, geom.dim_total);
  Mat io1 = Mat::Identity(geom.dim_total, geom.dim_total);
  for (int n = 1; n <= geom.n_half; ++n) {
    ie1 = ie1 * ws_cf[2 * n - 1];
    io1 = io1 * ws_cf[2 * n - 2];
  }
  out.push_back(make_check(tag + "Ieven_invariant", (ie1 - i_even).norm(), tol.chain * 10));
  out.push_back(make_check(tag + "Iodd_invariant", (io1 - i_odd).norm(), tol.chain * 10));
  return out;
}

}  // namespace hirota
