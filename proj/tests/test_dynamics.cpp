#include "hirota/dynamics.hpp"

#include <random>

#include "gtest/gtest.h"

using namespace hirota;

namespace {

// random unitary with spectrum in the m-th roots of unity, so that w^m = 1
Mat random_root_unitary(const RootOfUnity& root, std::mt19937_64& rng) {
  const int m = root.m;
  std::normal_distribution<double> gauss;
  Mat g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = cx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Mat> qr(g);
  const Mat q = qr.householderQ();
  Mat d = Mat::Zero(m, m);
  std::uniform_int_distribution<int> pick(0, m - 1);
  for (int i = 0; i < m; ++i) d(i, i) = std::pow(root.q, pick(rng));
  return q * d * q.adjoint();
}

}  // namespace

TEST(BuildW, AlgebraRelations) {
  const auto root = make_root(2, 3);
  const auto pair = clock_shift(root);
  const auto geom = make_geometry(3, 3);  // 2N = 6 so far commutators exist
  const cx q2 = root.q * root.q;
  std::vector<Mat> ws;
  for (int j = 1; j <= 6; ++j) ws.push_back(build_w(j, geom, pair));
  EXPECT_LT((ws[0] * ws[1] - q2 * ws[1] * ws[0]).norm(), 1e-10);
  EXPECT_LT((ws[5] * ws[0] - q2 * ws[0] * ws[5]).norm(), 1e-10);  // periodic wrap
  EXPECT_LT((ws[0] * ws[2] - ws[2] * ws[0]).norm(), 1e-12);
  EXPECT_LT((ws[0] * ws[3] - ws[3] * ws[0]).norm(), 1e-12);
  // unitarity
  EXPECT_LT((ws[0] * ws[0].adjoint() - Mat::Identity(729, 729)).norm(), 1e-10);
  EXPECT_THROW(build_w(0, geom, pair), ValidationError);
  EXPECT_THROW(build_w(7, geom, pair), ValidationError);
}

TEST(BuildW, SublatticeProductsCommute) {
  const auto root = make_root(2, 3);
  const auto pair = clock_shift(root);
  const auto geom = make_geometry(2, 3);
  auto [i_even, i_odd] = trivial_charges(geom, pair);
  EXPECT_LT((i_even * i_odd - i_odd * i_even).norm(), 1e-10);
  // I_even unitary, (I_odd I_even)^m = 1
  EXPECT_LT((i_even * i_even.adjoint() - Mat::Identity(81, 81)).norm(), 1e-10);
  Mat oe = i_odd * i_even;
  Mat pw = Mat::Identity(81, 81);
  for (int k = 0; k < 3; ++k) pw = pw * oe;
  EXPECT_LT((pw - Mat::Identity(81, 81)).norm(), 1e-9);
}

TEST(RMatrix, FunctionalRelation) {
  std::mt19937_64 rng(11);
  for (int m : {3, 5, 7}) {
    const auto root = make_root(2, m);
    const Mat w = random_root_unitary(root, rng);
    const cx kappa2(1.7, 0.3);
    const Mat lhs = r_matrix(kappa2, root.q * w, root);
    const Mat rhs = r_matrix(kappa2, w / root.q, root);
    const Mat f = (kappa2 * Mat::Identity(m, m) + w)
                      .partialPivLu()
                      .solve(Mat::Identity(m, m) + kappa2 * w);
    // r(q w) = f(w) r(q^{-1} w); functions of the same w commute
    EXPECT_LT((lhs - f * rhs).norm(), 1e-12) << "m=" << m;
  }
}

TEST(RMatrix, M3ClosedFormAndKappaOne) {
  const auto root = make_root(2, 3);
  const auto pair = clock_shift(root);
  const Mat uv = pair.u * pair.v;
  const Mat uvi = pair.u * pair.v.adjoint();
  Mat w = Mat::Zero(9, 9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) w(a * 3 + c, b * 3 + d) = uv(a, b) * uvi(c, d);
  const cx kappa2(4.0, 0.0);
  const cx alpha = appendix_a_alpha(kappa2, root);
  const Mat closed = Mat::Identity(9, 9) + alpha * (w + Mat(w.adjoint()));
  EXPECT_LT((r_matrix(kappa2, w, root) - closed).norm(), 1e-12);
  // kappa^2 = 1 gives the identity
  EXPECT_LT((r_matrix(cx(1.0), w, root) - Mat::Identity(9, 9)).norm(), 1e-13);
}

TEST(RMatrix, SingularDenominatorReported) {
  const auto root = make_root(2, 3);
  // kappa^2 q - q^{-1} = 0 at kappa^2 = q^{-2}
  const cx bad = std::pow(root.q, -2);
  EXPECT_THROW(r_matrix_coefficients(bad, root), SingularParameterError);
}

TEST(UnitarizeR, ScalesToUnitary) {
  const auto root = make_root(2, 5);
  const auto pair = clock_shift(root);
  const auto geom = make_geometry(2, 5);
  const Mat w = build_w(2, geom, pair);
  const Mat r = r_matrix(cx(1.5 * 1.5), w, root);
  const Mat ru = unitarize_r(r);
  EXPECT_LT((ru * ru.adjoint() - Mat::Identity(ru.rows(), ru.cols())).norm(), 1e-12);
  // complex kappa breaks proportionality
  const Mat r_bad = r_matrix(cx(1.5, 0.7), w, root);
  EXPECT_THROW(unitarize_r(r_bad), ValidationError);
}

TEST(Propagator, UnitaryAndCommutingFactors) {
  const auto root = make_root(2, 3);
  const auto pair = clock_shift(root);
  const auto geom = make_geometry(2, 3);
  const cx kappa(2.0, 0.0);
  const auto prop = build_propagator(geom, pair, kappa, true);
  EXPECT_LT((prop.u_full * prop.u_full.adjoint() - Mat::Identity(81, 81)).norm(), 1e-12);
  // factors inside one sublattice commute
  const Mat r2 = r_matrix(kappa * kappa, build_w(2, geom, pair), root);
  const Mat r4 = r_matrix(kappa * kappa, build_w(4, geom, pair), root);
  EXPECT_LT((r2 * r4 - r4 * r2).norm(), 1e-11);
}

TEST(Steps, ClosedFormEqualsConjugation) {
  const auto root = make_root(2, 3);
  const auto pair = clock_shift(root);
  const auto geom = make_geometry(2, 3);
  const cx kappa(2.0, 0.0);
  const auto prop = build_propagator(geom, pair, kappa, true);
  std::vector<Mat> ws;
  for (int j = 1; j <= 4; ++j) ws.push_back(build_w(j, geom, pair));
  const auto ws0 = ws;

  step_closed_form(ws, kappa * kappa, root);
  for (int j = 0; j < 4; ++j) {
    EXPECT_LT((ws[j] - step_conjugate(ws0[j], prop)).norm(), 1e-9) << "site " << j + 1;
    // unitarity and algebra survive the step
    EXPECT_LT((ws[j] * ws[j].adjoint() - Mat::Identity(81, 81)).norm(), 1e-10);
  }
  const cx q2 = root.q * root.q;
  EXPECT_LT((ws[0] * ws[1] - q2 * ws[1] * ws[0]).norm(), 1e-9);

  // second step composes to conjugation by U^2
  step_closed_form(ws, kappa * kappa, root);
  const Mat u2 = prop.u_full * prop.u_full;
  for (int j = 0; j < 4; ++j) {
    EXPECT_LT((ws[j] - u2.adjoint() * ws0[j] * u2).norm(), 1e-9);
  }
}

TEST(Steps, KappaOneFreezes) {
  const auto root = make_root(2, 3);
  const auto pair = clock_shift(root);
  const auto geom = make_geometry(2, 3);
  std::vector<Mat> ws;
  for (int j = 1; j <= 4; ++j) ws.push_back(build_w(j, geom, pair));
  const auto ws0 = ws;
  step_closed_form(ws, cx(1.0), root);
  for (int j = 0; j < 4; ++j) EXPECT_LT((ws[j] - ws0[j]).norm(), 1e-12);
}

TEST(Floquet, HamiltoniansReproducePropagator) {
  const auto root = make_root(2, 3);
  const auto pair = clock_shift(root);
  const auto geom = make_geometry(2, 3);
  const auto prop = build_propagator(geom, pair, cx(2.0, 0.0), true);
  const auto fh = floquet_hamiltonians(prop, geom, pair);
  EXPECT_LT(fh.max_phase_defect, 1e-10);
  EXPECT_LT((fh.h_even - fh.h_even.adjoint()).norm(), 1e-10);  // hermitian for real kappa
  // kappa = 1 gives H = 0
  const auto prop1 = build_propagator(geom, pair, cx(1.0, 0.0), true);
  const auto fh1 = floquet_hamiltonians(prop1, geom, pair);
  EXPECT_LT(fh1.h_even.norm(), 1e-10);
  EXPECT_LT(fh1.h_odd.norm(), 1e-10);
  // complex kappa refused
  EXPECT_THROW(build_propagator(geom, pair, cx(1.0, 0.5), true), ValidationError);
}

TEST(AppendixA, PowersRecursion) {
  // W^{n+1} = 2 B(n) 1 + (A(n)+B(n)) W with A(1)=0, A(2)=2, B(1)=B(2)=1
  const auto root = make_root(2, 3);
  const auto pair = clock_shift(root);
  const auto geom = make_geometry(2, 3);
  const Mat w = build_w(2, geom, pair);
  const Mat W = w + Mat(w.adjoint());
  std::vector<double> A{0, 0, 2}, B{0, 1, 1};  // 1-based
  for (int n = 2; n <= 8; ++n) {
    A.push_back(2 * B[n]);
    B.push_back(A[n] + B[n]);
  }
  Mat Wp = W;
  for (int n = 1; n <= 8; ++n) {
    Wp = Wp * W;  // W^{n+1}
    const Mat want = 2 * B[n] * Mat::Identity(81, 81) + (A[n] + B[n]) * W;
    EXPECT_LT((Wp - want).norm(), 1e-9) << "n=" << n;
  }
}

TEST(AppendixA, ClosedFormLogMatchesPrincipalLog) {
  const auto root = make_root(2, 3);
  const auto pair = clock_shift(root);
  const Mat uv = pair.u * pair.v;
  const Mat uvi = pair.u * pair.v.adjoint();
  Mat w(9, 9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) w(a * 3 + c, b * 3 + d) = uv(a, b) * uvi(c, d);
  for (double kap : {0.5, 2.0}) {
    const cx kappa2(kap * kap, 0.0);
    const Mat r = r_matrix(kappa2, w, root);
    const Mat closed = appendix_a_log_r(kappa2, w, root);
    // unitarize, take the principal log, shift back by the scale
    const double scale = (r * r.adjoint()).trace().real() / 9.0;
    const Mat ru = unitarize_r(r);
    Eigen::ComplexEigenSolver<Mat> es(ru, true);
    Mat logs = Mat::Zero(9, 9);
    for (int i = 0; i < 9; ++i) logs(i, i) = std::log(es.eigenvalues()(i));
    const Mat lg =
        es.eigenvectors() * logs * es.eigenvectors().inverse() +
        0.5 * std::log(scale) * Mat::Identity(9, 9);
    EXPECT_LT((lg - closed).norm(), 1e-9) << "kappa=" << kap;
  }
}

TEST(VerifySuite, DynamicsChecksPass) {
  for (const auto& rec : verify_dynamics(make_root(2, 3), 2, cx(2.0, 0.0), Tolerances{})) {
    EXPECT_TRUE(rec.pass) << rec.name << " residual " << rec.residual;
  }
}
