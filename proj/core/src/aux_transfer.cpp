#include "hirota/aux_transfer.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

namespace hirota {

bool operator==(const Key4& a, const Key4& b) { return a.v == b.v; }
bool operator<(const Key4& a, const Key4& b) { return a.v < b.v; }

Key4 key_mod(std::array<int, 4> raw, int m) {
  Key4 k;
  for (int i = 0; i < 4; ++i) k.v[i] = ((raw[i] % m) + m) % m;
  return k;
}
Key4 key_add(const Key4& a, const Key4& b, int m) {
  return key_mod({a.v[0] + b.v[0], a.v[1] + b.v[1], a.v[2] + b.v[2], a.v[3] + b.v[3]}, m);
}
Key4 key_sub(const Key4& a, const Key4& b, int m) {
  return key_mod({a.v[0] - b.v[0], a.v[1] - b.v[1], a.v[2] - b.v[2], a.v[3] - b.v[3]}, m);
}
Key4 key_neg(const Key4& a, int m) { return key_mod({-a.v[0], -a.v[1], -a.v[2], -a.v[3]}, m); }

std::vector<StaggeredComponent> staggered_components_list(cx kappa, int m) {
  const int w = m - 1;  // stands for -1 mod m
  std::vector<StaggeredComponent> list;
  auto push = [&](std::array<int, 4> key, int row, int col, int degree, cx coeff) {
    list.push_back(StaggeredComponent{key_mod(key, m), row, col, degree, coeff});
  };
  push({0, 1, 0, w}, 1, 1, 2, -1.0);
  push({0, 1, 1, 0}, 0, 1, 1, kappa);
  push({0, w, 0, 1}, 0, 0, 2, -1.0);
  push({0, w, w, 0}, 1, 0, 1, -kappa);
  push({1, 0, 0, w}, 1, 0, 1, -1.0 / kappa);
  push({1, 0, 1, 0}, 0, 0, 0, 1.0);
  push({w, 0, 0, 1}, 0, 1, 1, 1.0 / kappa);
  push({w, 0, w, 0}, 1, 1, 0, 1.0);
  return list;
}

namespace {

cx pow_int(cx base, int n) {
  if (n == 0) return 1.0;
  return std::pow(base, n);
}

const StaggeredComponent* find_component(const std::vector<StaggeredComponent>& list,
                                         const Key4& key) {
  for (const auto& c : list) {
    if (c.key == key) return &c;
  }
  return nullptr;
}

}  // namespace

Mat2 staggered_component(const Key4& key, cx lambda, cx kappa, int m) {
  const auto list = staggered_components_list(kappa, m);
  Mat2 out = Mat2::Zero();
  if (const auto* c = find_component(list, key)) {
    out(c->row, c->col) = c->coeff * pow_int(lambda, c->degree);
  }
  return out;
}

Mat2 staggered_component_dlambda(const Key4& key, cx lambda, cx kappa, int m) {
  const auto list = staggered_components_list(kappa, m);
  Mat2 out = Mat2::Zero();
  if (const auto* c = find_component(list, key)) {
    if (c->degree >= 1) {
      out(c->row, c->col) =
          c->coeff * static_cast<double>(c->degree) * pow_int(lambda, c->degree - 1);
    }
  }
  return out;
}

std::vector<Key4> double_lax_support(int m) {
  const auto list = staggered_components_list(1.0, m);
  std::vector<Key4> support;
  for (const auto& a : list) {
    for (const auto& b : list) {
      const Key4 k = key_add(a.key, b.key, m);
      if (std::find(support.begin(), support.end(), k) == support.end()) support.push_back(k);
    }
  }
  std::sort(support.begin(), support.end());
  return support;
}

namespace {

// Shared convolution core: second-factor coefficients optionally differentiated.
Mat4 double_lax_impl(const Key4& key, cx lambda1, cx lambda2, const RootOfUnity& root, cx kappa,
                     bool d2) {
  const int m = root.m;
  const auto list = staggered_components_list(kappa, m);
  Mat4 out = Mat4::Zero();
  for (const auto& first : list) {
    const Key4 rest = key_sub(key, first.key, m);
    const auto* second = find_component(list, rest);
    if (second == nullptr) continue;
    // phase q^{(i'-i) j' + (k'-k) l'}; representatives are fine since q^m = 1
    const int expo = (first.key.v[0] - key.v[0]) * first.key.v[1] +
                     (first.key.v[2] - key.v[2]) * first.key.v[3];
    const cx phase = std::polar(1.0, std::numbers::pi * root.ell * expo / static_cast<double>(m));
    const cx c1 = first.coeff * pow_int(lambda1, first.degree);
    cx c2;
    if (d2) {
      if (second->degree == 0) continue;
      c2 = second->coeff * static_cast<double>(second->degree) *
           pow_int(lambda2, second->degree - 1);
    } else {
      c2 = second->coeff * pow_int(lambda2, second->degree);
    }
    const int r = 2 * first.row + second->row;
    const int c = 2 * first.col + second->col;
    out(r, c) += phase * c1 * c2;
  }
  return out;
}

}  // namespace

Mat4 double_lax(const Key4& key, cx lambda1, cx lambda2, const RootOfUnity& root, cx kappa) {
  return double_lax_impl(key, lambda1, lambda2, root, kappa, false);
}

Mat4 double_lax_d2(const Key4& key, cx lambda1, cx lambda2, const RootOfUnity& root, cx kappa) {
  return double_lax_impl(key, lambda1, lambda2, root, kappa, true);
}

cx lambda_singlet(cx lambda1, cx lambda2, cx kappa) {
  const cx k2 = kappa * kappa;
  return 1.0 + (k2 + 1.0 / k2) * lambda1 * lambda2 + lambda1 * lambda1 * lambda2 * lambda2;
}
cx lambda_triplet(cx lambda1, cx lambda2, cx kappa) {
  const cx k2 = kappa * kappa;
  return 1.0 - (k2 + 1.0 / k2) * lambda1 * lambda2 + lambda1 * lambda1 * lambda2 * lambda2;
}
cx lambda_singlet(cx lambda, cx kappa) {
  const cx k2 = kappa * kappa;
  const cx l2 = lambda * lambda;
  return 1.0 + (k2 + 1.0 / k2) * l2 + l2 * l2;
}
Vec4 psi_singlet() {
  Vec4 v;
  v << 0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0;
  return v;
}
Vec4 psi_triplet() {
  Vec4 v;
  v << 0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0;
  return v;
}

namespace {

template <typename FirstFn, typename SecondFn>
Mat16 aux_sum(const RootOfUnity& root, FirstFn first, SecondFn second) {
  Mat16 out = Mat16::Zero();
  for (const Key4& key : double_lax_support(root.m)) {
    const Mat4 a = first(key);
    const Mat4 b = second(key);
    if (a.isZero(0.0) || b.isZero(0.0)) continue;
    out += Eigen::kroneckerProduct(a.conjugate(), b).eval();
  }
  return out;
}

}  // namespace

Mat16 aux_transfer(cx l1, cx l2, cx m1, cx m2, const RootOfUnity& root, cx kappa) {
  return aux_sum(
      root, [&](const Key4& k) { return double_lax(k, l1, l2, root, kappa); },
      [&](const Key4& k) { return double_lax(k, m1, m2, root, kappa); });
}

Mat16 aux_transfer_dxy(cx l1, cx l2, cx m1, cx m2, const RootOfUnity& root, cx kappa) {
  return aux_sum(
      root, [&](const Key4& k) { return double_lax_d2(k, l1, l2, root, kappa); },
      [&](const Key4& k) { return double_lax_d2(k, m1, m2, root, kappa); });
}

Mat16 aux_transfer_dx(cx l1, cx l2, cx m1, cx m2, const RootOfUnity& root, cx kappa) {
  return aux_sum(
      root, [&](const Key4& k) { return double_lax_d2(k, l1, l2, root, kappa); },
      [&](const Key4& k) { return double_lax(k, m1, m2, root, kappa); });
}

Mat16 aux_transfer_dy(cx l1, cx l2, cx m1, cx m2, const RootOfUnity& root, cx kappa) {
  return aux_sum(
      root, [&](const Key4& k) { return double_lax(k, l1, l2, root, kappa); },
      [&](const Key4& k) { return double_lax_d2(k, m1, m2, root, kappa); });
}

const std::array<int, 6>& reduced_basis_indices() {
  static const std::array<int, 6> idx{0, 5, 6, 9, 10, 15};
  return idx;
}

ReducedAux reduce_aux(cx lambda, cx mu, const RootOfUnity& root, cx kappa, double complement_tol) {
  const cx qh = root.q_half;
  const Mat16 full = aux_transfer(lambda * qh, lambda / qh, mu * qh, mu / qh, root, kappa);
  const auto& idx = reduced_basis_indices();
  std::array<bool, 16> in_block{};
  for (int i : idx) in_block[i] = true;

  double complement = 0.0;
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) {
      if (!in_block[r] || !in_block[c]) complement = std::max(complement, std::abs(full(r, c)));
    }
  }
  const double scale = full.norm();
  if (complement > complement_tol * std::max(1.0, scale)) {
    throw std::runtime_error(
        "reduce_aux: complement block does not vanish (residual " + std::to_string(complement) +
        "), auxiliary transfer construction is inconsistent");
  }
  ReducedAux red;
  red.lambda = lambda;
  red.mu = mu;
  red.kappa = kappa;
  red.root = root;
  red.complement_residual = complement;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) red.matrix(r, c) = full(idx[r], idx[c]);
  return red;
}

ReducedEigensystem reduced_eigensystem(const ReducedAux& red, double defect_threshold) {
  ReducedEigensystem out;
  Eigen::ComplexEigenSolver<Mat6> right(red.matrix, true);
  Eigen::ComplexEigenSolver<Mat6> left(red.matrix.transpose().eval(), true);
  if (right.info() != Eigen::Success || left.info() != Eigen::Success) {
    throw std::runtime_error("reduced_eigensystem: eigensolver failed");
  }
  out.values = right.eigenvalues();
  out.right = right.eigenvectors();
  // align the left system to the right eigenvalue order
  std::array<bool, 6> used{};
  for (int i = 0; i < 6; ++i) {
    int best = -1;
    double best_dist = std::numeric_limits<double>::max();
    for (int j = 0; j < 6; ++j) {
      if (used[j]) continue;
      const double d = std::abs(left.eigenvalues()(j) - out.values(i));
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    used[best] = true;
    out.left.col(i) = left.eigenvectors().col(best);
    const cx overlap = (out.left.col(i).transpose() * out.right.col(i))(0, 0);
    out.condition[i] = (std::abs(overlap) < 1e-300) ? std::numeric_limits<double>::infinity()
                                                    : 1.0 / std::abs(overlap);
    if (out.condition[i] > defect_threshold) out.near_defective = true;
  }
  return out;
}

std::array<cx, 4> reduced_closed_form_eigenvalues(cx lambda, cx mu, double kappa) {
  const double k2 = kappa * kappa;
  const double k4 = k2 * k2;
  const cx lb2 = std::conj(lambda) * std::conj(lambda);
  const cx mu2 = mu * mu;
  const cx tau1 = -(k2 - lb2) * (k2 * lb2 - 1.0) * (k2 + mu2) * (k2 * mu2 + 1.0) / k4;
  const cx tau2 = -(k2 + lb2) * (k2 * lb2 + 1.0) * (k2 - mu2) * (k2 * mu2 - 1.0) / k4;
  const cx tau3 = lb2 * lb2 * mu2 * mu2 - (k4 * k4 + 1.0) * lb2 * mu2 / k4 + 1.0;
  const cx tau = (k2 + lb2) * (k2 * lb2 + 1.0) * (k2 + mu2) * (k2 * mu2 + 1.0) / k4;
  return {tau1, tau2, tau3, tau};
}

FactorizationCheck check_factorization(cx lambda, cx mu, const RootOfUnity& root, cx kappa) {
  const cx qh = root.q_half;
  const Vec4 psi = psi_singlet();
  double max_resid = 0.0;
  for (const Key4& key : double_lax_support(root.m)) {
    if (key.is_zero()) continue;
    max_resid =
        std::max(max_resid, (double_lax(key, lambda * qh, lambda / qh, root, kappa) * psi).norm());
  }
  const Mat16 t = aux_transfer(lambda * qh, lambda / qh, mu * qh, mu / qh, root, kappa);
  Vec16 big = Eigen::kroneckerProduct(psi.conjugate(), psi).eval();
  const cx tau = std::conj(lambda_singlet(lambda, kappa)) * lambda_singlet(mu, kappa);
  FactorizationCheck fc;
  fc.max_component_residual = max_resid;
  fc.eigen_residual = (t * big - tau * big).norm();
  return fc;
}

double check_kappa_commutation(cx lambda, cx mu, const RootOfUnity& root, double kappa,
                               double kappa_prime) {
  const Mat6 a = reduce_aux(lambda, mu, root, kappa).matrix;
  const Mat6 b = reduce_aux(lambda, mu, root, kappa_prime).matrix;
  return (a * b - b * a).norm();
}

Mat6 parity_antidiagonal() {
  Mat6 p = Mat6::Zero();
  for (int i = 0; i < 6; ++i) p(i, 5 - i) = 1.0;
  return p;
}

Mat6 parity_restriction() {
  // P = -sigma_y (x) sigma_y on V (x) V, then P (x) P restricted to the block.
  Mat2 sy;
  sy << 0.0, cx(0.0, -1.0), cx(0.0, 1.0), 0.0;
  const Mat4 p = (-Eigen::kroneckerProduct(sy, sy)).eval();
  const Mat16 pp = Eigen::kroneckerProduct(p, p).eval();
  const auto& idx = reduced_basis_indices();
  Mat6 out;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) out(r, c) = pp(idx[r], idx[c]);
  return out;
}

std::vector<CheckRecord> verify_aux_transfer(const RootOfUnity& root, const Tolerances& tol) {
  std::vector<CheckRecord> out;
  const std::string tag = "aux.m" + std::to_string(root.m) + ".";
  std::mt19937_64 rng(1234 + root.m);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto rand_cx = [&](double rmin, double rmax) {
    return std::polar(rmin + (rmax - rmin) * unif(rng), 2 * std::numbers::pi * unif(rng));
  };

  // staggered components are independent of m: compare against m = 3 layout
  {
    const auto a = staggered_components_list(1.37, root.m);
    const auto b = staggered_components_list(1.37, 3);
    double resid = (a.size() == b.size()) ? 0.0 : 1.0;
    for (std::size_t i = 0; i < a.size() && resid == 0.0; ++i) {
      if (a[i].row != b[i].row || a[i].col != b[i].col || a[i].degree != b[i].degree ||
          std::abs(a[i].coeff - b[i].coeff) > 0.0)
        resid = 1.0;
    }
    out.push_back(make_check(tag + "components_m_independent", resid, 0.5));
  }

  // singlet / triplet eigenpairs of the leading component
  double eig_resid = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const cx l1 = rand_cx(0.2, 1.6), l2 = rand_cx(0.2, 1.6);
    const cx kap = rand_cx(0.5, 2.0);
    const Mat4 l0 = double_lax(Key4{}, l1, l2, root, kap);
    eig_resid = std::max(eig_resid,
                         (l0 * psi_singlet() - lambda_singlet(l1, l2, kap) * psi_singlet()).norm());
    eig_resid = std::max(eig_resid,
                         (l0 * psi_triplet() - lambda_triplet(l1, l2, kap) * psi_triplet()).norm());
  }
  out.push_back(make_check(tag + "singlet_triplet_eigenpairs", eig_resid, tol.local));

  // factorization at the shifted spectrals
  double fact_resid = 0.0, eigvec_resid = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const cx lambda = rand_cx(0.2, 1.5);
    const cx mu = rand_cx(0.2, 1.5);
    const double kap = 0.5 + 2.0 * unif(rng);
    const auto fc = check_factorization(lambda, mu, root, kap);
    fact_resid = std::max(fact_resid, fc.max_component_residual);
    eigvec_resid = std::max(eigvec_resid, fc.eigen_residual);
  }
  out.push_back(make_check(tag + "factorization_components", fact_resid, tol.local * 100));
  out.push_back(make_check(tag + "factorization_eigenpair", eigvec_resid, tol.local * 1000));

  // closed-form eigenvalues inside the reduced spectrum
  double match_resid = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const cx lambda = rand_cx(0.2, 1.5);
    const cx mu = rand_cx(0.2, 1.5);
    const double kap = 0.6 + 1.8 * unif(rng);
    const auto red = reduce_aux(lambda, mu, root, kap);
    const auto eig = reduced_eigensystem(red);
    for (const cx& want : reduced_closed_form_eigenvalues(lambda, mu, kap)) {
      double best = std::numeric_limits<double>::max();
      for (int i = 0; i < 6; ++i) best = std::min(best, std::abs(eig.values(i) - want));
      match_resid = std::max(match_resid, best / (1.0 + std::abs(want)));
    }
  }
  out.push_back(make_check(tag + "closed_form_eigenvalues", match_resid, tol.chain));

  // kappa <-> 1/kappa invariance and cross-kappa commutation
  {
    const cx lambda = rand_cx(0.3, 1.4), mu = rand_cx(0.3, 1.4);
    const Mat6 a = reduce_aux(lambda, mu, root, 1.7).matrix;
    const Mat6 b = reduce_aux(lambda, mu, root, 1.0 / 1.7).matrix;
    out.push_back(make_check(tag + "kappa_inversion_invariant", (a - b).norm(), tol.chain));
    out.push_back(make_check(tag + "kappa_commutation",
                             check_kappa_commutation(lambda, mu, root, 1.3, 2.6), tol.chain * 10));
    const Mat6 p = parity_antidiagonal();
    out.push_back(make_check(tag + "parity_commutes", (p * a - a * p).norm(), tol.chain));
    out.push_back(
        make_check(tag + "parity_restriction_matches", (parity_restriction() - p).norm(), tol.local));
  }
  return out;
}

}  // namespace hirota
