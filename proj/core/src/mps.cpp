#include "hirota/mps.hpp"

#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

namespace hirota {

Mat4 singlet_projector_limit(cx lambda, double kappa, const RootOfUnity& root, int n) {
  if (n < 1) throw ValidationError("singlet_projector_limit: n must be positive");
  const Mat4 l0 =
      double_lax(Key4{}, lambda * root.q_half, lambda / root.q_half, root, kappa);
  const cx ls = lambda_singlet(lambda, kappa);
  if (std::abs(ls) < 1e-14) {
    throw SingularParameterError("singlet_projector_limit: Lambda_s vanishes");
  }
  Mat4 acc = Mat4::Identity();
  Mat4 base = l0 / ls;
  int e = n;
  while (e > 0) {  // binary power
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

cx mps_coefficient(cx lambda, const std::vector<Key4>& keys, double kappa,
                   const RootOfUnity& root) {
  if (keys.empty()) throw ValidationError("mps_coefficient: need at least one key");
  const cx l1 = lambda * root.q_half;
  const cx l2 = lambda / root.q_half;
  const cx ls = lambda_singlet(lambda, kappa);
  Vec4 v = double_lax_d2(keys[0], l1, l2, root, kappa) * psi_singlet();
  for (std::size_t a = 1; a < keys.size(); ++a) {
    v = double_lax(keys[a], l1, l2, root, kappa) * v;
  }
  const cx bra = psi_singlet().transpose() * v;
  return bra / std::pow(ls, static_cast<int>(keys.size()));
}

MpsTable build_mps_table(cx lambda, double kappa, const RootOfUnity& root, int r_max,
                         double prune_tol) {
  if (r_max < 2) throw ValidationError("build_mps_table: traceless support starts at r=2");
  const cx l1 = lambda * root.q_half;
  const cx l2 = lambda / root.q_half;
  const cx ls = lambda_singlet(lambda, kappa);
  const auto support = double_lax_support(root.m);

  std::vector<Mat4> op(support.size());
  std::vector<Mat4> op_d2(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    op[i] = double_lax(support[i], l1, l2, root, kappa);
    op_d2[i] = double_lax_d2(support[i], l1, l2, root, kappa);
  }
  const Vec4 psi = psi_singlet();

  MpsTable table;
  table.lambda = lambda;
  table.kappa = kappa;
  table.root = root;
  table.r_max = r_max;

  // depth-first over key strings, vector propagated from the derivative cell
  struct Frame {
    std::vector<Key4> keys;
    Vec4 vec;
  };
  std::vector<Frame> level;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i].is_zero()) continue;
    Vec4 v = op_d2[i] * psi;
    if (v.norm() < prune_tol) continue;
    level.push_back(Frame{{support[i]}, v});
  }
  cx ls_pow = ls;  // Lambda_s^r accumulated per level
  for (int r = 2; r <= r_max; ++r) {
    ls_pow *= ls;
    std::vector<Frame> next;
    for (const Frame& f : level) {
      for (std::size_t i = 0; i < support.size(); ++i) {
        Vec4 v = op[i] * f.vec;
        if (v.norm() < prune_tol) continue;
        Frame g;
        g.keys = f.keys;
        g.keys.push_back(support[i]);
        g.vec = std::move(v);
        if (!support[i].is_zero()) {  // anchored on the left
          const cx coeff = (psi.transpose() * g.vec)(0, 0) / ls_pow;
          if (std::abs(coeff) > prune_tol) table.strings.push_back(MpsString{g.keys, coeff});
        }
        if (r < r_max) next.push_back(std::move(g));
      }
    }
    level = std::move(next);
  }
  std::sort(table.strings.begin(), table.strings.end(),
            [](const MpsString& a, const MpsString& b) {
              if (a.keys.size() != b.keys.size()) return a.keys.size() < b.keys.size();
              return a.keys < b.keys;
            });
  return table;
}

Mat basis_string_dense(const std::vector<Key4>& keys, int shift_cells, const ChainGeometry& geom,
                       const RootOfUnity& root) {
  const int m = root.m;
  const int n_cells = geom.n_half;
  if (static_cast<int>(keys.size()) > n_cells) {
    throw ValidationError("basis_string_dense: string longer than the chain");
  }
  // per-site exponents (i, j) of e_{i,j} = u^i v^j; identity elsewhere
  std::vector<std::pair<int, int>> site_exp(geom.n_sites, {0, 0});
  for (std::size_t a = 0; a < keys.size(); ++a) {
    const int cell = (static_cast<int>(a) + shift_cells) % n_cells;
    site_exp[2 * cell] = {keys[a].v[0], keys[a].v[1]};      // site 2*cell+1 (1-based)
    site_exp[2 * cell + 1] = {keys[a].v[2], keys[a].v[3]};  // site 2*cell+2
  }
  Mat out = Mat::Zero(geom.dim_total, geom.dim_total);
  std::vector<int> digits(geom.n_sites);
  for (Eigen::Index col = 0; col < geom.dim_total; ++col) {
    Eigen::Index rest = col;
    for (int j = geom.n_sites; j >= 1; --j) {
      digits[j - 1] = static_cast<int>(rest % m);
      rest /= m;
    }
    Eigen::Index row = 0;
    double ang = 0.0;
    for (int j = 0; j < geom.n_sites; ++j) {
      const auto [ei, ej] = site_exp[j];
      // u^i v^j |a> = q^{j a} |a - i mod m>
      ang += static_cast<double>(ej) * digits[j];
      row = row * m + ((digits[j] - ei) % m + m) % m;
    }
    out(row, col) = std::polar(1.0, std::numbers::pi * root.ell * ang / static_cast<double>(m));
  }
  return out;
}

Mat assemble_truncated(const MpsTable& table, const ChainGeometry& geom,
                       const MemoryGuard& guard) {
  if (table.r_max > geom.n_half) {
    throw ValidationError("assemble_truncated: r_max exceeds the chain half-size");
  }
  guard.require(geom, 2);
  Mat out = Mat::Zero(geom.dim_total, geom.dim_total);
  for (const MpsString& s : table.strings) {
    for (int shift = 0; shift < geom.n_half; ++shift) {
      out += s.coefficient * basis_string_dense(s.keys, shift, geom, table.root);
    }
  }
  return out;
}

DecayProfile decay_profile(cx lambda, double kappa, const RootOfUnity& root, int r_max) {
  if (r_max < 2) throw ValidationError("decay_profile: r starts at 2");
  const cx l1 = lambda * root.q_half;
  const cx l2 = lambda / root.q_half;
  const Vec4 psi = psi_singlet();
  const Vec16 big = Eigen::kroneckerProduct(psi, psi).eval();

  const Mat16 m_full = aux_transfer(l1, l2, l1, l2, root, kappa);
  const Mat4 l0 = double_lax(Key4{}, l1, l2, root, kappa);
  const Mat4 l0_d2 = double_lax_d2(Key4{}, l1, l2, root, kappa);
  const Mat16 m_edge = m_full - Eigen::kroneckerProduct(l0.conjugate(), l0).eval();
  const Mat16 d_full = aux_transfer_dxy(l1, l2, l1, l2, root, kappa);
  const Mat16 d_edge = d_full - Eigen::kroneckerProduct(l0_d2.conjugate(), l0_d2).eval();

  const double ls2 = std::norm(lambda_singlet(lambda, kappa));
  DecayProfile profile;
  Vec16 chain = d_edge * big;  // grows one M per support step
  double ls_pow = ls2 * ls2;   // |Lambda_s|^{2r} at r = 2
  for (int r = 2; r <= r_max; ++r) {
    const cx w = (big.transpose() * (m_edge * chain).eval())(0, 0);
    profile.rows.push_back(DecayRow{r, w.real() / ls_pow});
    chain = m_full * chain;
    ls_pow *= ls2;
  }
  // exponential fit: log weight ~ -gamma r
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& row : profile.rows) {
    if (row.weight <= 0.0) continue;
    sx += row.r;
    sy += std::log(row.weight);
    sxx += static_cast<double>(row.r) * row.r;
    sxy += row.r * std::log(row.weight);
    ++cnt;
  }
  profile.gamma = (cnt >= 2) ? -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : 0.0;
  return profile;
}

std::vector<CheckRecord> verify_mps(const RootOfUnity& root, const Tolerances& tol) {
  std::vector<CheckRecord> out;
  const std::string tag = "mps.m" + std::to_string(root.m) + ".";
  const double kappa = 1.0;
  const cx lambda(0.5, 0.0);

  // projector limit
  const Mat4 proj = singlet_projector_limit(lambda, 2.0, root, 64);
  const Mat4 target = psi_singlet() * psi_singlet().transpose();
  out.push_back(make_check(tag + "projector_limit", (proj - target).norm(), 1e-10));

  // r = 1 support: exactly the two dynamical-variable strings carry weight;
  // all other single-cell coefficients vanish
  {
    const Key4 w_key = key_mod({1, 1, 1, -1}, root.m);
    const Key4 w_key_rev = key_neg(w_key, root.m);
    double off_support = 0.0;
    int nonzero = 0;
    for (const Key4& k : double_lax_support(root.m)) {
      if (k.is_zero()) continue;
      const double a = std::abs(mps_coefficient(lambda, {k}, kappa, root));
      if (a > 1e-13) ++nonzero;
      if (!(k == w_key) && !(k == w_key_rev)) off_support = std::max(off_support, a);
    }
    out.push_back(make_check(tag + "r1_support_off_w_strings", off_support, tol.local * 100));
    out.push_back(make_check(tag + "r1_support_count", std::abs(nonzero - 2.0), 0.5));
  }

  // decay weights from the contraction match the explicit enumeration
  const MpsTable table = build_mps_table(lambda, kappa, root, 3);
  const DecayProfile prof = decay_profile(lambda, kappa, root, 3);
  std::array<double, 2> enumerated{0.0, 0.0};
  for (const MpsString& s : table.strings) {
    enumerated[s.keys.size() - 2] += std::norm(s.coefficient);
  }
  double decay_resid = 0.0;
  for (int i = 0; i < 2; ++i) {
    decay_resid = std::max(
        decay_resid, std::abs(prof.rows[i].weight - enumerated[i]) / (1.0 + enumerated[i]));
  }
  out.push_back(make_check(tag + "decay_matches_enumeration", decay_resid, tol.chain));

  // weights decay and stay nonnegative
  const DecayProfile longer = decay_profile(lambda, kappa, root, 6);
  double monotone = 0.0, negative = 0.0;
  for (std::size_t i = 0; i < longer.rows.size(); ++i) {
    if (longer.rows[i].weight < -1e-12) negative += 1.0;
    if (i > 0 && longer.rows[i].weight > longer.rows[i - 1].weight + 1e-12) monotone += 1.0;
  }
  out.push_back(make_check(tag + "decay_monotone", monotone, 0.5));
  out.push_back(make_check(tag + "decay_nonnegative", negative, 0.5));
  return out;
}

}  // namespace hirota
