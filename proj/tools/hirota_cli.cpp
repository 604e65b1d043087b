// Command-line driver: verification suites and figure-reproduction scans for
// the root-of-unity Hirota chain library.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hirota/dynamics.hpp"
#include "hirota/mps.hpp"
#include "hirota/quasilocality.hpp"
#include "hirota/scan_io.hpp"
#include "hirota/transfer.hpp"

namespace {

using namespace hirota;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitMemoryCap = 3;

struct CommonOptions {
  int ell = 2;
  int m = 3;
  double kappa_re = 2.0;
  double kappa_im = 0.0;
  int n_half = 2;
  std::string out;
  std::string format = "csv";
  double eps_local = 1e-12;
  double eps_chain = 1e-9;
  std::size_t mem_cap_bytes = 4'000'000'000;
  int workers = 2;

  cx kappa() const { return {kappa_re, kappa_im}; }
  RootOfUnity root() const { return make_root(ell, m); }
  ChainGeometry geometry() const { return make_geometry(n_half, m); }
  MemoryGuard guard() const { return MemoryGuard{mem_cap_bytes}; }
  Tolerances tolerances() const { return Tolerances{eps_local, eps_chain}; }

  std::vector<std::pair<std::string, std::string>> echo() const {
    return {{"ell", std::to_string(ell)},
            {"m", std::to_string(m)},
            {"kappa_re", format_g17(kappa_re)},
            {"kappa_im", format_g17(kappa_im)},
            {"n_half", std::to_string(n_half)},
            {"eps_local", format_g17(eps_local)},
            {"eps_chain", format_g17(eps_chain)},
            {"mem_cap_bytes", std::to_string(mem_cap_bytes)},
            {"workers", std::to_string(workers)}};
  }
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->set_config("--config", "", "configuration file (key=value); flags override");
  cmd->add_option("--ell", opt.ell, "even exponent in q = exp(i pi ell / m)");
  cmd->add_option("--m", opt.m, "odd order of the root of unity");
  cmd->add_option("--kappa-re", opt.kappa_re, "real part of the scaling parameter");
  cmd->add_option("--kappa-im", opt.kappa_im, "imaginary part of the scaling parameter");
  cmd->add_option("--n-half", opt.n_half, "half system size N (chain has 2N sites)");
  cmd->add_option("--out", opt.out, "output file path (stdout when omitted)");
  cmd->add_option("--format", opt.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--eps-local", opt.eps_local, "tolerance at local dimension");
  cmd->add_option("--eps-chain", opt.eps_chain, "tolerance at full-chain dimension");
  cmd->add_option("--mem-cap-bytes", opt.mem_cap_bytes, "dense-allocation memory cap");
  cmd->add_option("--workers", opt.workers, "worker threads for grid sweeps");
}

cx parse_complex(const std::string& s) {
  std::istringstream is(s);
  double re = 0.0, im = 0.0;
  char sep = 0;
  is >> re;
  if (is.fail()) throw ValidationError("cannot parse complex number from '" + s + "'");
  if (is >> sep) {
    if (sep != ',') throw ValidationError("expected 're,im' in '" + s + "'");
    is >> im;
    if (is.fail()) throw ValidationError("cannot parse imaginary part in '" + s + "'");
  }
  return {re, im};
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw ValidationError("empty numeric list '" + s + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_double_list(s)) out.push_back(static_cast<int>(v));
  return out;
}

std::vector<cx> parse_lambda_spec(const std::string& single, const std::string& list,
                                  const std::string& polar_r, int phi_count) {
  std::vector<cx> lambdas;
  if (!single.empty()) lambdas.push_back(parse_complex(single));
  if (!list.empty()) {
    std::istringstream is(list);
    std::string tok;
    while (std::getline(is, tok, ';')) {
      if (!tok.empty()) lambdas.push_back(parse_complex(tok));
    }
  }
  if (!polar_r.empty()) {
    if (phi_count < 1) throw ValidationError("--phi-count must be positive with --lambda-r");
    for (double r : parse_double_list(polar_r)) {
      for (int k = 0; k < phi_count; ++k) {
        lambdas.push_back(std::polar(r, -std::numbers::pi + 2 * std::numbers::pi * k / phi_count));
      }
    }
  }
  return lambdas;
}

void emit(const DataTable& table, const CommonOptions& opt) {
  const OutputFormat fmt = parse_output_format(opt.format);
  if (opt.out.empty()) {
    table.write(std::cout, fmt);
    return;
  }
  std::ofstream os(opt.out, std::ios::binary);
  if (!os) throw ValidationError("cannot open output file '" + opt.out + "'");
  table.write(os, fmt);
}

int run_verify(const CommonOptions& opt) {
  const auto root = opt.root();
  opt.guard().require(opt.geometry(), 4);
  const Tolerances tol = opt.tolerances();

  std::vector<CheckRecord> checks;
  auto absorb = [&](std::vector<CheckRecord> v) {
    checks.insert(checks.end(), std::make_move_iterator(v.begin()),
                  std::make_move_iterator(v.end()));
  };
  absorb(verify_weyl(root, tol));
  absorb(verify_dynamics(root, opt.n_half, opt.kappa(), tol));
  absorb(verify_transfer(root, opt.n_half, opt.kappa(), tol));
  absorb(verify_aux_transfer(root, tol));
  absorb(verify_quasilocality(root, tol));
  absorb(verify_mps(root, tol));

  DataTable table;
  table.schema = "hirota.verify.v1";
  table.config = opt.echo();
  table.columns = {"check", "residual", "tolerance", "pass"};
  int failures = 0;
  for (const auto& rec : checks) {
    table.add_row({rec.name, cell(rec.residual), cell(rec.tolerance), cell(rec.pass)});
    if (!rec.pass) ++failures;
    std::cout << (rec.pass ? "pass " : "FAIL ") << rec.name << "  residual=" << rec.residual
              << " tol=" << rec.tolerance << "\n";
  }
  std::cout << checks.size() - failures << "/" << checks.size() << " checks passed\n";
  if (!opt.out.empty()) emit(table, opt);
  return failures == 0 ? kExitOk : kExitCheckFailed;
}

int run_wedge_scan(const CommonOptions& opt, const std::string& polar_r, int phi_count) {
  const auto root = opt.root();
  const std::vector<double> r_list =
      polar_r.empty() ? std::vector<double>{1.5} : parse_double_list(polar_r);
  if (std::abs(opt.kappa_im) > 1e-14) {
    throw ValidationError("wedge-scan expects a real scaling parameter");
  }
  const auto records = wedge_scan(root, opt.kappa_re, r_list, phi_count, opt.workers);

  DataTable table;
  table.schema = "hirota.wedge-scan.v1";
  table.config = opt.echo();
  table.config.emplace_back("phi_count", std::to_string(phi_count));
  table.columns = {"r",     "phi",   "abs_ev1", "abs_ev2", "abs_ev3",     "abs_ev4",
                   "abs_ev5", "abs_ev6", "tau",     "tau_leading", "one_minus_tau_over_rho",
                   "solver_ok"};
  for (const auto& rec : records) {
    table.add_row({cell(rec.r), cell(rec.phi), cell(rec.abs_eigenvalues[0]),
                   cell(rec.abs_eigenvalues[1]), cell(rec.abs_eigenvalues[2]),
                   cell(rec.abs_eigenvalues[3]), cell(rec.abs_eigenvalues[4]),
                   cell(rec.abs_eigenvalues[5]), cell(rec.tau), cell(rec.tau_leading),
                   cell(rec.gap_observable), cell(rec.solver_ok)});
  }
  emit(table, opt);
  return kExitOk;
}

int run_kernel_check(const CommonOptions& opt, const std::vector<cx>& lambdas,
                     const std::vector<int>& n_list) {
  const auto root = opt.root();
  if (std::abs(opt.kappa_im) > 1e-14) {
    throw ValidationError("kernel-check expects a real scaling parameter");
  }
  const double kappa = opt.kappa_re;
  const MemoryGuard guard = opt.guard();

  DataTable table;
  table.schema = "hirota.kernel-check.v1";
  table.config = opt.echo();
  table.columns = {"lambda_re", "lambda_im", "n_half",    "x_norm2",
                   "n_kernel",  "abs_diff",  "kernel_aux", "in_wedge"};
  for (const cx lambda : lambdas) {
    const auto rows = extensivity_study(lambda, kappa, root, n_list, guard);
    const cx k_aux = hs_kernel_from_aux(lambda, lambda, kappa, root);
    for (const auto& row : rows) {
      table.add_row({cell(lambda.real()), cell(lambda.imag()), cell(row.n_half),
                     cell(row.x_norm2), cell(row.n_kernel), cell(row.deviation),
                     cell(k_aux.real()), cell(row.in_wedge)});
    }
  }
  emit(table, opt);
  return kExitOk;
}

int run_dynamics(const CommonOptions& opt, int steps, const std::string& lambda_single) {
  const auto root = opt.root();
  if (std::abs(opt.kappa_im) > 1e-14) {
    throw ValidationError("dynamics requires a real kappa for unitary evolution");
  }
  const auto geom = opt.geometry();
  opt.guard().require(geom, 8);
  const auto pair = clock_shift(root);
  const cx kappa = opt.kappa();
  const auto prop = build_propagator(geom, pair, kappa, true);
  const double unitarity =
      (prop.u_full * prop.u_full.adjoint() - Mat::Identity(geom.dim_total, geom.dim_total)).norm();

  const cx lambda = lambda_single.empty() ? cx(0.5, 0.0) : parse_complex(lambda_single);
  TransferTable ttable(geom, pair, kappa);
  const Mat t_sample = ttable.dense(lambda, 0, opt.guard());
  auto [i_even0, i_odd0] = trivial_charges(geom, pair);

  std::vector<Mat> ws;
  for (int j = 1; j <= geom.n_sites; ++j) ws.push_back(build_w(j, geom, pair));
  std::vector<Mat> ws_conj = ws;

  DataTable table;
  table.schema = "hirota.dynamics.v1";
  table.config = opt.echo();
  table.config.emplace_back("steps", std::to_string(steps));
  table.config.emplace_back("lambda", cell(lambda));
  table.columns = {"step", "closed_vs_conjugation", "ieven_residual", "iodd_residual",
                   "t_lambda_residual", "u_unitarity_defect"};
  for (int step = 1; step <= steps; ++step) {
    step_closed_form(ws, kappa * kappa, root);
    for (auto& w : ws_conj) w = step_conjugate(w, prop);
    double conj_resid = 0.0;
    for (int j = 0; j < geom.n_sites; ++j)
      conj_resid = std::max(conj_resid, (ws[j] - ws_conj[j]).norm());
    Mat ie = Mat::Identity(geom.dim_total, geom.dim_total);
    Mat io = ie;
    for (int n = 1; n <= geom.n_half; ++n) {
      ie = ie * ws[2 * n - 1];
      io = io * ws[2 * n - 2];
    }
    // T(lambda) evaluated on the propagated Weyl variables is unchanged, which
    // is equivalent to [U, T] = 0; report the commutator residual per step
    const Mat ut = prop.u_full * t_sample - t_sample * prop.u_full;
    table.add_row({cell(step), cell(conj_resid), cell((ie - i_even0).norm()),
                   cell((io - i_odd0).norm()), cell(ut.norm() / t_sample.norm()),
                   cell(unitarity)});
  }
  emit(table, opt);
  return kExitOk;
}

int run_mps_export(const CommonOptions& opt, int r_max, const std::string& lambda_single,
                   bool with_oracle) {
  const auto root = opt.root();
  if (std::abs(opt.kappa_im) > 1e-14) {
    throw ValidationError("mps-export expects a real scaling parameter");
  }
  const cx lambda = lambda_single.empty() ? cx(0.5, 0.0) : parse_complex(lambda_single);
  if (!wedge_predicate(lambda, root)) {
    throw ValidationError("mps-export: lambda lies outside the wedge of quasilocality");
  }
  if (with_oracle && r_max > opt.n_half) {
    throw ValidationError("mps-export: oracle comparison needs r_max <= N");
  }
  const double kappa = opt.kappa_re;
  const auto table = build_mps_table(lambda, kappa, root, r_max);
  const auto profile = decay_profile(lambda, kappa, root, std::max(r_max, 2));

  std::ostringstream os;
  os << "{\n  \"schema_version\": \"hirota.mps-export.v1\",\n  \"config\": {";
  bool first = true;
  for (const auto& [k, v] : opt.echo()) {
    os << (first ? "" : ", ") << "\"" << k << "\": \"" << json_escape(v) << "\"";
    first = false;
  }
  os << ", \"lambda_re\": \"" << format_g17(lambda.real()) << "\", \"lambda_im\": \""
     << format_g17(lambda.imag()) << "\", \"r_max\": \"" << r_max << "\"},\n";
  os << "  \"coefficients\": [\n";
  for (std::size_t i = 0; i < table.strings.size(); ++i) {
    const auto& s = table.strings[i];
    os << "    {\"r\": " << s.keys.size() << ", \"keys\": [";
    for (std::size_t a = 0; a < s.keys.size(); ++a) {
      const auto& k = s.keys[a];
      os << (a ? ", " : "") << "[" << k.v[0] << ", " << k.v[1] << ", " << k.v[2] << ", " << k.v[3]
         << "]";
    }
    os << "], \"re\": " << format_g17(s.coefficient.real())
       << ", \"im\": " << format_g17(s.coefficient.imag()) << "}"
       << (i + 1 < table.strings.size() ? "," : "") << "\n";
  }
  os << "  ],\n  \"decay\": [\n";
  for (std::size_t i = 0; i < profile.rows.size(); ++i) {
    os << "    {\"r\": " << profile.rows[i].r
       << ", \"weight\": " << format_g17(profile.rows[i].weight) << "}"
       << (i + 1 < profile.rows.size() ? "," : "") << "\n";
  }
  os << "  ],\n  \"decay_gamma\": " << format_g17(profile.gamma);
  if (with_oracle) {
    const auto geom = opt.geometry();
    opt.guard().require(geom, 4);
    const auto charge = build_charge(lambda, kappa, root, geom, opt.guard());
    const Mat& x = charge.op.matrix;
    const Mat x_tl = x - (x.trace() / static_cast<double>(geom.dim_total)) *
                             Mat::Identity(geom.dim_total, geom.dim_total);
    const Mat assembled = assemble_truncated(table, geom, opt.guard());
    os << ",\n  \"oracle\": {\"n_half\": " << opt.n_half << ", \"rel_deviation\": "
       << format_g17((assembled - x_tl).norm() / x_tl.norm()) << "}";
  }
  os << "\n}\n";

  if (opt.out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(opt.out, std::ios::binary);
    if (!f) throw ValidationError("cannot open output file '" + opt.out + "'");
    f << os.str();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum Hirota chain at roots of unity: charges, kernels, scans"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string lambda_single, lambda_list, lambda_r, n_list_str = "2,3";
  int phi_count = 180;
  int steps = 10;
  int r_max = 2;
  bool oracle = false;

  auto* verify = app.add_subcommand("verify", "run the module invariant suites");
  add_common(verify, opt);

  auto* scan = app.add_subcommand("wedge-scan", "eigenvalue scan over a polar grid");
  add_common(scan, opt);
  scan->add_option("--lambda-r", lambda_r, "comma-separated radii");
  scan->add_option("--phi-count", phi_count, "angular grid points over (-pi, pi]");

  auto* kernel = app.add_subcommand("kernel-check", "brute-force norms against N*K(lambda,lambda)");
  add_common(kernel, opt);
  kernel->add_option("--lambda", lambda_single, "single spectral point re[,im]");
  kernel->add_option("--lambda-list", lambda_list, "semicolon-separated re,im pairs");
  kernel->add_option("--n-list", n_list_str, "half sizes, e.g. 2,3,4");

  auto* dyn = app.add_subcommand("dynamics", "closed-form evolution with conservation logs");
  add_common(dyn, opt);
  dyn->add_option("--steps", steps, "number of Floquet steps");
  dyn->add_option("--lambda", lambda_single, "transfer-matrix sample point");

  auto* mps = app.add_subcommand("mps-export", "matrix-product coefficient table as JSON");
  add_common(mps, opt);
  mps->add_option("--lambda", lambda_single, "spectral point re[,im], wedge interior");
  mps->add_option("--r-max", r_max, "largest double-site support");
  mps->add_flag("--oracle", oracle, "compare the assembled charge against brute force");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (verify->parsed()) return run_verify(opt);
    if (scan->parsed()) return run_wedge_scan(opt, lambda_r, phi_count);
    if (kernel->parsed()) {
      auto lambdas = parse_lambda_spec(lambda_single, lambda_list, "", 0);
      if (lambdas.empty()) lambdas.push_back(cx(0.6, 0.0));
      return run_kernel_check(opt, lambdas, parse_int_list(n_list_str));
    }
    if (dyn->parsed()) return run_dynamics(opt, steps, lambda_single);
    if (mps->parsed()) return run_mps_export(opt, r_max, lambda_single, oracle);
  } catch (const MemoryCapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMemoryCap;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitValidation;
}
