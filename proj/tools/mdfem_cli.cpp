// Command-line front end: rule construction, diagnostics, and convergence
// studies.  All numeric CSV fields are written with 17 significant digits.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mdfem/config.hpp"
#include "mdfem/driver.hpp"
#include "mdfem/quadrature.hpp"

using namespace mdfem;

namespace {

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

std::string json_kv(const std::string& key, double v, bool last = false) {
  std::ostringstream os;
  os.precision(17);
  os << "  \"" << key << "\": " << v << (last ? "\n" : ",\n");
  return os.str();
}

int cmd_cbc(int m, int s, int alpha, const std::string& out) {
  if (alpha < 2) throw std::invalid_argument("cbc: alpha >= 2 (higher-order branch only)");
  const auto rule = cbc_construct(m, s, alpha);
  write_output(out, serialize_rule(rule));
  const double E = quality_E(rule.lattice, alpha);
  std::ostringstream rep;
  rep.precision(17);
  rep << "E_d = " << E << "\n";
  for (int i = 0; i < 8; ++i) {
    const double lam = 1.0 + (alpha - 0.01 - 1.0) * i / 7.0;
    rep << "bound(lambda=" << lam << ") = " << cbc_quality_bound(m, alpha * s, alpha, lam)
        << "\n";
  }
  if (!out.empty()) std::cout << rep.str();
  return 0;
}

int cmd_points(const std::string& rule_file, int m, int s, int alpha, const std::string& out) {
  InterlacedRule rule;
  if (!rule_file.empty()) {
    std::ifstream in(rule_file);
    if (!in) throw std::runtime_error("cannot open rule file: " + rule_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    rule = parse_rule(ss.str());
  } else {
    rule = cbc_construct(m, s, alpha);
  }
  const auto pts = interlace_points(rule);
  std::ostringstream os;
  os << "k";
  for (int j = 1; j <= rule.s; ++j) os << ";y_" << j;
  os << "\n";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    os << k;
    for (const auto& c : pts[k]) os << ";" << c.num << "/2^" << c.bits;
    os << "\n";
  }
  write_output(out, os.str());
  return 0;
}

int cmd_kernel_constants(int alpha, double lambda, int s, const std::string& config_path) {
  std::ostringstream os;
  os.precision(17);
  os << "{\n";
  os << json_kv("alpha", alpha) << json_kv("lambda", lambda) << json_kv("s", s);
  os << json_kv("M", kernel_constant_M(alpha));
  os << json_kv("M_estimate", kernel_constant_M_estimate(alpha));
  const auto c = bound_constants(alpha, lambda, s);
  os << json_kv("C1_I0_half", c.C1);
  os << json_kv("C1_I0_quarter", c.C1_alt);
  os << json_kv("C_diamond", c.C_diamond);
  os << json_kv("C3", c.C3);
  os << json_kv("C4", c.C4);
  os << json_kv("Ctilde", c.Ctilde);
  if (config_path.empty()) {
    os << json_kv("C_full", c.C_full, true);
  } else {
    os << json_kv("C_full", c.C_full);
    const RunConfig cfg = load_config_file(config_path);
    const Problem prob = cfg.make_problem();
    const double kap = kappa(prob.field);
    double delta = 0.0;
    const double ck = norm_bound_Ckappa(kap, alpha, &delta);
    const double ckp =
        norm_bound_CkappaPrime(kap, alpha, b_sum(prob.field), b_sum_squares(prob.field));
    os << json_kv("kappa", kap);
    os << json_kv("delta_kappa_alpha", delta);
    os << json_kv("C_kappa", ck);
    os << json_kv("C_kappa_prime", ckp, true);
  }
  os << "}\n";
  std::cout << os.str();
  return 0;
}

int cmd_cubature_test(int alpha, double lambda, int smax, int mmin, int mmax,
                      const std::string& out) {
  std::ostringstream os;
  os.precision(17);
  os << "s;n;error;slope\n";
  for (int s = 1; s <= smax; ++s) {
    const double exact = std::pow(std::exp(0.125) - 1.0, s);
    std::vector<double> xs, ys;
    std::ostringstream rows;
    rows.precision(17);
    for (int m = mmin; m <= mmax; ++m) {
      const GaussCubature cub(cbc_construct(m, s, alpha), lambda);
      const double Q = cub.integrate([](std::span<const double> y) {
        double F = 1.0;
        for (double t : y) F *= std::exp(0.5 * t) - 1.0;
        return F;
      });
      const double err = std::abs(Q - exact);
      xs.push_back(std::log2(double(cub.n())));
      ys.push_back(std::log2(std::max(err, 1e-300)));
      rows << s << ";" << cub.n() << ";" << err << ";\n";
    }
    os << rows.str();
    os << s << ";;;" << -fit_slope(xs, ys) << "\n";
  }
  write_output(out, os.str());
  return 0;
}

int cmd_fem_test(int r, int kmin, int kmax, const std::string& out) {
  const FemProblem p{[](double) { return 1.0; },
                     [](double x) { return M_PI * M_PI * std::sin(M_PI * x); },
                     [](double) { return 1.0; }};
  const double exact = 2.0 / M_PI;
  std::ostringstream os;
  os.precision(17);
  os << "h;G_error;slope\n";
  std::vector<double> xs, ys;
  for (int k = kmin; k <= kmax; ++k) {
    const Mesh mesh{1 << k, r};
    const double err = std::abs(apply_G(p, assemble_solve(p, mesh), mesh) - exact);
    xs.push_back(double(k));
    ys.push_back(std::log2(std::max(err, 1e-300)));
    os << mesh.h() << ";" << err << ";\n";
  }
  os << ";;" << -fit_slope(xs, ys) << "\n";
  write_output(out, os.str());
  return 0;
}

int cmd_active_set(const RunConfig& cfg, double epsilon, const std::string& out) {
  const Problem prob = cfg.make_problem();
  const auto rates = derive_rates(prob.pstar, prob.tau, prob.dprime);
  const Weights w = Weights::from_field(prob.field, kernel_constant_M(rates.alpha));
  const auto aset = build_active_set(w, epsilon, prob.pstar);
  write_output(out, active_set_csv(aset));
  return 0;
}

int cmd_allocate(const RunConfig& cfg, double epsilon, const std::string& out) {
  const Problem prob = cfg.make_problem();
  const auto rates = derive_rates(prob.pstar, prob.tau, prob.dprime);
  const Weights w = Weights::from_field(prob.field, kernel_constant_M(rates.alpha));
  const auto aset = build_active_set(w, epsilon, prob.pstar);
  const auto alloc = allocate(rates, aset, w, epsilon, cfg.constants_mode(), cfg.c_practical);
  write_output(out, allocation_csv(alloc));
  return 0;
}

int cmd_run(const RunConfig& cfg, double epsilon, const std::string& out) {
  const Problem prob = cfg.make_problem();
  const auto r = run(prob, epsilon, cfg.constants_mode(), cfg.c_practical);
  std::cout << run_report(r);
  if (!out.empty()) write_output(out, run_csv(r, prob.dprime));
  return 0;
}

int cmd_convergence(const RunConfig& cfg, const std::string& out) {
  const Problem prob = cfg.make_problem();
  const double ref =
      reference(prob, cfg.s_ref, cfg.n_ref, cfg.h_ref, cfg.reference_method(), cfg.ref_tol);
  std::ostringstream os;
  os.precision(17);
  os << "epsilon;result;ref;abs_err;model_cost;n_sets;max_card;wall_ms\n";
  std::vector<double> lx_err, ly_err, lx_cost, ly_cost;
  for (double eps : cfg.epsilons) {
    const auto r = run(prob, eps, cfg.constants_mode(), cfg.c_practical);
    const auto st = superposition_stats(r.aset);
    const double abs_err = std::abs(r.result - ref);
    os << eps << ";" << r.result << ";" << ref << ";" << abs_err << ";" << r.model_cost << ";"
       << st.count << ";" << st.max_cardinality << ";" << r.wall_ms << "\n";
    lx_err.push_back(std::log(eps));
    ly_err.push_back(std::log(std::max(abs_err, 1e-300)));
    lx_cost.push_back(std::log(1.0 / eps));
    ly_cost.push_back(std::log(r.model_cost));
  }
  os << "slope;;;" << fit_slope(lx_err, ly_err) << ";" << fit_slope(lx_cost, ly_cost)
     << ";;;\n";
  write_output(out, os.str());
  return 0;
}

int cmd_exponents(double pstar, double tau, double dprime) {
  const auto e = exponents(pstar, tau, dprime);
  std::ostringstream os;
  os.precision(17);
  os << "quantity;value\n";
  os << "a_MDFEM;" << e.a_mdfem << "\n";
  os << "a_QMCFEM;" << e.a_qmcfem << "\n";
  os << "higher_order_branch;" << (e.higher_order_branch ? 1 : 0) << "\n";
  os << "qmcfem_low_pstar_branch;" << (e.qmcfem_low_pstar ? 1 : 0) << "\n";
  std::cout << os.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MDFEM: multivariate decomposition finite element method"};
  app.require_subcommand(1);

  int m = 3, s = 1, alpha = 2, r = 1, smax = 3, mmin = 6, mmax = 14, kmin = 3, kmax = 9;
  double lambda = 1.0, epsilon = 0.01, pstar = 0.38, tau = 2.0, dprime = 1.0;
  std::string out, rule_file, config_path;

  auto* cbc = app.add_subcommand("cbc", "construct an interlaced rule by CBC");
  cbc->add_option("--m", m)->required();
  cbc->add_option("--s", s)->required();
  cbc->add_option("--alpha", alpha)->required();
  cbc->add_option("--out", out);

  auto* points = app.add_subcommand("points", "emit the points of a rule as exact dyadics");
  points->add_option("--rule", rule_file);
  points->add_option("--m", m);
  points->add_option("--s", s);
  points->add_option("--alpha", alpha);
  points->add_option("--out", out);

  auto* kc = app.add_subcommand("kernel-constants", "kernel constant M and error constants");
  kc->add_option("--alpha", alpha);
  kc->add_option("--lambda", lambda);
  kc->add_option("--s", s);
  kc->add_option("--config", config_path);

  auto* ct = app.add_subcommand("cubature-test", "convergence study of the mapped cubature");
  ct->add_option("--alpha", alpha);
  ct->add_option("--lambda", lambda);
  ct->add_option("--smax", smax);
  ct->add_option("--mmin", mmin);
  ct->add_option("--mmax", mmax);
  ct->add_option("--out", out);

  auto* ft = app.add_subcommand("fem-test", "manufactured-solution FEM convergence");
  ft->add_option("--r", r);
  ft->add_option("--kmin", kmin);
  ft->add_option("--kmax", kmax);
  ft->add_option("--out", out);

  auto* as = app.add_subcommand("active-set", "dump the active set");
  as->add_option("--config", config_path)->required();
  as->add_option("--epsilon", epsilon)->required();
  as->add_option("--out", out);

  auto* al = app.add_subcommand("allocate", "dump the work allocation");
  al->add_option("--config", config_path)->required();
  al->add_option("--epsilon", epsilon)->required();
  al->add_option("--out", out);

  auto* rn = app.add_subcommand("run", "one full MDFEM evaluation");
  rn->add_option("--config", config_path)->required();
  rn->add_option("--epsilon", epsilon)->required();
  rn->add_option("--out", out);

  auto* cv = app.add_subcommand("convergence", "epsilon sweep against the reference");
  cv->add_option("--config", config_path)->required();
  cv->add_option("--out", out);

  auto* ex = app.add_subcommand("exponents", "cost exponents a_MDFEM and a_QMCFEM");
  ex->add_option("--pstar", pstar)->required();
  ex->add_option("--tau", tau);
  ex->add_option("--dprime", dprime);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  try {
    if (*cbc) return cmd_cbc(m, s, alpha, out);
    if (*points) return cmd_points(rule_file, m, s, alpha, out);
    if (*kc) return cmd_kernel_constants(alpha, lambda, s, config_path);
    if (*ct) return cmd_cubature_test(alpha, lambda, smax, mmin, mmax, out);
    if (*ft) return cmd_fem_test(r, kmin, kmax, out);
    if (*as) return cmd_active_set(load_config_file(config_path), epsilon, out);
    if (*al) return cmd_allocate(load_config_file(config_path), epsilon, out);
    if (*rn) return cmd_run(load_config_file(config_path), epsilon, out);
    if (*cv) return cmd_convergence(load_config_file(config_path), out);
    if (*ex) return cmd_exponents(pstar, tau, dprime);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
