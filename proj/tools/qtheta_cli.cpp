#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>

#include <CLI11.hpp>

#include "qtheta/error.hpp"
#include "qtheta/suites.hpp"
#include "qtheta/theta.hpp"

using namespace qtheta;

namespace {

enum Exit { kPass = 0, kFail = 1, kConfig = 2, kBudget = 3 };

struct Flags {
  std::string config, theta, g, tau, out;
  std::optional<int> epsilon;
  std::optional<unsigned> grade;
  std::optional<double> tol;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "flat JSON config file; flags override it");
  cmd->add_option("--theta", f.theta, "quadratic irrational (p+q*sqrt(D))/r");
  cmd->add_option("--g", f.g, "matrix entries a,b,c,d");
  cmd->add_option("--tau", f.tau, "re,im with im > 0");
  cmd->add_option("--epsilon", f.epsilon, "epsilon level 0, 1 or 2");
  cmd->add_option("--grade", f.grade, "grade n (max grade for verify)");
  cmd->add_option("--tol", f.tol, "truncation tolerance");
  cmd->add_option("--out", f.out, "write the JSON report here instead of stdout");
}

RunConfig load(const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw DomainError("cannot read config file " + f.config);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw DomainError(std::string("config is not valid JSON: ") + e.what());
    }
    cfg = config_from_json(j);
  }
  if (!f.theta.empty()) cfg.theta = f.theta;
  if (!f.g.empty()) cfg.g = parse_matrix(f.g);
  if (!f.tau.empty()) cfg.tau = parse_complex(f.tau);
  if (f.epsilon) cfg.epsilon_level = *f.epsilon;
  if (f.grade) cfg.max_grade = *f.grade;
  if (f.tol) cfg.trunc_tol = *f.tol;
  if (!f.out.empty()) cfg.out_path = f.out;
  return cfg;
}

void emit(const RunConfig& cfg, const Json& j) {
  const std::string text = dump_stable(j) + "\n";
  if (cfg.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out_path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + cfg.out_path);
  out << text;
}

int cmd_find_g(const RunConfig& cfg) {
  if (cfg.theta.empty()) throw DomainError("theta is required");
  auto theta = QuadraticIrrational::parse(cfg.theta);
  if (!(cfg.trunc_tol > 0)) throw DomainError("trunc_tol must be positive");
  IntMatrix2 g;
  if (cfg.g) {
    g = *cfg.g;
    if (auto why = s_theta_violation(g, theta)) {
      emit(cfg, {{"g", to_json(g)}, {"error", "g not in S_theta"}, {"violation", *why}});
      return kFail;
    }
  } else {
    try {
      g = find_generating_g(theta, cfg.epsilon_level);
    } catch (const DomainError& e) {
      emit(cfg, {{"theta", to_json(theta.value())}, {"error", e.what()}, {"criterion", "|theta - theta'| < 1"}});
      return kFail;
    }
  }
  Json proof = {{"det", to_json(g.det())},
                {"trace", to_json(g.trace())},
                {"c", to_json(g.c)},
                {"det_is_one", g.det() == 1},
                {"not_plus_minus_identity", !g.is_plus_minus_identity()},
                {"trace_positive", g.trace() > 0},
                {"c_positive", g.c > 0},
                {"fixes_theta", mobius_apply(g, theta) == theta.value()}};
  Json j = {{"theta", to_json(theta.value())},
            {"g", to_json(g)},
            {"S_theta_proof", proof},
            {"c_gt_a_plus_d", g.c > g.a + g.d + cfg.epsilon_level},
            {"epsilon_level", cfg.epsilon_level},
            {"polishchuk",
             {{"e0", polishchuk_predicate(g, 0)}, {"e1", polishchuk_predicate(g, 1)}, {"e2", polishchuk_predicate(g, 2)}}}};
  emit(cfg, j);
  return kPass;
}

int cmd_table(const RunConfig& cfg, unsigned n, unsigned m) {
  validate(cfg);
  const IntMatrix2 g = resolve_g(cfg);
  const auto theta = QuadraticIrrational::parse(cfg.theta);
  RingContext ctx(g, theta, cfg.tau, cfg.trunc_tol, n + m);
  GeometryPtr Gn = ctx.geometry(n), Gm = ctx.geometry(m), GN = ctx.geometry(n + m);

  Eigen::MatrixXcd B = star_table(ctx, n, m);
  Json A = Json::array();
  for (std::int64_t i = 0; i < Gn->cn; ++i) {
    Json row = Json::array();
    for (std::int64_t k = 0; k < Gm->cn; ++k) {
      Json col = Json::array();
      for (std::int64_t p = 0; p < GN->cn; ++p) col.push_back(to_json(cplx(B(p, i * Gm->cn + k))));
      row.push_back(col);
    }
    A.push_back(row);
  }

  // 1 * 1 with the classical theta constants beside it
  Json unit = Json::array();
  double worst = 0;
  const cplx ts = cfg.tau * double(GN->cn) / double(Gn->cn * Gm->cn);
  for (std::int64_t p = 0; p < GN->cn; ++p) {
    cplx val = B.row(p).sum();
    cplx oracle = classical_theta({Rational(Gm->cn * GN->dn * p, GN->cn), 0}, 0.0, ts);
    worst = std::max(worst, std::abs(val - oracle));
    unit.push_back({{"alpha", p}, {"value", to_json(val)}, {"oracle", to_json(oracle)}});
  }

  // <e_i, e_j> coefficients on |m|_inf <= ceil(c / 2)
  auto inner_tensor = [&](unsigned k) {
    GeometryPtr G = ctx.geometry(k);
    const std::int64_t c = G->cn;
    const std::int64_t r = (c + 1) / 2;
    Json entries = Json::array();
    for (std::int64_t m1 = -r; m1 <= r; ++m1)
      for (std::int64_t m2 = -r; m2 <= r; ++m2) {
        const cplx kern = holo_kernel(*G, {m1, m2});
        for (std::int64_t j = 0; j < c; ++j) {
          const std::int64_t i = (((j + G->an * m1) % c) + c) % c;
          const cplx v = kern * e(double(((j * m2) % c + c) % c) / double(c));
          entries.push_back({{"i", i}, {"j", j}, {"m1", m1}, {"m2", m2}, {"re", v.real()}, {"im", v.imag()}});
        }
      }
    return Json{{"grade", k}, {"c", c}, {"radius", r}, {"coeffs", entries}};
  };
  Json tensors = Json::array({inner_tensor(n)});
  if (m != n) tensors.push_back(inner_tensor(m));

  Json j = {{"theta", to_json(theta.value())},
            {"g", to_json(g)},
            {"tau", to_json(cfg.tau)},
            {"n", n},
            {"m", m},
            {"c_n", Gn->cn},
            {"c_m", Gm->cn},
            {"c_nm", GN->cn},
            {"A", A},
            {"unit_product", unit},
            {"unit_product_max_diff", worst},
            {"inner_product_tensors", tensors}};
  emit(cfg, j);
  return kPass;
}

Rational parse_rational(const std::string& s) {
  static const std::regex re(R"(\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*)");
  std::smatch mt;
  if (!std::regex_match(s, mt, re)) throw DomainError("malformed rational '" + s + "'");
  const std::int64_t den = mt[2].matched ? std::stoll(mt[2].str()) : 1;
  if (den == 0) throw DomainError("zero denominator in '" + s + "'");
  return Rational(std::stoll(mt[1].str()), den);
}

int cmd_theta_eval(const std::string& a, const std::string& b, const std::string& z, const std::string& tau,
                   double tol) {
  ThetaCharacteristic ch{parse_rational(a), parse_rational(b)};
  const cplx zz = parse_complex(z), tt = parse_complex(tau);
  if (!(tt.imag() > 0)) throw DomainError("Im tau must be positive");
  if (!(tol > 0)) throw DomainError("tol must be positive");
  const cplx v = classical_theta(ch, zz, tt, tol);
  std::printf("%.17g %+.17gi\n", v.real(), v.imag());
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graded rings of holomorphic vectors and quantum theta functions"};
  app.require_subcommand(1);

  Flags ff, ft, fv;
  auto* find = app.add_subcommand("find-g", "find or check g in S_theta and print its certificate");
  add_common(find, ff);

  auto* table = app.add_subcommand("table", "multiplication table E_n x E_m -> E_{n+m}");
  add_common(table, ft);
  unsigned other = 1;
  table->add_option("--with", other, "second grade m (default 1)");

  auto* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify, fv);
  std::string suite = "all";
  verify->add_option("--suite", suite, "arith, torus, bimodule, rings or all")
      ->check(CLI::IsMember({"arith", "torus", "bimodule", "rings", "all"}));

  auto* teval = app.add_subcommand("theta-eval", "classical theta with rational characteristic");
  std::string ta = "0", tb = "0", tz = "0,0", ttau = "0,1";
  double ttol = 1e-15;
  teval->add_option("--a", ta, "characteristic a as p/q");
  teval->add_option("--b", tb, "characteristic b as p/q");
  teval->add_option("--z", tz, "re,im");
  teval->add_option("--tau", ttau, "re,im");
  teval->add_option("--tol", ttol, "tail tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kConfig;
  }

  RunConfig cfg;
  try {
    if (*find) cfg = load(ff);
    if (*table) cfg = load(ft);
    if (*verify) cfg = load(fv);
    if (*verify) validate(cfg);
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  }

  try {
    if (*find) return cmd_find_g(cfg);
    if (*table) return cmd_table(cfg, ft.grade.value_or(1), other);
    if (*teval) return cmd_theta_eval(ta, tb, tz, ttau, ttol);
    auto res = run_suite(cfg, suite);
    emit(cfg, res.report);
    if (res.budget_exceeded) {
      std::cerr << "radius budget exceeded; raise QTHETA_RADIUS_BUDGET or lower the grade\n";
      return kBudget;
    }
    return res.pass ? kPass : kFail;
  } catch (const RadiusBudgetExceeded& e) {
    std::cerr << "radius budget exceeded: " << e.what() << " (required " << e.required() << ", budget " << e.budget()
              << ")\n";
    return kBudget;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
}
