// Command-line workbench: every experiment is a subcommand that reads a
// plain-text config, writes a results directory (manifest + CSV + summary)
// and reports through its exit code: 0 = all assertions pass, 1 = usage or
// config error, 2 = assertion (tolerance) failure.
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dalembert_oracle.hpp"
#include "lcqft/config.hpp"
#include "lcqft/deformation.hpp"
#include "lcqft/dynamics.hpp"
#include "lcqft/report.hpp"
#include "lcqft/states.hpp"

using namespace lcqft;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  unsigned seed = 12345;
  int refine = 3;
  double tol_scale = 1.0;
};

struct RunContext {
  Config cfg;
  RunOptions opt;
  std::string dir;  // output directory of this run
  Summary summary;

  double tol(double base) const { return base * opt.tol_scale; }
};

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> k = {
      {"spacetime", {"family", "n_t", "n_x", "dt_factor", "amp"}},
      {"field", {"m_sq", "xi"}},
      {"run", {"seed"}},
      {"perturbation", {"t0", "x0", "wt", "wx", "amp_beta", "amp_a"}},
      {"region", {"t", "x", "radius"}},
      {"worldline", {"x", "t_lo", "t_hi"}},
      {"sampling", {"center", "width"}},
      {"dynloc", {"n_t", "n_x", "radius", "samples"}},
      {"qei", {"states"}},
      {"green", {"base_n_x"}},
  };
  return k;
}

Config default_config() {
  return Config::parse_text(
      "[spacetime]\n"
      "family = flat\n"
      "n_t = 128\n"
      "n_x = 256\n"
      "dt_factor = 0.5\n"
      "[field]\n"
      "m_sq = 1\n"
      "xi = 0\n");
}

Spacetime build_spacetime(const Config& cfg, int n_t_override = 0,
                          int n_x_override = 0, double dtf_override = 0.0) {
  const int n_t = n_t_override ? n_t_override : cfg.get_int_or("spacetime", "n_t", 128);
  const int n_x = n_x_override ? n_x_override : cfg.get_int_or("spacetime", "n_x", 256);
  const double dtf = dtf_override != 0.0
                         ? dtf_override
                         : cfg.get_double_or("spacetime", "dt_factor", 0.5);
  const double amp = cfg.get_double_or("spacetime", "amp", 0.3);
  const double m_sq = cfg.get_double_or("field", "m_sq", 1.0);
  const double xi = cfg.get_double_or("field", "xi", 0.0);
  const std::string family = cfg.get_or("spacetime", "family", "flat");
  const double dx = 2.0 * kPi / n_x;
  Grid beta = Grid::Ones(n_t, n_x), a = Grid::Ones(n_t, n_x);
  if (family == "flat") {
    // defaults
  } else if (family == "bump") {
    for (int t = 0; t < n_t; ++t)
      for (int x = 0; x < n_x; ++x)
        a(t, x) = 1.0 + amp * poly_bump(periodic_delta(x, n_x / 2, n_x) / (0.3 * n_x));
  } else if (family == "cosmological") {
    for (int t = 0; t < n_t; ++t) {
      const double s = smoothstep((t - 0.3 * n_t) / (0.4 * n_t));
      for (int x = 0; x < n_x; ++x) a(t, x) = 1.0 + amp * s;
    }
  } else {
    throw ConfigError("unknown spacetime family `" + family + "`", 0);
  }
  return Spacetime(n_t, n_x, dtf * dx, dx, std::move(beta), std::move(a),
                   KGParams{m_sq, xi});
}

// Time-dependent variant of the configured family for deformation runs.
Spacetime build_deformed(const Config& cfg, int n_t, int n_x) {
  Config c = cfg;
  c.set("spacetime", "family", "cosmological");
  return build_spacetime(c, n_t, n_x);
}

TestFunction random_bump(const Spacetime& M, std::mt19937& rng) {
  const int pad = M.n_pad() + 1;
  std::uniform_int_distribution<int> td(pad + 2, M.n_t() - pad - 3);
  std::uniform_int_distribution<int> xd(0, M.n_x() - 1);
  std::uniform_real_distribution<double> wd(2.0, 5.0);
  std::uniform_real_distribution<double> ad(-1.0, 1.0);
  return TestFunction::bump(M, td(rng), xd(rng), wd(rng), wd(rng),
                            Complex(ad(rng), ad(rng)));
}

void write_run_manifest(const RunContext& ctx, const std::string& subcommand) {
  write_manifest(ctx.dir + "/manifest.txt",
                 {{"tool", "lcqft"},
                  {"version", kVersion},
                  {"subcommand", subcommand},
                  {"seed", std::to_string(ctx.opt.seed)},
                  {"refine", std::to_string(ctx.opt.refine)},
                  {"tol_scale", format_double(ctx.opt.tol_scale)},
                  {"config", "\n" + ctx.cfg.to_text()}});
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each records PASS/FAIL lines in ctx.summary and writes
// CSV artifacts into ctx.dir.

void run_green(RunContext& ctx) {
  const int base = ctx.cfg.get_int_or("green", "base_n_x", 64);
  CsvWriter csv(ctx.dir + "/convergence.csv", {"n_x", "error", "order"});
  double prev = 0.0;
  double worst_order = 1e9;
  int n_x = base;
  for (int r = 0; r < std::max(2, ctx.opt.refine); ++r, n_x *= 2) {
    const double err = testutil::dalembert_green_error(n_x);
    const double order = (r == 0) ? 0.0 : std::log2(prev / err);
    if (r > 0) worst_order = std::min(worst_order, order);
    csv.row({static_cast<double>(n_x), err, order});
    prev = err;
  }
  ctx.summary.add("green.order_ge_1.8", worst_order >= 1.8,
                  "worst observed order " + format_double(worst_order));

  // Solver residual on the configured spacetime.
  const Spacetime M = build_spacetime(ctx.cfg, 64, 64);
  std::mt19937 rng(ctx.opt.seed);
  const TestFunction f = random_bump(M, rng);
  const CGrid u = green_retarded(M, f.values);
  const CGrid res = apply_P(M, u) - f.values;
  double rmax = 0.0;
  for (int t = 1; t < M.n_t() - 1; ++t) rmax = std::max(rmax, res.row(t).abs().maxCoeff());
  ctx.summary.add("green.residual", rmax <= ctx.tol(1e-12), format_double(rmax));
}

void run_ccr(RunContext& ctx) {
  const Spacetime M = build_spacetime(ctx.cfg, 48, 48);
  const CcrContext alg = CcrContext::of(M);
  const int t_ref = M.n_t() / 2;
  std::mt19937 rng(ctx.opt.seed);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  double lin = 0.0, kg3 = 0.0, kg4 = 0.0;
  bool adj = true;
  CsvWriter csv(ctx.dir + "/axioms.csv", {"trial", "linearity", "p_image", "commutator"});
  for (int trial = 0; trial < 20; ++trial) {
    const TestFunction f = random_bump(M, rng);
    const TestFunction h = random_bump(M, rng);
    const Complex a(ud(rng), ud(rng)), b(ud(rng), ud(rng));
    const CGrid lhs = e_solution(M, a * f.values + b * h.values);
    const CGrid rhs = a * e_solution(M, f.values) + b * e_solution(M, h.values);
    const double v_lin = (lhs - rhs).abs().maxCoeff() / (1.0 + rhs.abs().maxCoeff());
    TestFunction fc = f;
    fc.values = f.values.conjugate();
    if (sub(adjoint(alg, gen(alg, M, f, t_ref)), gen(alg, M, fc, t_ref)).coeff_norm() != 0.0)
      adj = false;
    TestFunction pf = TestFunction::zero(M);
    pf.values = apply_P(M, f.values);
    const double v3 =
        gen(alg, M, pf, t_ref).coeff_norm() / (1.0 + f.values.abs().maxCoeff());
    const Complex e = commutator_function(M, f, h);
    const double v4 =
        sub(commutator(alg, gen(alg, M, f, t_ref), gen(alg, M, h, t_ref)),
            AlgebraElement::unit(alg.dim(), Complex(0, 1) * e))
            .coeff_norm() /
        (1.0 + std::abs(e));
    csv.row({static_cast<double>(trial), v_lin, v3, v4});
    lin = std::max(lin, v_lin);
    kg3 = std::max(kg3, v3);
    kg4 = std::max(kg4, v4);
  }
  ctx.summary.add("ccr.linearity", lin <= ctx.tol(1e-12), format_double(lin));
  ctx.summary.add("ccr.adjoint", adj, adj ? "exact" : "violated");
  ctx.summary.add("ccr.p_image", kg3 <= ctx.tol(1e-12), format_double(kg3));
  ctx.summary.add("ccr.commutator", kg4 <= ctx.tol(1e-11), format_double(kg4));
}

void run_causality(RunContext& ctx) {
  const Spacetime M = build_spacetime(ctx.cfg, 48, 48);
  const Spacetime D = build_deformed(ctx.cfg, 48, 48);
  const RigidityReport rep =
      verify_causality_rigidity(M, D, 50, ctx.opt.seed, ctx.tol(1e-11));
  CsvWriter csv(ctx.dir + "/pairs.csv",
                {"pair", "touching", "residual_flat", "residual_deformed"});
  for (size_t i = 0; i < rep.pairs.size(); ++i)
    csv.row({static_cast<double>(i), rep.pairs[i].touching ? 1.0 : 0.0,
             rep.pairs[i].residual_flat, rep.pairs[i].residual_deformed});
  ctx.summary.add("causality.all_pairs", rep.all_pass,
                  "max residual " + format_double(rep.max_residual));
}

void run_timeslice(RunContext& ctx) {
  const Spacetime M = build_spacetime(ctx.cfg, 48, 48);
  std::mt19937 rng(ctx.opt.seed);
  const int lo = M.n_t() / 2 - 2, hi = M.n_t() / 2 + 2;
  double band = 0.0;
  bool supp = true;
  CsvWriter csv(ctx.dir + "/representatives.csv", {"trial", "quotient_defect"});
  for (int trial = 0; trial < 25; ++trial) {
    const TestFunction f = random_bump(M, rng);
    const TestFunction g = timeslice_representative(M, f, lo, hi);
    const Region sg = g.support(1e-300);
    if (!sg.empty() && (sg.t_min() < lo || sg.t_max() > hi)) supp = false;
    const CauchyData df = to_quotient(M, f, 5), dg = to_quotient(M, g, 5);
    const double d = std::max((df.phi - dg.phi).cwiseAbs().maxCoeff(),
                              (df.pi - dg.pi).cwiseAbs().maxCoeff()) /
                     (1.0 + data_norm(M, df));
    csv.row({static_cast<double>(trial), d});
    band = std::max(band, d);
  }
  const int tc = ctx.cfg.get_int_or("region", "t", 24);
  const int xc = ctx.cfg.get_int_or("region", "x", 12);
  const int rad = ctx.cfg.get_int_or("region", "radius", 5);
  const Region O = Region::interval(M.n_t(), M.n_x(), tc, xc, rad)
                       .unite(Region::interval(M.n_t(), M.n_x(), tc + 1, xc, rad));
  const KinematicSubalgebra kO = kinematic_subspace(M, O, 8);
  const KinematicSubalgebra kD = kinematic_subspace(M, cauchy_development(M, O), 8);
  const double angle = principal_angles(kO.basis, kD.basis).maxCoeff();
  ctx.summary.add("timeslice.band_support", supp, supp ? "inside band" : "escapes band");
  ctx.summary.add("timeslice.quotient", band <= ctx.tol(1e-12), format_double(band));
  ctx.summary.add("timeslice.development_angle",
                  kO.dim() == kD.dim() && angle <= ctx.tol(1e-6),
                  format_double(angle));
}

MetricPerturbation config_perturbation(const RunContext& ctx, const Spacetime& M) {
  return MetricPerturbation::bump(
      M, ctx.cfg.get_int_or("perturbation", "t0", 20),
      ctx.cfg.get_int_or("perturbation", "x0", M.n_x() / 2),
      ctx.cfg.get_double_or("perturbation", "wt", 3.0),
      ctx.cfg.get_double_or("perturbation", "wx", 3.0),
      ctx.cfg.get_double_or("perturbation", "amp_beta", 0.08),
      ctx.cfg.get_double_or("perturbation", "amp_a", 0.05));
}

void run_rce(RunContext& ctx) {
  const Spacetime M = build_spacetime(ctx.cfg, 64, 32);
  const int t_ref = 40, n = 2 * M.n_x();
  const MetricPerturbation h = config_perturbation(ctx, M);
  const RceMap r0 = rce(M, MetricPerturbation::zero(M), t_ref);
  const double idd = (r0.map - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  const RceMap R = rce(M, h, t_ref);
  const RceMap Rt = rce_via_transport(M, h, t_ref);
  const RceMap Rw = rce_via_transport_at(M, h, t_ref, h.support.t_min() - 4,
                                         h.support.t_max() + 5);
  const double oracle = (R.map - Rt.map).cwiseAbs().maxCoeff();
  const double bracket = (Rt.map - Rw.map).cwiseAbs().maxCoeff();
  const double sympl = std::max(symplecticity_defect(M, R), symplecticity_defect(M, Rt));
  const Region far =
      Region::interval(M.n_t(), M.n_x(), 20,
                       (ctx.cfg.get_int_or("perturbation", "x0", M.n_x() / 2) +
                        M.n_x() / 2) % M.n_x(),
                       2)
          .unite(Region::interval(M.n_t(), M.n_x(), 21,
                                  (ctx.cfg.get_int_or("perturbation", "x0",
                                                      M.n_x() / 2) +
                                   M.n_x() / 2) %
                                      M.n_x(),
                                  2));
  const KinematicSubalgebra kin = kinematic_subspace(M, far, t_ref);
  const double local = (R.map * kin.basis - kin.basis).cwiseAbs().maxCoeff();
  CsvWriter csv(ctx.dir + "/defects.csv",
                {"identity", "transport_oracle", "bracket", "symplectic", "locality"});
  csv.row({idd, oracle, bracket, sympl, local});
  ctx.summary.add("rce.identity", idd <= ctx.tol(1e-12), format_double(idd));
  ctx.summary.add("rce.transport_oracle", oracle <= ctx.tol(1e-10), format_double(oracle));
  ctx.summary.add("rce.bracket_choice", bracket <= ctx.tol(1e-10), format_double(bracket));
  ctx.summary.add("rce.symplectic", sympl <= ctx.tol(1e-10), format_double(sympl));
  ctx.summary.add("rce.locality", local <= ctx.tol(1e-11), format_double(local));
}

void run_stress_energy(RunContext& ctx) {
  const Spacetime M = build_spacetime(ctx.cfg, 64, 48);
  const MetricPerturbation h = config_perturbation(ctx, M);
  const int t_ref = 40;
  const TestFunction f = TestFunction::bump(M, 28, 20, 3.0, 4.0, 0.9);
  const CauchyData want = stress_energy_pairing(M, h, f, t_ref);
  const double scale = data_norm(M, want);
  CsvWriter csv(ctx.dir + "/derivative.csv", {"step", "error", "order"});
  double prev = 0.0, order = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double s = 0.2 / (1 << i);
    const CauchyData fd = rce_derivative_fd(M, h, f, t_ref, s);
    const double err = std::max((fd.phi - want.phi).cwiseAbs().maxCoeff(),
                                (fd.pi - want.pi).cwiseAbs().maxCoeff());
    order = (i == 0) ? 0.0 : std::log2(prev / err);
    csv.row({s, err, order});
    prev = err;
  }
  const CauchyData rich = rce_derivative(M, h, f, t_ref, 0.1);
  const double rel = std::max((rich.phi - want.phi).cwiseAbs().maxCoeff(),
                              (rich.pi - want.pi).cwiseAbs().maxCoeff()) /
                     scale;
  ctx.summary.add("stress_energy.identity", rel <= ctx.tol(1e-6), format_double(rel));
  ctx.summary.add("stress_energy.order", order >= 1.8, format_double(order));
}

void run_conserve(RunContext& ctx) {
  const int n_x = 256, n_t = 2048;
  Config flat = ctx.cfg;
  flat.set("spacetime", "family", "flat");
  const Spacetime M = build_spacetime(flat, n_t, n_x, 0.125);
  const double T = n_t * M.dt(), t0 = 0.35 * T, wt = 0.25 * T;
  MetricPerturbation gauge = MetricPerturbation::zero(M);
  for (int t = 0; t < n_t; ++t) {
    const double fp = poly_bump_du((t * M.dt() - t0) / wt, 6) / wt;
    if (fp == 0.0) continue;
    for (int x = 0; x < n_x; ++x) {
      gauge.d_beta(t, x) = 2.0 * fp;
      gauge.support.set(t, x);
    }
  }
  MetricPerturbation generic = MetricPerturbation::bump(
      M, static_cast<int>(0.35 * n_t), n_x / 3, n_t / 8.0, n_x / 6.0, 1.0, 0.0);
  generic = generic.scaled(
      std::sqrt(gauge.d_beta.square().sum() / generic.d_beta.square().sum()));
  const TestFunction f = TestFunction::bump(
      M, static_cast<int>(0.78 * n_t), n_x / 2, n_t / 16.0, n_x / 10.0, 1.0);
  const int t_ref = static_cast<int>(0.92 * n_t);
  const double n_gauge = data_norm(M, stress_energy_pairing(M, gauge, f, t_ref));
  const double n_generic = data_norm(M, stress_energy_pairing(M, generic, f, t_ref));
  const double ratio = n_gauge / n_generic;
  CsvWriter csv(ctx.dir + "/conservation.csv",
                {"gauge_response", "generic_response", "ratio"});
  csv.row({n_gauge, n_generic, ratio});
  ctx.summary.add("conserve.flow_response", ratio <= ctx.tol(1e-5),
                  "ratio " + format_double(ratio));
}

void run_dynloc(RunContext& ctx) {
  const int n_t = ctx.cfg.get_int_or("dynloc", "n_t", 48);
  const int n_x = ctx.cfg.get_int_or("dynloc", "n_x", 32);
  const int rad = ctx.cfg.get_int_or("dynloc", "radius", 2);
  const int samples = ctx.cfg.get_int_or("dynloc", "samples", 20);
  const int t_c = n_t / 2;
  const Region waist = Region::interval(n_t, n_x, t_c, n_x / 4, rad)
                           .unite(Region::interval(n_t, n_x, t_c + 1, n_x / 4, rad));
  Config flat = ctx.cfg;
  flat.set("spacetime", "family", "flat");
  Config massless = flat;
  massless.set("field", "m_sq", "0");
  massless.set("field", "xi", "0");
  const Spacetime M1 = build_spacetime(flat, n_t, n_x);
  const Spacetime M0 = build_spacetime(massless, n_t, n_x);
  const DynLocReport a = dynamical_vs_kinematic(
      M1, cauchy_development(M1, waist), t_c, samples, ctx.opt.seed);
  const DynLocReport b = dynamical_vs_kinematic(
      M0, cauchy_development(M0, waist), t_c, samples, ctx.opt.seed + 1);
  CsvWriter csv(ctx.dir + "/dimensions.csv",
                {"m_sq", "dim_dynamical", "dim_kinematic", "max_angle", "surplus"});
  csv.row({M1.kg().m_sq, static_cast<double>(a.dim_dynamical),
           static_cast<double>(a.dim_kinematic), a.max_angle,
           static_cast<double>(a.surplus)});
  csv.row({0.0, static_cast<double>(b.dim_dynamical),
           static_cast<double>(b.dim_kinematic), b.max_angle,
           static_cast<double>(b.surplus)});
  ctx.summary.add("dynloc.massive_match",
                  a.verdict == "match" && a.max_angle <= ctx.tol(1e-3),
                  a.verdict + ", angle " + format_double(a.max_angle));
  ctx.summary.add("dynloc.massless_surplus", b.surplus >= 1,
                  b.verdict + ", surplus " + std::to_string(b.surplus));
}

void run_vacuum(RunContext& ctx) {
  Config static_cfg = ctx.cfg;
  if (ctx.cfg.get_or("spacetime", "family", "flat") == "cosmological")
    static_cfg.set("spacetime", "family", "flat");
  const Spacetime M = build_spacetime(static_cfg, 48, 32);
  const QuasifreeState v = ultrastatic_vacuum(M, 10);
  const double ccr = ccr_defect(M, v);
  const double mine = min_eigenvalue(v);
  const QuasifreeState pulled =
      bogoliubov_transport(M, ultrastatic_vacuum(M, 30), transport_matrix(M, 10, 30));
  const double stat = (pulled.W - v.W).cwiseAbs().maxCoeff();
  const ModeData md = spatial_modes(M);
  CsvWriter csv(ctx.dir + "/modes.csv", {"k", "nu", "omega"});
  for (int k = 0; k < md.n_modes(); ++k) csv.row({static_cast<double>(k), md.nu(k), md.omega(k)});
  ctx.summary.add("vacuum.ccr", ccr <= ctx.tol(1e-12), format_double(ccr));
  ctx.summary.add("vacuum.positivity", mine >= -ctx.tol(1e-12), format_double(mine));
  ctx.summary.add("vacuum.stationary", stat <= ctx.tol(1e-10), format_double(stat));
}

void run_qei(RunContext& ctx) {
  Config static_cfg = ctx.cfg;
  if (ctx.cfg.get_or("spacetime", "family", "flat") == "cosmological")
    static_cfg.set("spacetime", "family", "flat");
  const Spacetime M = build_spacetime(static_cfg, 64, 32);
  const Worldline g = Worldline::static_line(
      M, ctx.cfg.get_int_or("worldline", "x", 10),
      ctx.cfg.get_int_or("worldline", "t_lo", 5),
      ctx.cfg.get_int_or("worldline", "t_hi", 55));
  const SamplingFunction f = SamplingFunction::gaussian(
      g, ctx.cfg.get_double_or("sampling", "center", 0.5),
      ctx.cfg.get_double_or("sampling", "width", 0.18));
  const int n_states = ctx.cfg.get_int_or("qei", "states", 220);
  const QeiReport rep = qei_check(M, g, f, n_states, ctx.opt.seed);
  CsvWriter csv(ctx.dir + "/qei.csv", {"state", "averaged_energy", "bound"});
  for (size_t i = 0; i < rep.values.size(); ++i)
    csv.row({static_cast<double>(i), rep.values[i], rep.bound});
  ctx.summary.add("qei.bound_negative", rep.bound < 0.0, format_double(rep.bound));
  ctx.summary.add("qei.all_above_bound", rep.all_above,
                  "min " + format_double(rep.min_sampled));
  ctx.summary.add("qei.negative_attained", rep.negative_attained,
                  rep.negative_attained ? "yes" : "no");
}

void run_deform(RunContext& ctx) {
  const int n_t = 64, n_x = 24;
  Config flat = ctx.cfg;
  flat.set("spacetime", "family", "flat");
  Config bump = ctx.cfg;
  bump.set("spacetime", "family", "bump");
  const Spacetime A = build_spacetime(flat, n_t, n_x);
  const Spacetime B = build_spacetime(bump, n_t, n_x);
  const CauchyChain chain = interpolate(A, B, 24, 36, 10, 50);
  const Spacetime mid = interpolating_spacetime(A, B, 24, 36);
  const double oracle =
      (chain.composite - transport_matrix(mid, 10, 50)).cwiseAbs().maxCoeff();
  const QuasifreeState pulled =
      transport_state(A, chain, ultrastatic_vacuum(B, 50));
  CsvWriter csv(ctx.dir + "/chain.csv",
                {"symplectic_defect", "transport_oracle", "state_ccr", "state_min_eig"});
  csv.row({chain.symplectic_defect, oracle, ccr_defect(A, pulled),
           min_eigenvalue(pulled)});
  ctx.summary.add("deform.symplectic", chain.symplectic_defect <= ctx.tol(1e-10),
                  format_double(chain.symplectic_defect));
  ctx.summary.add("deform.transport_oracle", oracle <= ctx.tol(1e-9),
                  format_double(oracle));
  ctx.summary.add("deform.state_valid",
                  ccr_defect(A, pulled) <= ctx.tol(1e-11) &&
                      min_eigenvalue(pulled) >= -ctx.tol(1e-10),
                  "ccr " + format_double(ccr_defect(A, pulled)));
}

void run_no_natural_state(RunContext& ctx) {
  const int n_t = 96, n_x = 32;
  Config flat = ctx.cfg;
  flat.set("spacetime", "family", "flat");
  Config bump = ctx.cfg;
  bump.set("spacetime", "family", "bump");
  const Spacetime A = build_spacetime(flat, n_t, n_x);
  const Spacetime B = build_spacetime(bump, n_t, n_x);
  const CauchyChain trivial = interpolate(A, A, 36, 44, 15, 80);
  const double n_triv =
      particle_number(A, transport_state(A, trivial, ultrastatic_vacuum(A, 80))).total;
  const CauchyChain chain = interpolate(A, B, 36, 44, 15, 80);
  const QuasifreeState pulled = transport_state(A, chain, ultrastatic_vacuum(B, 80));
  const ParticleReport pr = particle_number(A, pulled);
  CsvWriter csv(ctx.dir + "/particles.csv", {"k", "n_k"});
  for (int k = 0; k < pr.n_k.size(); ++k) csv.row({static_cast<double>(k), pr.n_k(k)});
  ctx.summary.add("no_natural_state.trivial_chain", n_triv <= ctx.tol(1e-10),
                  "N " + format_double(n_triv));
  ctx.summary.add("no_natural_state.deformed_chain", pr.total > 1e-6,
                  "N " + format_double(pr.total));
}

// ---------------------------------------------------------------------------

int run_subcommand(const std::string& name, const RunOptions& opt,
                   const std::function<void(RunContext&)>& body) {
  RunContext ctx;
  try {
    ctx.opt = opt;
    ctx.cfg = opt.config_path.empty() ? default_config()
                                      : Config::parse_file(opt.config_path);
    ctx.cfg.validate(allowed_keys());
    if (ctx.cfg.has("run", "seed") && opt.seed == 12345)
      ctx.opt.seed = static_cast<unsigned>(ctx.cfg.get_int("run", "seed"));
    std::string base = opt.out_dir;
    if (base.empty()) {
      const char* env = std::getenv("LCQFT_OUT_DIR");
      base = env ? env : "lcqft_out";
    }
    ctx.dir = ensure_directory(base + "/" + name);
    write_run_manifest(ctx, name);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 1;
  }
  try {
    body(ctx);
  } catch (const std::exception& e) {
    std::cerr << "error while running `" << name << "`: " << e.what() << std::endl;
    return 1;
  }
  ctx.summary.write(ctx.dir + "/summary.txt");
  std::cout << ctx.summary.text();
  return ctx.summary.all_pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice workbench for the free scalar field on curved backgrounds"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunOptions opt;
  const std::map<std::string, std::function<void(RunContext&)>> bodies = {
      {"green", run_green},
      {"ccr", run_ccr},
      {"causality", run_causality},
      {"timeslice", run_timeslice},
      {"rce", run_rce},
      {"stress-energy", run_stress_energy},
      {"conserve", run_conserve},
      {"dynloc", run_dynloc},
      {"vacuum", run_vacuum},
      {"qei", run_qei},
      {"deform", run_deform},
      {"no-natural-state", run_no_natural_state},
  };
  const std::map<std::string, std::string> descriptions = {
      {"green", "solver residuals and convergence study"},
      {"ccr", "field-equation and commutation axioms"},
      {"causality", "spacelike commutator vanishing incl. deformed metrics"},
      {"timeslice", "band representatives and development subspaces"},
      {"rce", "response maps: oracle, symplecticity, locality"},
      {"stress-energy", "derivative identity and convergence order"},
      {"conserve", "null response to flow-generated perturbations"},
      {"dynloc", "dynamical vs kinematic local observables"},
      {"vacuum", "ground-state construction checks"},
      {"qei", "averaged energy bounds over Gaussian states"},
      {"deform", "interpolating chains and state transport"},
      {"no-natural-state", "particle creation across a deformation"},
  };
  for (const auto& [name, body] : bodies) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--config", opt.config_path, "config file (key = value sections)");
    sub->add_option("--out", opt.out_dir, "output directory (default $LCQFT_OUT_DIR)");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--refine", opt.refine, "refinement levels for convergence studies");
    sub->add_option("--tol-scale", opt.tol_scale, "multiply all tolerances");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  return run_subcommand(name, opt, bodies.at(name));
}
