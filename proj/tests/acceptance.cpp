// Acceptance suite: one scenario per shipped guarantee, parameters and
// tolerances pinned in code so a loosened check shows up as a source diff.
// Prints exactly one [PASS]/[FAIL] line per criterion; exits nonzero if any
// selected criterion fails.  Run with no arguments for all ten, or pass a
// single criterion number.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlch/harness.hpp"

using namespace nlch;

namespace {

double row_field(const std::string& row, int idx) {
  std::stringstream ss(row);
  std::string tok;
  for (int k = 0; k <= idx; ++k)
    if (!std::getline(ss, tok, ',')) throw std::runtime_error("row_field: short row: " + row);
  return std::strtod(tok.c_str(), nullptr);
}

double note_value(const ConvergenceReport& rep, const std::string& key) {
  for (const auto& [k, v] : rep.notes)
    if (k == key) return std::strtod(v.c_str(), nullptr);
  throw std::runtime_error("note_value: report has no note '" + key + "'");
}

std::string fmtg(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

PotentialSpec potential(PotentialSpec::Kind k) {
  PotentialSpec p;
  p.kind = k;
  return p;
}

const PotentialSpec::Kind kAllKinds[] = {PotentialSpec::polynomial, PotentialSpec::logarithmic,
                                         PotentialSpec::double_obstacle};

const char* kind_name(PotentialSpec::Kind k) {
  switch (k) {
    case PotentialSpec::polynomial: return "polynomial";
    case PotentialSpec::logarithmic: return "logarithmic";
    case PotentialSpec::double_obstacle: return "double_obstacle";
  }
  return "?";
}

// ------------------------------------------------------------- criterion 1
// The assembled operator and the independent pair-sum energy must satisfy
// 2 E(phi) = (B phi, phi)_H on random fields, both families, d = 1 and 2.
bool crit_quadratic_form(std::string& detail) {
  double worst = 0.0;
  for (int dim : {1, 2}) {
    const Grid g(dim, dim == 1 ? 64 : 24);
    const double eps = dim == 1 ? 0.2 : 0.25;
    for (auto fam : {MollifierSpec::indicator, MollifierSpec::bump}) {
      const KernelMatrix km = assemble_kernel(g, make_mollifier(fam, eps, dim));
      const NonlocalOperator B(km);
      std::mt19937_64 rng(1234 + dim);
      std::uniform_real_distribution<double> U(-1.0, 1.0);
      for (int s = 0; s < 100; ++s) {
        Field phi(g.cells());
        for (int i = 0; i < phi.size(); ++i) phi[i] = U(rng);
        const double two_e = 2.0 * B.energy_E(phi);
        const double quad = inner_h(g, B.apply_B(phi), phi);
        worst = std::max(worst, std::abs(two_e - quad) / std::abs(two_e));
      }
    }
  }
  detail = "max rel deviation " + fmtg(worst) + " over 100 fields x 2 dims x 2 families";
  return worst <= 1e-10;
}

// ------------------------------------------------------------- criterion 2
// 500 implicit steps of the nonlocal flow must hold the mean of u to within
// 1e-9 of the initial datum's mean, for every potential.
bool crit_mass(std::string& detail) {
  double worst = 0.0;
  for (auto kind : kAllKinds) {
    RunSetup rs{Grid(1, 128)};
    rs.epsilon = 0.1;
    rs.pot = potential(kind);
    rs.solver.mode = SolverParams::nonlocal;
    rs.solver.tau = 0.05;
    rs.solver.lambda_reg = 1e-3;
    rs.solver.lambda_yosida = 1e-3;
    rs.solver.dt = 1e-3;
    rs.solver.t_final = 0.5;
    rs.init.kind = InitSpec::cosine;
    rs.init.mean = 0.1;
    rs.init.amp = 0.3;
    const KernelMatrix km = assemble_kernel(rs.grid, make_mollifier(rs.family, rs.epsilon, 1));
    Stepper st(rs.grid, rs.solver, rs.pot, rs.forcing, &km);
    const Field u0 = make_field(rs.grid, rs.init);
    const double m0 = mean(rs.grid, u0);
    const Trajectory traj = st.run(u0, 0);
    if (!traj.completed) {
      detail = std::string(kind_name(kind)) + " run aborted: " + traj.abort_reason;
      return false;
    }
    for (const auto& rec : traj.diagnostics) worst = std::max(worst, std::abs(rec.mass - m0));
  }
  detail = "max drift " + fmtg(worst) + " over 500 steps, all three potentials";
  return worst <= 1e-9;
}

// ------------------------------------------------------------- criterion 3
// Without forcing the total energy must be nonincreasing at every step, in
// both operator modes and for all three potentials, up to solver tolerance.
bool crit_dissipation(std::string& detail) {
  const double slack = 10.0 * 1e-10;  // ten times the Newton tolerance below
  double worst = -1.0;
  for (int m = 0; m < 2; ++m) {
    for (auto kind : kAllKinds) {
      RunSetup rs{Grid(1, 64)};
      rs.epsilon = 0.2;
      rs.pot = potential(kind);
      rs.solver.mode = m == 0 ? SolverParams::nonlocal : SolverParams::local;
      rs.solver.tau = 0.05;
      rs.solver.lambda_reg = m == 0 ? 1e-3 : 0.0;
      rs.solver.lambda_yosida = 1e-3;
      rs.solver.dt = 1e-3;
      rs.solver.t_final = 0.1;
      rs.solver.newton_tol = 1e-10;
      rs.init.kind = InitSpec::cosine;
      rs.init.mean = 0.0;
      rs.init.amp = 0.5;
      std::optional<KernelMatrix> km;
      if (m == 0) km = assemble_kernel(rs.grid, make_mollifier(rs.family, rs.epsilon, 1));
      Stepper st(rs.grid, rs.solver, rs.pot, rs.forcing, km ? &*km : nullptr);
      const Trajectory traj = st.run(make_field(rs.grid, rs.init), 0);
      if (!traj.completed) {
        detail = std::string(m == 0 ? "nonlocal " : "local ") + kind_name(kind) +
                 " run aborted: " + traj.abort_reason;
        return false;
      }
      for (size_t k = 1; k < traj.diagnostics.size(); ++k)
        worst = std::max(worst, traj.diagnostics[k].E_total - traj.diagnostics[k - 1].E_total);
    }
  }
  detail = "max per-step energy increase " + fmtg(worst) + " (allowance " + fmtg(slack) + ")";
  return worst <= slack;
}

// ------------------------------------------------------------- criterion 4
// Regularized potential machinery: resolvent residuals at 1e-12, the 1/lambda
// Lipschitz bound and monotonicity on sampled pairs, envelope below gamma_hat.
bool crit_yosida(std::string& detail) {
  const double lambdas[] = {1e-1, 1e-2, 1e-3};
  double worst_res = 0.0, worst_slope = 0.0, worst_mono = 0.0, worst_env = 0.0;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> Uwide(-10.0, 10.0);
  std::uniform_real_distribution<double> Upair(-5.0, 5.0);
  std::uniform_real_distribution<double> Uin(-1.0 + 1e-9, 1.0 - 1e-9);
  for (auto kind : kAllKinds) {
    const PotentialSpec p = potential(kind);
    for (double lam : lambdas) {
      for (int s = 0; s < 10000; ++s) {
        double r, res;
        if (kind == PotentialSpec::logarithmic) {
          // manufactured data: pick the root first, then the right-hand side
          const double jstar = Uin(rng);
          r = jstar + lam * p.theta * std::atanh(jstar);
          const double J = resolvent_J(p, lam, r);
          res = std::abs(J + lam * p.theta * std::atanh(J) - r);
        } else if (kind == PotentialSpec::polynomial) {
          r = Uwide(rng);
          const double J = resolvent_J(p, lam, r);
          res = std::abs(J + lam * J * J * J - r);
        } else {
          r = Uwide(rng);
          res = std::abs(resolvent_J(p, lam, r) - std::clamp(r, -1.0, 1.0));
        }
        worst_res = std::max(worst_res, res / std::max(1.0, std::abs(r)));
      }
      for (int s = 0; s < 10000; ++s) {
        const double a = Upair(rng), b = Upair(rng);
        if (a == b) continue;
        const double slope = (yosida_gamma(p, lam, a) - yosida_gamma(p, lam, b)) / (a - b);
        worst_slope = std::max(worst_slope, slope * lam);
        worst_mono = std::min(worst_mono, slope * lam);
      }
      std::uniform_real_distribution<double> Udom(kind == PotentialSpec::polynomial ? -3.0
                                                                                    : -0.999,
                                                  kind == PotentialSpec::polynomial ? 3.0 : 0.999);
      for (int s = 0; s < 10000; ++s) {
        const double r = Udom(rng);
        worst_env = std::max(worst_env, gamma_hat_lambda(p, lam, r) - gamma_hat(p, r));
      }
    }
  }
  detail = "max rel residual " + fmtg(worst_res) + ", max slope*lambda " + fmtg(worst_slope) +
           ", min slope*lambda " + fmtg(worst_mono) + ", max envelope excess " + fmtg(worst_env);
  return worst_res <= 1e-12 && worst_slope <= 1.0 + 1e-10 && worst_mono >= -1e-10 &&
         worst_env <= 1e-12;
}

// ------------------------------------------------------------- criterion 5
// On shrinking interaction ranges the pair-sum energy of a cosine must
// approach the Dirichlet energy: error minimized at the smallest range and
// within 10 percent there, for both families in d = 1 and d = 2.  The d = 2
// target is cross-checked against nested adaptive quadrature first.
bool crit_gamma(std::string& detail) {
  const double t2 = dirichlet_target_cosine(2, 1, 1);
  auto grad_sq = [](double x, double y) {
    const double gx = -kPi * std::sin(kPi * x) * std::cos(kPi * y);
    const double gy = -kPi * std::cos(kPi * x) * std::sin(kPi * y);
    return gx * gx + gy * gy;
  };
  const double oracle =
      0.5 * integrate_adaptive(
                [&](double x) {
                  return integrate_adaptive([&](double y) { return grad_sq(x, y); }, 0.0, 1.0,
                                            1e-12);
                },
                0.0, 1.0, 1e-10);
  if (std::abs(oracle - t2) > 1e-8 * t2) {
    detail = "d=2 target " + fmtg(t2) + " disagrees with quadrature oracle " + fmtg(oracle);
    return false;
  }
  bool ok = true;
  double worst_final = 0.0;
  std::string bad;
  for (int dim : {1, 2}) {
    for (auto fam : {MollifierSpec::indicator, MollifierSpec::bump}) {
      // the d = 2 range list is limited by the dense-assembly cap: the error
      // there is dominated by the O(eps) boundary strip where the tangential
      // derivative of the product cosine does not vanish, so the final eps
      // must be small enough while n stays within 90 cells per side
      GammaSpec gs;
      gs.epsilons = dim == 1 ? std::vector<double>{0.4, 0.2, 0.1, 0.05}
                             : std::vector<double>{0.3, 0.24, 0.18, 0.12};
      gs.oversample = dim == 1 ? 32 : 10;
      const ConvergenceReport rep = gamma_check(dim, fam, gs);
      const double fin = note_value(rep, "final_rel_error");
      worst_final = std::max(worst_final, fin);
      if (!(rep.pass && fin <= 0.10)) {
        ok = false;
        bad += std::string(" d=") + std::to_string(dim) + "/" +
               (fam == MollifierSpec::bump ? "bump" : "indicator");
      }
    }
  }
  detail = "worst final rel error " + fmtg(worst_final) + " over 4 family-dimension combos" +
           (bad.empty() ? "" : "; failing:" + bad);
  return ok;
}

// ------------------------------------------------------------- criterion 6
// The ratio ||phi - mean||_H^2 / E(phi) must stay under 10/pi^2 for sampled
// smooth fields, uniformly over the interaction-range list.
bool crit_poincare(std::string& detail) {
  PoincareSpec ps;
  ps.epsilons = {0.4, 0.2, 0.1, 0.05};
  ps.samples = 20;
  ps.seed = 42;
  ps.oversample = 32;
  const ConvergenceReport rep = poincare_check(1, MollifierSpec::indicator, ps);
  double worst = 0.0;
  for (const auto& row : rep.rows) worst = std::max(worst, row_field(row, 2));
  detail = "max ratio " + fmtg(worst) + ", bound " + fmtg(10.0 / (kPi * kPi)) +
           ", 20 samples x 4 ranges";
  return rep.pass;
}

// ------------------------------------------------------------- criterion 7
// Trajectories must be Cauchy in the regularization parameter: successive
// distances strictly decreasing over lambda = 1e-1 .. 1e-4 for the smooth
// and the logarithmic potential.
bool crit_lambda(std::string& detail) {
  bool ok = true;
  std::string parts;
  for (auto kind : {PotentialSpec::polynomial, PotentialSpec::logarithmic}) {
    RunSetup rs{Grid(1, 128)};
    rs.epsilon = 0.1;
    rs.pot = potential(kind);
    rs.solver.mode = SolverParams::nonlocal;
    rs.solver.tau = 0.05;
    rs.solver.dt = 1e-3;
    rs.solver.t_final = 0.1;
    rs.init.kind = InitSpec::cosine;
    rs.init.mean = 0.1;
    rs.init.amp = 0.3;
    SweepSpec sw;
    sw.values = {1e-1, 1e-2, 1e-3, 1e-4};
    sw.norm = SweepSpec::C0_H;
    const ConvergenceReport rep = lambda_sweep(rs, sw);
    std::string dists;
    for (const auto& row : rep.rows) dists += fmtg(row_field(row, 2)) + " ";
    parts += std::string(kind_name(kind)) + " [" + dists + "]" + (rep.pass ? "" : " NOT") +
             " decreasing; ";
    ok = ok && rep.pass;
  }
  detail = parts + "lambda 1e-1..1e-4";
  return ok;
}

// fixed setup shared by the two interaction-range sweeps: medium-frequency
// initial data so the model error, not the fixed-grid quadrature floor of
// the punctured pair sum, dominates across the tested range list
RunSetup eps_sweep_setup() {
  RunSetup rs{Grid(1, 256)};
  rs.family = MollifierSpec::indicator;
  rs.pot = potential(PotentialSpec::polynomial);
  rs.solver.mode = SolverParams::nonlocal;
  rs.solver.tau = 0.05;
  rs.solver.lambda_reg = 1e-5;
  rs.solver.lambda_yosida = 1e-5;
  rs.solver.dt = 2e-4;
  rs.solver.t_final = 0.05;
  rs.init.kind = InitSpec::cosine;
  rs.init.mean = 0.1;
  rs.init.amp = 0.4;
  rs.init.kx = 6;
  rs.snapshot_every = 1;
  return rs;
}

// ------------------------------------------------------------- criterion 8
// Shrinking the interaction range at fixed viscosity must drive the runs
// toward the local reference: sup-in-time H errors strictly decreasing over
// eps = 0.2, 0.1, 0.05; the local-vs-local self test must sit at zero.
bool crit_eps_limit(std::string& detail) {
  const RunSetup rs = eps_sweep_setup();
  SweepSpec sw;
  sw.values = {0.2, 0.1, 0.05};
  sw.tau_rule = SweepSpec::fixed;
  sw.norm = SweepSpec::C0_H;
  const ConvergenceReport rep = eps_sweep(rs, sw);
  SweepSpec self = sw;
  self.self_test = true;
  const ConvergenceReport rep_self = eps_sweep(rs, self);
  std::string errs;
  for (const auto& row : rep.rows) errs += fmtg(row_field(row, 3)) + " ";
  double self_worst = 0.0;
  for (const auto& row : rep_self.rows) self_worst = std::max(self_worst, row_field(row, 3));
  detail = "sup errors [" + errs + "]" + (rep.pass ? "" : " NOT") + " decreasing; self-test max " +
           fmtg(self_worst);
  return rep.pass && rep_self.pass;
}

// ------------------------------------------------------------- criterion 9
// Viscosity tied to the interaction range, against an unviscous local
// reference under time-ramped forcing: both the sup error and the viscous
// dissipation norm must decrease strictly along the range list.
bool crit_viscosity(std::string& detail) {
  RunSetup rs = eps_sweep_setup();
  rs.forcing.kind = ForcingSpec::time_ramp;
  rs.forcing.amp = 0.3;
  rs.forcing.kx = 1;
  SweepSpec sw;
  sw.values = {0.2, 0.1, 0.05};
  sw.tau_rule = SweepSpec::proportional_to_eps;
  sw.norm = SweepSpec::C0_H;
  const ConvergenceReport rep = eps_sweep(rs, sw);
  std::string errs, viscs;
  for (const auto& row : rep.rows) {
    errs += fmtg(row_field(row, 3)) + " ";
    viscs += fmtg(row_field(row, 5)) + " ";
  }
  detail = "sup errors [" + errs + "], viscous norms [" + viscs + "]" +
           (rep.pass ? " both" : " NOT both") + " decreasing";
  return rep.pass;
}

// ------------------------------------------------------------ criterion 10
// Continuous dependence: the energy-weighted distance between a run and its
// perturbed twin, measured against the perturbation size, must keep a ratio
// within a factor of 10 across amplitudes 1e-2, 1e-3, 1e-4.
bool crit_stability(std::string& detail) {
  RunSetup rs{Grid(1, 128)};
  rs.epsilon = 0.1;
  rs.pot = potential(PotentialSpec::polynomial);
  rs.solver.mode = SolverParams::nonlocal;
  rs.solver.tau = 0.05;
  rs.solver.lambda_reg = 1e-3;
  rs.solver.lambda_yosida = 1e-3;
  rs.solver.dt = 1e-3;
  rs.solver.t_final = 0.05;
  rs.init.kind = InitSpec::cosine;
  rs.init.mean = 0.1;
  rs.init.amp = 0.3;
  StabilitySpec st;
  st.sizes = {1e-2, 1e-3, 1e-4};
  st.pert_kx = 2;
  const ConvergenceReport rep = stability_check(rs, st);
  detail = "ratio spread " + fmtg(note_value(rep, "ratio_spread")) +
           " across perturbation sizes 1e-2..1e-4 (allowed 10)";
  return rep.pass;
}

struct Criterion {
  int id;
  const char* label;
  bool (*fn)(std::string&);
};

const Criterion kCriteria[] = {
    {1, "pair-sum energy matches its quadratic form", crit_quadratic_form},
    {2, "mass conserved over long nonlocal runs", crit_mass},
    {3, "energy nonincreasing without forcing", crit_dissipation},
    {4, "regularized potential: residuals, Lipschitz, monotone, envelope", crit_yosida},
    {5, "interaction energy converges to the Dirichlet energy", crit_gamma},
    {6, "spectral-gap ratio uniformly bounded", crit_poincare},
    {7, "trajectories Cauchy in the regularization parameter", crit_lambda},
    {8, "shrinking interaction range reaches the local limit", crit_eps_limit},
    {9, "vanishing viscosity tracks the unviscous local flow", crit_viscosity},
    {10, "solution map stable under initial perturbations", crit_stability},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > 10 || argc > 2) {
      std::fprintf(stderr, "usage: acceptance [criterion 1..10]\n");
      return 2;
    }
  }
  int failures = 0;
  for (const auto& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    std::string detail;
    bool ok = false;
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", c.id, c.label,
                detail.empty() ? "" : " | ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
