// harness.hpp
// Verification experiments wired on top of the stepper: discrete-to-local
// energy convergence, a nonlocal Poincare bound, Cauchy behaviour in the
// regularization parameter, the nonlocal-to-local and vanishing-viscosity
// limits, and continuous dependence on the data. Each op returns a small
// report (csv rows + verdict); persistence is the caller's business.

#ifndef NLCH_HARNESS_HPP
#define NLCH_HARNESS_HPP

#include <algorithm>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "nlch/stepper.hpp"

namespace nlch {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ConvergenceReport {
  std::string header;
  std::vector<std::string> rows;
  bool pass = false;
  std::vector<std::pair<std::string, std::string>> notes;  // manifest lines

  void note(const std::string& k, const std::string& v) { notes.emplace_back(k, v); }
};

// everything a single dynamic run needs besides the sweep parameter itself
struct RunSetup {
  Grid grid;
  MollifierSpec::Family family = MollifierSpec::indicator;
  double epsilon = 0.1;
  PotentialSpec pot;
  SolverParams solver;
  ForcingSpec forcing;
  InitSpec init;
  int snapshot_every = 0;
};

// ---------------------------------------------------------------- schedules

// grid resolution for the energy checks: h <= eps/4 is a hard contract, the
// oversample factor pushes h well below that so the pair-sum quadrature error
// stays a fixed small fraction along the sweep; d = 2 is capped by the dense
// assembly budget (8192 cells)
inline int gamma_grid_n(int dim, double eps, int oversample) {
  const int need = static_cast<int>(std::ceil(4.0 / eps));
  int n = std::max({4, need, static_cast<int>(std::ceil(oversample / eps))});
  const int cap = dim == 2 ? 90 : 8192;
  if (n > cap) n = cap;
  if (n < need)
    throw std::invalid_argument("gamma_grid_n: eps too small for the dense cell budget");
  return n;
}

// closed-form Gamma-limit target 1/2 int |grad phi|^2 for product-cosine fields
inline double dirichlet_target_cosine(int dim, int kx, int ky) {
  auto line = [](int k) { return k == 0 ? 1.0 : 0.5; };   // int cos^2(k pi t) dt
  auto dline = [](int k) { return k == 0 ? 0.0 : 0.5; };  // int sin^2(k pi t) dt
  const double pi2 = kPi * kPi;
  if (dim == 1) return 0.5 * pi2 * kx * kx * dline(kx);
  return 0.5 * pi2 * (kx * kx * dline(kx) * line(ky) + ky * ky * line(kx) * dline(ky));
}

// ------------------------------------------------------------- gamma_check

struct GammaSpec {
  std::vector<double> epsilons;  // strictly decreasing
  int oversample = 32;
  int kx = 1, ky = 1;
};

inline void require_decreasing_values(const std::vector<double>& v, const char* who) {
  if (v.size() < 3) throw std::invalid_argument(std::string(who) + ": need at least 3 values");
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1]))
      throw std::invalid_argument(std::string(who) + ": values must be strictly decreasing");
}

inline ConvergenceReport gamma_check(int dim, MollifierSpec::Family fam, const GammaSpec& spec) {
  require_decreasing_values(spec.epsilons, "gamma_check");
  ConvergenceReport rep;
  rep.header = "epsilon,n,energy,target,abs_error,rel_error,rate";
  const double target = dirichlet_target_cosine(dim, spec.kx, spec.ky);
  std::vector<double> errs;
  for (size_t k = 0; k < spec.epsilons.size(); ++k) {
    const double eps = spec.epsilons[k];
    const Grid g(dim, gamma_grid_n(dim, eps, spec.oversample));
    InitSpec is;
    is.kind = InitSpec::cosine;
    is.amp = 1.0;
    is.kx = spec.kx;
    is.ky = spec.ky;
    const Field phi = make_field(g, is);
    const KernelMatrix km = assemble_kernel(g, make_mollifier(fam, eps, dim));
    const double E = NonlocalOperator(km).energy_E(phi);
    const double abs_err = std::abs(E - target);
    errs.push_back(abs_err / target);
    std::string rate;
    if (k > 0 && errs[k] > 0.0 && errs[k - 1] > 0.0)
      rate = fmt17(std::log(errs[k - 1] / errs[k]) / std::log(spec.epsilons[k - 1] / eps));
    rep.rows.push_back(fmt17(eps) + "," + std::to_string(g.n) + "," + fmt17(E) + "," +
                       fmt17(target) + "," + fmt17(abs_err) + "," + fmt17(errs[k]) + "," + rate);
  }
  rep.pass = *std::min_element(errs.begin(), errs.end()) == errs.back();
  rep.note("target", fmt17(target));
  rep.note("final_rel_error", fmt17(errs.back()));
  return rep;
}

// ---------------------------------------------------------- poincare_check

struct PoincareSpec {
  std::vector<double> epsilons;
  int samples = 20;
  unsigned long seed = 42;
  int oversample = 32;
};

// smooth zero-mean sample: random coefficients on the first few cosine modes
inline Field poincare_sample(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field u = Field::Zero(g.cells());
  if (g.dim == 1) {
    for (int k = 1; k <= 4; ++k) {
      const double c = dist(rng);
      for (int i = 0; i < u.size(); ++i) u[i] += c * std::cos(k * kPi * g.x(i));
    }
  } else {
    for (int kx = 0; kx <= 3; ++kx)
      for (int ky = 0; ky <= 3; ++ky) {
        if (kx == 0 && ky == 0) continue;
        const double c = dist(rng);
        for (int i = 0; i < u.size(); ++i)
          u[i] += c * std::cos(kx * kPi * g.x(i)) * std::cos(ky * kPi * g.y(i));
      }
  }
  return u;
}

inline ConvergenceReport poincare_check(int dim, MollifierSpec::Family fam,
                                        const PoincareSpec& spec) {
  require_decreasing_values(spec.epsilons, "poincare_check");
  ConvergenceReport rep;
  rep.header = "epsilon,n,max_ratio,bound";
  // Poincare constant of the unit box with Neumann data is 1/pi^2 in d = 1, 2
  const double bound = 10.0 / (kPi * kPi);
  bool ok = true;
  for (double eps : spec.epsilons) {
    const Grid g(dim, gamma_grid_n(dim, eps, spec.oversample));
    const KernelMatrix km = assemble_kernel(g, make_mollifier(fam, eps, dim));
    const NonlocalOperator B(km);
    std::mt19937_64 rng(spec.seed);  // same sample set for every eps
    double worst = 0.0;
    for (int s = 0; s < spec.samples; ++s) {
      Field phi = poincare_sample(g, rng);
      phi.array() -= mean(g, phi);
      const double ratio = inner_h(g, phi, phi) / B.energy_E(phi);
      worst = std::max(worst, ratio);
    }
    ok = ok && worst <= bound;
    rep.rows.push_back(fmt17(eps) + "," + std::to_string(g.n) + "," + fmt17(worst) + "," +
                       fmt17(bound));
  }
  rep.pass = ok;
  return rep;
}

// -------------------------------------------------------------- the sweeps

struct SweepSpec {
  std::vector<double> values;  // lambda or epsilon, strictly decreasing
  enum TauRule { fixed, proportional_to_eps } tau_rule = fixed;
  enum Norm { C0_H, C0_Vstar, L2_H } norm = C0_H;
  bool self_test = false;  // eps sweep only: run the local operator on both sides
};

inline void check_aligned(const Trajectory& a, const Trajectory& b) {
  if (!a.completed || !b.completed)
    throw std::runtime_error("sweep: a run aborted: " +
                             (a.completed ? b.abort_reason : a.abort_reason));
  if (a.times.size() != b.times.size())
    throw std::runtime_error("sweep: snapshot schedules differ");
  for (size_t i = 0; i < a.times.size(); ++i)
    if (std::abs(a.times[i] - b.times[i]) > 1e-12)
      throw std::runtime_error("sweep: snapshot times differ");
}

inline double traj_distance(const Grid& g, const NeumannLaplacian& lap, SweepSpec::Norm norm,
                            const Trajectory& a, const Trajectory& b) {
  check_aligned(a, b);
  std::vector<double> d(a.times.size());
  for (size_t i = 0; i < a.times.size(); ++i) {
    const Field diff = a.u_snapshots[i] - b.u_snapshots[i];
    d[i] = norm == SweepSpec::C0_Vstar ? lap.norm_Vstar(diff) : norm_h(g, diff);
  }
  if (norm == SweepSpec::L2_H) {
    double acc = 0.0;
    for (size_t i = 1; i < d.size(); ++i)
      acc += 0.5 * (d[i] * d[i] + d[i - 1] * d[i - 1]) * (a.times[i] - a.times[i - 1]);
    return std::sqrt(acc);
  }
  return *std::max_element(d.begin(), d.end());
}

inline double sup_mu_distance(const Grid& g, const Trajectory& a, const Trajectory& b) {
  double worst = 0.0;  // skip t = 0, mu is only defined once stepping starts
  for (size_t i = 1; i < a.times.size(); ++i)
    worst = std::max(worst, norm_h(g, a.mu_snapshots[i] - b.mu_snapshots[i]));
  return worst;
}

// Cauchy test in the regularization parameter: lambda_yosida = lambda_reg =
// lambda walks down the list, successive trajectory distances must shrink
inline ConvergenceReport lambda_sweep(const RunSetup& base, const SweepSpec& spec) {
  require_decreasing_values(spec.values, "lambda_sweep");
  if (base.solver.mode != SolverParams::nonlocal)
    throw std::invalid_argument("lambda_sweep: base config must be nonlocal");
  ConvergenceReport rep;
  rep.header = "lambda_hi,lambda_lo,distance,rate";
  const KernelMatrix km = assemble_kernel(base.grid, make_mollifier(base.family, base.epsilon,
                                                                    base.grid.dim));
  const NeumannLaplacian lap(base.grid);
  const Field u0 = make_field(base.grid, base.init);
  std::vector<Trajectory> runs;
  for (double lam : spec.values) {
    SolverParams sp = base.solver;
    sp.lambda_reg = lam;
    sp.lambda_yosida = lam;
    Stepper st(base.grid, sp, base.pot, base.forcing, &km);
    runs.push_back(st.run(u0, base.snapshot_every));
  }
  std::vector<double> dist;
  for (size_t k = 0; k + 1 < runs.size(); ++k)
    dist.push_back(traj_distance(base.grid, lap, spec.norm, runs[k], runs[k + 1]));
  bool ok = true;
  for (size_t k = 0; k < dist.size(); ++k) {
    if (k > 0 && !(dist[k] < dist[k - 1])) ok = false;
    std::string rate;
    if (k > 0 && dist[k] > 0.0)
      rate = fmt17(std::log(dist[k - 1] / dist[k]) / std::log(spec.values[k - 1] / spec.values[k]));
    rep.rows.push_back(fmt17(spec.values[k]) + "," + fmt17(spec.values[k + 1]) + "," +
                       fmt17(dist[k]) + "," + rate);
  }
  rep.pass = ok && !dist.empty();
  return rep;
}

// nonlocal-to-local limit: for each eps, a nonlocal run against one local
// reference on the same grid; with tau_rule = proportional_to_eps this is the
// vanishing-viscosity experiment (tau_eps = eps against a tau = 0 reference)
inline ConvergenceReport eps_sweep(const RunSetup& base, const SweepSpec& spec) {
  require_decreasing_values(spec.values, "eps_sweep");
  ConvergenceReport rep;
  rep.header = "epsilon,tau,n,sup_err_H,sup_err_mu,visc_norm,rate";
  const NeumannLaplacian lap(base.grid);
  const Field u0 = make_field(base.grid, base.init);

  SolverParams ref_sp = base.solver;
  ref_sp.mode = SolverParams::local;
  ref_sp.lambda_reg = 0.0;
  ref_sp.tau = spec.tau_rule == SweepSpec::proportional_to_eps ? 0.0 : base.solver.tau;
  Stepper ref_st(base.grid, ref_sp, base.pot, base.forcing, nullptr);
  const Trajectory ref = ref_st.run(u0, base.snapshot_every, true);

  std::vector<double> errs, viscs;
  std::vector<int> ns;
  std::vector<double> mu_errs;
  std::vector<double> taus;
  for (double eps : spec.values) {
    Trajectory traj;
    double tau_used;
    if (spec.self_test) {
      tau_used = ref_sp.tau;
      Stepper st(base.grid, ref_sp, base.pot, base.forcing, nullptr);
      traj = st.run(u0, base.snapshot_every, true);
    } else {
      const KernelMatrix km =
          assemble_kernel(base.grid, make_mollifier(base.family, eps, base.grid.dim));
      SolverParams sp = base.solver;
      if (spec.tau_rule == SweepSpec::proportional_to_eps) sp.tau = eps;
      tau_used = sp.tau;
      Stepper st(base.grid, sp, base.pot, base.forcing, &km);
      traj = st.run(u0, base.snapshot_every, true);
    }
    check_aligned(traj, ref);
    errs.push_back(traj_distance(base.grid, lap, SweepSpec::C0_H, traj, ref));
    mu_errs.push_back(sup_mu_distance(base.grid, traj, ref));
    double acc = 0.0;
    for (double q : traj.dudt_sq) acc += base.solver.dt * q;
    viscs.push_back(tau_used * std::sqrt(acc));
    taus.push_back(tau_used);
    ns.push_back(base.grid.n);
  }

  bool ok = true;
  for (size_t k = 0; k < spec.values.size(); ++k) {
    if (spec.self_test) {
      if (!(errs[k] <= 1e-10)) ok = false;
    } else if (k > 0) {
      if (!(errs[k] < errs[k - 1])) ok = false;
      if (spec.tau_rule == SweepSpec::proportional_to_eps && !(viscs[k] < viscs[k - 1])) ok = false;
    }
    std::string rate;
    if (k > 0 && errs[k] > 0.0 && errs[k - 1] > 0.0)
      rate = fmt17(std::log(errs[k - 1] / errs[k]) / std::log(spec.values[k - 1] / spec.values[k]));
    rep.rows.push_back(fmt17(spec.values[k]) + "," + fmt17(taus[k]) + "," + std::to_string(ns[k]) +
                       "," + fmt17(errs[k]) + "," + fmt17(mu_errs[k]) + "," + fmt17(viscs[k]) +
                       "," + rate);
  }
  rep.pass = ok;
  return rep;
}

// --------------------------------------------------------- stability_check

struct StabilitySpec {
  std::vector<double> sizes;  // perturbation amplitudes, strictly decreasing
  int pert_kx = 2, pert_ky = 0;
};

inline ConvergenceReport stability_check(const RunSetup& base, const StabilitySpec& spec) {
  require_decreasing_values(spec.sizes, "stability_check");
  if (base.solver.mode != SolverParams::nonlocal)
    throw std::invalid_argument("stability_check: base config must be nonlocal");
  if (spec.pert_kx == 0 && (base.grid.dim == 1 || spec.pert_ky == 0))
    throw std::invalid_argument("stability_check: perturbation must have zero mean");

  ConvergenceReport rep;
  rep.header = "size,lhs,rhs,ratio";
  const KernelMatrix km = assemble_kernel(base.grid, make_mollifier(base.family, base.epsilon,
                                                                    base.grid.dim));
  const NonlocalOperator B(km);
  const NeumannLaplacian lap(base.grid);
  Stepper st(base.grid, base.solver, base.pot, base.forcing, &km);

  InitSpec pert_is;
  pert_is.kind = InitSpec::cosine;
  pert_is.amp = 1.0;
  pert_is.kx = spec.pert_kx;
  pert_is.ky = spec.pert_ky;
  const Field pert = make_field(base.grid, pert_is);

  const Field u0 = make_field(base.grid, base.init);
  const Trajectory ref = st.run(u0, 1);  // snapshot every step

  std::vector<double> ratios;
  for (double s : spec.sizes) {
    const Field u0p = u0 + s * pert;
    const Trajectory per = st.run(u0p, 1);
    check_aligned(per, ref);
    double c0_vstar = 0.0, c0_h = 0.0;
    std::vector<double> e_nl(ref.times.size());
    for (size_t i = 0; i < ref.times.size(); ++i) {
      const Field diff = per.u_snapshots[i] - ref.u_snapshots[i];
      c0_vstar = std::max(c0_vstar, lap.norm_Vstar(diff));
      c0_h = std::max(c0_h, norm_h(base.grid, diff));
      e_nl[i] = B.energy_E(diff);
    }
    double e_l1 = 0.0;
    for (size_t i = 1; i < ref.times.size(); ++i)
      e_l1 += 0.5 * (e_nl[i] + e_nl[i - 1]) * (ref.times[i] - ref.times[i - 1]);
    const double lhs = c0_vstar * c0_vstar + base.solver.tau * c0_h * c0_h + e_l1;

    const Field d0 = s * pert;
    const double v = lap.norm_Vstar(d0), h0 = norm_h(base.grid, d0);
    const double rhs = v * v + base.solver.tau * h0 * h0;  // no forcing perturbation
    ratios.push_back(lhs / rhs);
    rep.rows.push_back(fmt17(s) + "," + fmt17(lhs) + "," + fmt17(rhs) + "," + fmt17(lhs / rhs));
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  rep.pass = *hi <= 10.0 * *lo;
  rep.note("ratio_spread", fmt17(*hi / *lo));
  return rep;
}

// ---------------------------------------------------------- kernel-validate

struct ValidateSpec {
  std::vector<double> epsilons;
  double delta = 0.0;  // 0: use the support radius (reports a zero tail)
};

inline ConvergenceReport kernel_validate(int dim, const ValidateSpec& spec) {
  if (spec.epsilons.empty()) throw std::invalid_argument("kernel_validate: empty epsilon list");
  ConvergenceReport rep;
  rep.header = "family,epsilon,normalization_error,tail_mass";
  bool ok = true;
  for (auto fam : {MollifierSpec::bump, MollifierSpec::indicator}) {
    for (double eps : spec.epsilons) {
      const MollifierSpec m = make_mollifier(fam, eps, dim);
      const MollifierReport r =
          spec.delta > 0.0 ? validate_mollifier(m, spec.delta) : validate_mollifier(m);
      ok = ok && r.normalization_error <= 1e-8;
      rep.rows.push_back(std::string(fam == MollifierSpec::bump ? "bump" : "indicator") + "," +
                         fmt17(eps) + "," + fmt17(r.normalization_error) + "," +
                         fmt17(r.tail_mass));
    }
  }
  rep.pass = ok;
  return rep;
}

}  // namespace nlch

#endif
