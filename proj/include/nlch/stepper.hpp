// stepper.hpp
// Implicit Euler for the (viscous) Cahn-Hilliard system
//   du/dt = -L mu,   mu = tau du/dt + lambda L u + A u + gamma_lambda(u) + Pi(u_prev) - g
// with A the nonlocal operator B (mode nonlocal) or L itself (mode local).
// The convex part gamma_lambda is implicit, the linear concave part Pi is
// explicit, so every step dissipates the discrete energy when g = 0.
// Eliminating mu gives one nonlinear system per step, solved by Newton with
// dense direct linear solves.

#ifndef NLCH_STEPPER_HPP
#define NLCH_STEPPER_HPP

#include <optional>
#include <string>
#include <vector>

#include "nlch/geometry.hpp"
#include "nlch/kernels.hpp"
#include "nlch/local_ops.hpp"
#include "nlch/nonlocal_ops.hpp"
#include "nlch/potentials.hpp"

namespace nlch {

struct SolverParams {
  enum Mode { nonlocal, local } mode = nonlocal;
  double tau = 0.05;           // viscosity; must be > 0 in nonlocal mode
  double lambda_reg = 1e-3;    // elliptic regularization weight (nonlocal mode only)
  double lambda_yosida = 1e-3; // Yosida parameter for the convex part
  double dt = 1e-3;
  double t_final = 0.1;
  double newton_tol = 1e-10;   // on the H norm of the step residual
  int newton_max = 50;
};

inline void validate_solver_params(const SolverParams& p) {
  if (!(p.dt > 0.0)) throw std::invalid_argument("solver: dt must be positive");
  if (!(p.t_final > 0.0)) throw std::invalid_argument("solver: t_final must be positive");
  if (!(p.newton_tol > 0.0)) throw std::invalid_argument("solver: newton_tol must be positive");
  if (p.newton_max < 1) throw std::invalid_argument("solver: newton_max must be >= 1");
  if (p.tau < 0.0) throw std::invalid_argument("solver: tau must be >= 0");
  if (!(p.lambda_yosida > 0.0)) throw std::invalid_argument("solver: lambda_yosida must be positive");
  if (p.lambda_reg < 0.0) throw std::invalid_argument("solver: lambda_reg must be >= 0");
  if (p.mode == SolverParams::nonlocal && !(p.tau > 0.0))
    throw std::invalid_argument("solver: nonlocal mode requires tau > 0");
  if (p.mode == SolverParams::local && p.lambda_reg != 0.0)
    throw std::invalid_argument("solver: local mode absorbs the elliptic term, set lambda_reg = 0");
}

struct ForcingSpec {
  enum Kind { zero, constant, time_ramp } kind = zero;
  double amp = 0.0;
  int kx = 0, ky = 0;  // cosine profile; kx = ky = 0 means spatially constant
};

struct DiagnosticsRecord {
  int step = 0;
  double t = 0.0;
  double mass = 0.0;
  double E_nl = 0.0;   // interaction energy (nonlocal) or Dirichlet energy (local)
  double E_pot = 0.0;
  double E_reg = 0.0;  // lambda_reg * Dirichlet energy
  double E_total = 0.0;
  double grad_mu_sq = 0.0;  // (-Delta mu, mu)_H
  int newton_iters = 0;
  double step_residual = 0.0;
};

struct NewtonTrace {
  std::vector<double> residuals;  // H norm at each iterate, initial included
};

struct Trajectory {
  std::vector<double> times;       // snapshot times
  std::vector<int> snap_steps;     // step index of each snapshot
  std::vector<Field> u_snapshots;
  std::vector<Field> mu_snapshots; // filled when keep_mu is set (empty mu at t=0)
  std::vector<DiagnosticsRecord> diagnostics;  // row 0 is the initial state
  std::vector<double> dudt_sq;     // per step: |(u^{n+1}-u^n)/dt|_H^2
  bool completed = false;
  std::string abort_reason;
};

struct StepResult {
  Field u, mu, xi;
  DiagnosticsRecord rec;
};

class Stepper {
 public:
  Stepper(const Grid& g, const SolverParams& sp, const PotentialSpec& pot,
          const ForcingSpec& fs, const KernelMatrix* km = nullptr)
      : g_(g), sp_(sp), pot_(pot), fs_(fs), lap_(g), km_(km) {
    validate_solver_params(sp_);
    validate_potential(pot_);
    if (sp_.mode == SolverParams::nonlocal) {
      if (!km_) throw std::invalid_argument("stepper: nonlocal mode needs an assembled kernel");
      B_.emplace(*km_);
    }
    const double pi = kPi;
    g_profile_.resize(g_.cells());
    for (int i = 0; i < g_profile_.size(); ++i) {
      double v = std::cos(fs_.kx * pi * g_.x(i));
      if (g_.dim == 2) v *= std::cos(fs_.ky * pi * g_.y(i));
      g_profile_[i] = fs_.amp * v;
    }

    // constant Jacobian blocks: J(u) = I + tau L + dt lambda L^2 + dt L A + dt L diag(gamma')
    const auto& L = lap_.dense();
    Ldt_ = sp_.dt * L;
    M0_ = sp_.tau * L;
    if (sp_.mode == SolverParams::nonlocal) {
      if (sp_.lambda_reg > 0.0) M0_ += (sp_.dt * sp_.lambda_reg) * (L * L);
      Eigen::MatrixXd A = -km_->K;
      A.diagonal() += km_->row_sums;
      M0_ += Ldt_ * A;
    } else {
      M0_ += Ldt_ * L;
    }
  }

  const Grid& grid() const { return g_; }
  const NeumannLaplacian& laplacian() const { return lap_; }
  const SolverParams& params() const { return sp_; }
  const NonlocalOperator* nonlocal() const { return B_ ? &*B_ : nullptr; }

  Field forcing_at(double t) const {
    switch (fs_.kind) {
      case ForcingSpec::zero: return Field::Zero(g_.cells());
      case ForcingSpec::constant: return g_profile_;
      case ForcingSpec::time_ramp: return (t / sp_.t_final) * g_profile_;
    }
    return Field::Zero(g_.cells());
  }

  // (I + lambda_reg L) v = u0; lifts the initial datum into the domain of L
  Field regularize_initial(const Field& u0) const {
    return lap_.solve_identity_plus(sp_.lambda_reg, u0);
  }

  // one implicit step from u_prev at t = step_index*dt to t + dt
  StepResult step(const Field& u_prev, int step_index, NewtonTrace* trace = nullptr) const {
    if (u_prev.size() != g_.cells())
      throw std::invalid_argument("step: field size does not match grid");
    const double th = sp_.dt;
    const double t_next = (step_index + 1) * th;
    const Field gfield = forcing_at(t_next);
    Field pi_prev(g_.cells());
    for (int i = 0; i < pi_prev.size(); ++i) pi_prev[i] = pi_part(pot_, u_prev[i]);

    // chemical potential as a function of the unknown, Pi frozen at u_prev
    auto mu_of = [&](const Field& u) {
      Field w = (sp_.tau / th) * (u - u_prev) + pi_prev - gfield;
      for (int i = 0; i < w.size(); ++i) w[i] += yosida_gamma(pot_, sp_.lambda_yosida, u[i]);
      if (sp_.lambda_reg > 0.0) w += sp_.lambda_reg * lap_.apply_negL(u);
      w += sp_.mode == SolverParams::nonlocal ? B_->apply_B(u) : lap_.apply_negL(u);
      return w;
    };

    Field u = u_prev;  // warm start keeps the iteration mean-neutral
    Field mu = mu_of(u);
    Field F = u - u_prev + th * lap_.apply_negL(mu);
    double res = norm_h(g_, F);
    if (trace) trace->residuals.assign(1, res);
    int iters = 0;
    while (res > sp_.newton_tol) {
      if (iters >= sp_.newton_max || !std::isfinite(res))
        throw std::runtime_error("step: Newton stalled at t = " + std::to_string(t_next) +
                                 ", residual = " + std::to_string(res));
      Eigen::MatrixXd J = M0_;
      Eigen::VectorXd d(g_.cells());
      for (int i = 0; i < d.size(); ++i) d[i] = yosida_gamma_prime(pot_, sp_.lambda_yosida, u[i]);
      J += Ldt_ * d.asDiagonal();
      J.diagonal().array() += 1.0;
      u -= Eigen::PartialPivLU<Eigen::MatrixXd>(J).solve(F);
      ++iters;
      mu = mu_of(u);
      F = u - u_prev + th * lap_.apply_negL(mu);
      res = norm_h(g_, F);
      if (trace) trace->residuals.push_back(res);
    }

    StepResult out;
    out.u = u;
    out.mu = mu;
    out.xi.resize(u.size());
    for (int i = 0; i < u.size(); ++i) out.xi[i] = yosida_gamma(pot_, sp_.lambda_yosida, u[i]);

    const double drift = std::abs(mean(g_, u) - mean(g_, u_prev));
    if (drift > 1e-11)
      throw std::runtime_error("step: mass drift " + std::to_string(drift) + " exceeds 1e-11");

    out.rec = diagnostics(step_index + 1, t_next, u, &mu);
    out.rec.newton_iters = iters;
    out.rec.step_residual = res;
    return out;
  }

  DiagnosticsRecord diagnostics(int step_index, double t, const Field& u, const Field* mu) const {
    DiagnosticsRecord r;
    r.step = step_index;
    r.t = t;
    r.mass = mean(g_, u);
    r.E_nl = sp_.mode == SolverParams::nonlocal ? B_->energy_E(u) : lap_.dirichlet_energy(u);
    r.E_pot = potential_energy(g_, pot_, sp_.lambda_yosida, u);
    r.E_reg = sp_.lambda_reg > 0.0 ? sp_.lambda_reg * lap_.dirichlet_energy(u) : 0.0;
    r.E_total = r.E_nl + r.E_pot + r.E_reg;
    r.grad_mu_sq = mu ? inner_h(g_, lap_.apply_negL(*mu), *mu) : 0.0;
    return r;
  }

  // full run; on a solver failure the partial trajectory is returned with
  // completed = false so callers can still persist what happened
  Trajectory run(const Field& u0_raw, int snapshot_every = 0, bool keep_mu = false) const {
    check_initial(u0_raw);
    const TimeGrid tg(sp_.dt, sp_.t_final);
    if (snapshot_every <= 0) snapshot_every = std::max(1, tg.steps / 50);

    Trajectory traj;
    Field u = regularize_initial(u0_raw);
    traj.times.push_back(0.0);
    traj.snap_steps.push_back(0);
    traj.u_snapshots.push_back(u);
    if (keep_mu) traj.mu_snapshots.push_back(Field::Zero(u.size()));
    traj.diagnostics.push_back(diagnostics(0, 0.0, u, nullptr));

    for (int n = 0; n < tg.steps; ++n) {
      StepResult sr;
      try {
        sr = step(u, n);
      } catch (const std::exception& e) {
        traj.abort_reason = e.what();
        return traj;
      }
      traj.dudt_sq.push_back(inner_h(g_, (sr.u - u) / sp_.dt, (sr.u - u) / sp_.dt));
      traj.diagnostics.push_back(sr.rec);
      if ((n + 1) % snapshot_every == 0 || n + 1 == tg.steps) {
        traj.times.push_back(sr.rec.t);
        traj.snap_steps.push_back(n + 1);
        traj.u_snapshots.push_back(sr.u);
        if (keep_mu) traj.mu_snapshots.push_back(sr.mu);
      }
      u = sr.u;
    }
    traj.completed = true;
    return traj;
  }

 private:
  void check_initial(const Field& u0) const {
    if (u0.size() != g_.cells())
      throw std::invalid_argument("run: initial field size does not match grid");
    if (pot_.kind != PotentialSpec::polynomial) {
      const double margin = 1e-3;
      if (std::abs(mean(g_, u0)) > 1.0 - margin)
        throw std::invalid_argument("run: initial mean too close to the domain edge");
      for (int i = 0; i < u0.size(); ++i)
        if (std::abs(u0[i]) > 1.0 - margin)
          throw std::invalid_argument("run: initial values leave the potential domain");
    }
  }

  Grid g_;
  SolverParams sp_;
  PotentialSpec pot_;
  ForcingSpec fs_;
  NeumannLaplacian lap_;
  const KernelMatrix* km_;
  std::optional<NonlocalOperator> B_;
  Field g_profile_;
  Eigen::MatrixXd Ldt_;  // dt * L
  Eigen::MatrixXd M0_;   // u-independent Jacobian part, identity excluded
};

}  // namespace nlch

#endif
