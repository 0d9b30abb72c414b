// nonlocal_ops.hpp
// The nonlocal diffusion operator B phi = (K*1) phi - K*phi, its interaction
// energy, and the resolvent (I + delta B)^-1. energy_E deliberately runs its
// own pair sum instead of reusing apply_B so the identity 2E = (B phi, phi)_H
// stays a genuine cross-check between two routes.

#ifndef NLCH_NONLOCAL_OPS_HPP
#define NLCH_NONLOCAL_OPS_HPP

#include <stdexcept>

#include "nlch/geometry.hpp"
#include "nlch/kernels.hpp"

namespace nlch {

class NonlocalOperator {
 public:
  explicit NonlocalOperator(const KernelMatrix& km) : km_(km) {}

  const Grid& grid() const { return km_.grid; }
  const KernelMatrix& kernel() const { return km_; }

  Field apply_B(const Field& phi) const {
    check(phi, "apply_B");
    return km_.row_sums.cwiseProduct(phi) - km_.K * phi;
  }

  // 1/4 sum_ij K_ij (phi_i - phi_j)^2 h^d; always >= 0 term by term
  double energy_E(const Field& phi) const {
    check(phi, "energy_E");
    const int N = km_.K.rows();
    double s = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const double d = phi[i] - phi[j];
        s += km_.K(i, j) * d * d;
      }
    return 0.25 * km_.grid.cell_volume() * s;
  }

  // (I + delta B) x = phi; SPD, direct solve with a residual gate
  Field resolvent_B(const Field& phi, double delta) const {
    check(phi, "resolvent_B");
    if (delta < 0.0) throw std::invalid_argument("resolvent_B: delta must be >= 0");
    if (delta == 0.0) return phi;
    Eigen::MatrixXd M = -delta * km_.K;
    M.diagonal() += (delta * km_.row_sums).eval();
    M.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    Field x = llt.solve(phi);
    const double tol = 1e-11 * norm_h(km_.grid, phi);
    for (int pass = 0; pass < 4; ++pass) {
      Field r = phi - x - delta * apply_B(x);
      if (norm_h(km_.grid, r) <= tol) return x;
      x += llt.solve(r);
    }
    throw std::runtime_error("resolvent_B: residual did not reach tolerance");
  }

  double norm_Veps(const Field& phi) const {
    return std::sqrt(inner_h(km_.grid, phi, phi) + 2.0 * energy_E(phi));
  }

 private:
  void check(const Field& phi, const char* who) const {
    if (phi.size() != km_.grid.cells())
      throw std::invalid_argument(std::string(who) + ": field size does not match grid");
  }

  const KernelMatrix& km_;
};

}  // namespace nlch

#endif
