// local_ops.hpp
// Cell-centered Neumann Laplacian (reflecting ghosts), its pseudo-inverse on
// zero-mean fields, and the induced dual norm. The operator L below is the
// positive semi-definite -Delta_h; row and column sums vanish identically,
// which is what makes the scheme conserve mass.

#ifndef NLCH_LOCAL_OPS_HPP
#define NLCH_LOCAL_OPS_HPP

#include <memory>
#include <stdexcept>

#include "nlch/geometry.hpp"

namespace nlch {

class NeumannLaplacian {
 public:
  explicit NeumannLaplacian(const Grid& g) : g_(g) {}

  const Grid& grid() const { return g_; }

  // matrix-free stencil; ghost cells mirror the boundary cell, so boundary
  // rows simply lose the outward difference
  Field apply_negL(const Field& phi) const {
    if (phi.size() != g_.cells())
      throw std::invalid_argument("apply_negL: field size does not match grid");
    const int n = g_.n;
    const double ih2 = 1.0 / (g_.h * g_.h);
    Field out(phi.size());
    if (g_.dim == 1) {
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        if (i > 0) s += phi[i] - phi[i - 1];
        if (i < n - 1) s += phi[i] - phi[i + 1];
        out[i] = s * ih2;
      }
    } else {
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
          const int i = iy * n + ix;
          double s = 0.0;
          if (ix > 0) s += phi[i] - phi[i - 1];
          if (ix < n - 1) s += phi[i] - phi[i + 1];
          if (iy > 0) s += phi[i] - phi[i - n];
          if (iy < n - 1) s += phi[i] - phi[i + n];
          out[i] = s * ih2;
        }
    }
    return out;
  }

  const Eigen::MatrixXd& dense() const {
    if (dense_.size() == 0) {
      const int N = g_.cells(), n = g_.n;
      const double ih2 = 1.0 / (g_.h * g_.h);
      dense_ = Eigen::MatrixXd::Zero(N, N);
      auto couple = [&](int i, int j) {
        dense_(i, i) += ih2;
        dense_(i, j) -= ih2;
      };
      for (int iy = 0; iy < (g_.dim == 2 ? n : 1); ++iy)
        for (int ix = 0; ix < n; ++ix) {
          const int i = iy * n + ix;
          if (ix > 0) couple(i, i - 1);
          if (ix < n - 1) couple(i, i + 1);
          if (g_.dim == 2 && iy > 0) couple(i, i - n);
          if (g_.dim == 2 && iy < n - 1) couple(i, i + n);
        }
    }
    return dense_;
  }

  // (I + alpha L) x = rhs, direct solve
  Field solve_identity_plus(double alpha, const Field& rhs) const {
    if (rhs.size() != g_.cells())
      throw std::invalid_argument("solve_identity_plus: field size does not match grid");
    if (alpha < 0.0) throw std::invalid_argument("solve_identity_plus: alpha must be >= 0");
    if (alpha == 0.0) return rhs;
    Eigen::MatrixXd M = alpha * dense();
    M.diagonal().array() += 1.0;
    return Eigen::LLT<Eigen::MatrixXd>(M).solve(rhs);
  }

  // N f: solve L psi = f for zero-mean data, zero-mean solution. Constants are
  // handled by deflation, L + (1/N) ones*ones^T, which keeps the matrix SPD
  // without breaking symmetry the way pinning a node would.
  Field inverse_N(const Field& f) const {
    if (f.size() != g_.cells())
      throw std::invalid_argument("inverse_N: field size does not match grid");
    if (std::abs(mean(g_, f)) > 1e-10)
      throw std::invalid_argument("inverse_N: data must have zero mean");
    if (!defl_) {
      const int N = g_.cells();
      Eigen::MatrixXd M = dense();
      M.array() += 1.0 / N;
      defl_ = std::make_unique<Eigen::LLT<Eigen::MatrixXd>>(M);
    }
    Field psi = defl_->solve(f);
    const double tol = 1e-11 * norm_h(g_, f);
    for (int pass = 0; pass < 4; ++pass) {
      Field r = f - apply_negL(psi);
      r.array() -= mean(g_, r) ;  // keep the correction in the solvable subspace
      if (norm_h(g_, r) <= tol) {
        psi.array() -= mean(g_, psi);
        return psi;
      }
      psi += defl_->solve(r);
    }
    throw std::runtime_error("inverse_N: residual did not reach tolerance");
  }

  // |f|_* = sqrt((f0, N f0)_H + mean(f)^2) with f0 the zero-mean part
  double norm_Vstar(const Field& f) const {
    const double m = mean(g_, f);
    Field f0 = f;
    f0.array() -= m;
    const Field psi = inverse_N(f0);
    double q = inner_h(g_, f0, psi);
    if (q < 0.0) q = 0.0;  // roundoff guard, the form is PSD
    return std::sqrt(q + m * m);
  }

  double dirichlet_energy(const Field& phi) const {
    return 0.5 * inner_h(g_, apply_negL(phi), phi);
  }

 private:
  Grid g_;
  mutable Eigen::MatrixXd dense_;
  mutable std::unique_ptr<Eigen::LLT<Eigen::MatrixXd>> defl_;
};

}  // namespace nlch

#endif
