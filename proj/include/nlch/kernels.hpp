// kernels.hpp
// Radial mollifier families rho_eps, their normalization against the angular
// moment c_d, and dense assembly of the interaction kernel
//   K(x,y) = rho_eps(|x-y|)/|x-y|^2
// on a cell-centered grid. Entries carry the h^d quadrature weight so that
// row sums approximate (K * 1)(x_i) directly.

#ifndef NLCH_KERNELS_HPP
#define NLCH_KERNELS_HPP

#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "nlch/geometry.hpp"

namespace nlch {

inline constexpr double kPi = 3.14159265358979323846;

// integral of |e1 . sigma|^2 over the unit sphere S^{d-1}
inline double c_d(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return kPi;
    case 3: return 4.0 * kPi / 3.0;
  }
  throw std::invalid_argument("c_d: d must be 1, 2 or 3");
}

// adaptive Simpson; plain recursive bisection with the usual |S2-S1|/15 gate
inline double adaptive_simpson_(const std::function<double(double)>& f, double a, double b,
                                double fa, double fm, double fb, double whole, double tol,
                                int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double tol = 1e-12) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_(f, a, b, fa, fm, fb, whole, tol, 48);
}

// rho_eps(r) = A_d eps^-d profile(r/eps), scaled so that
// int_0^inf rho_eps(r) r^{d-1} dr = 2/c_d
struct MollifierSpec {
  enum Family { bump, indicator } family = indicator;
  int dim = 1;
  double epsilon = 0.1;
  double amplitude = 0.0;  // A_d

  double profile(double s) const {
    if (s >= 1.0) return 0.0;
    if (family == indicator) return 1.0;
    const double t = 1.0 - s * s;
    if (t <= 0.0) return 0.0;
    return std::exp(-1.0 / t);
  }

  double rho(double r) const {
    return amplitude * std::pow(epsilon, -dim) * profile(r / epsilon);
  }

  double support_radius() const { return epsilon; }
};

inline double normalization_target(int d) { return 2.0 / c_d(d); }

inline MollifierSpec make_mollifier(MollifierSpec::Family family, double epsilon, int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("make_mollifier: dim must be 1, 2 or 3");
  if (!(epsilon > 0.0)) throw std::invalid_argument("make_mollifier: epsilon must be positive");
  MollifierSpec m;
  m.family = family;
  m.dim = dim;
  m.epsilon = epsilon;
  if (family == MollifierSpec::indicator) {
    // int_0^1 s^{d-1} ds = 1/d exactly
    m.amplitude = 2.0 * dim / c_d(dim);
  } else {
    const double moment = integrate_adaptive(
        [&](double s) { return m.profile(s) * std::pow(s, dim - 1); }, 0.0, 1.0, 1e-14);
    m.amplitude = normalization_target(dim) / moment;
  }
  return m;
}

struct MollifierReport {
  double normalization_value = 0.0;
  double normalization_error = 0.0;  // relative deviation from 2/c_d
  double tail_mass = 0.0;            // int_delta^inf rho r^{d-1} dr
};

inline MollifierReport validate_mollifier(const MollifierSpec& m, double delta) {
  MollifierReport rep;
  const auto radial = [&](double r) { return m.rho(r) * std::pow(r, m.dim - 1); };
  const double target = normalization_target(m.dim);
  rep.normalization_value = integrate_adaptive(radial, 0.0, m.support_radius(), 1e-12 * target);
  rep.normalization_error = std::abs(rep.normalization_value - target) / target;
  rep.tail_mass = delta >= m.support_radius()
                      ? 0.0
                      : integrate_adaptive(radial, delta, m.support_radius(), 1e-12 * target);
  return rep;
}

inline MollifierReport validate_mollifier(const MollifierSpec& m) {
  return validate_mollifier(m, m.support_radius());
}

// dense interaction matrix; desk scale only, which is why assembly refuses
// grids beyond 8192 cells rather than trying to be clever
struct KernelMatrix {
  Grid grid;
  MollifierSpec moll;
  Eigen::MatrixXd K;         // symmetric, zero diagonal, h^d weight included
  Eigen::VectorXd row_sums;  // K_ij summed over j, cached at assembly
};

inline KernelMatrix assemble_kernel(const Grid& g, const MollifierSpec& m) {
  if (m.dim != g.dim) throw std::invalid_argument("assemble_kernel: mollifier/grid dim mismatch");
  if (m.epsilon < 2.0 * g.h)
    throw std::invalid_argument("assemble_kernel: epsilon < 2h, kernel under-resolved");
  if (m.epsilon < 3.0 * g.h)
    std::fprintf(stderr, "assemble_kernel: warning: epsilon = %g below 3h = %g, quadrature is coarse\n",
                 m.epsilon, 3.0 * g.h);
  const int N = g.cells();
  if (N > 8192)
    throw std::invalid_argument("assemble_kernel: grid exceeds 8192 cells, dense assembly refused");

  KernelMatrix km{g, m, Eigen::MatrixXd::Zero(N, N), Eigen::VectorXd::Zero(N)};
  const double w = g.cell_volume();
  const double sup2 = m.support_radius() * m.support_radius();
  // center distances are exact integer multiples of h, so K is symmetric by
  // construction (each pair computed once and mirrored)
  for (int i = 0; i < N; ++i) {
    const int ixi = g.dim == 1 ? i : i % g.n;
    const int iyi = g.dim == 1 ? 0 : i / g.n;
    for (int j = 0; j < i; ++j) {
      const int dxi = ixi - (g.dim == 1 ? j : j % g.n);
      const int dyi = g.dim == 1 ? 0 : iyi - j / g.n;
      const double r2 = (static_cast<double>(dxi) * dxi + static_cast<double>(dyi) * dyi) * g.h * g.h;
      if (r2 >= sup2) continue;
      const double v = m.rho(std::sqrt(r2)) / r2 * w;
      km.K(i, j) = v;
      km.K(j, i) = v;
    }
  }
  for (int i = 0; i < N; ++i) {
    double s = 0.0;
    for (int j = 0; j < N; ++j) s += km.K(i, j);
    km.row_sums[i] = s;
  }
  return km;
}

}  // namespace nlch

#endif
