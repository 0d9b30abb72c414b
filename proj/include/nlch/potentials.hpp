// potentials.hpp
// Double-well potentials split as Psi = gamma_hat + Pi_hat with gamma_hat
// convex and Pi linear Lipschitz, plus the Yosida regularization of the
// monotone part: J_lambda = (I + lambda gamma)^-1, gamma_lambda = (r - J)/lambda,
// and the Moreau envelope used for energies. Additive constants in Psi are
// dropped throughout; they never enter the dynamics.

#ifndef NLCH_POTENTIALS_HPP
#define NLCH_POTENTIALS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nlch/geometry.hpp"

namespace nlch {

struct PotentialSpec {
  enum Kind { polynomial, logarithmic, double_obstacle } kind = polynomial;
  double theta = 0.3;   // logarithmic: absolute temperature
  double theta0 = 1.0;  // logarithmic: critical temperature, theta < theta0
  double c = 1.0;       // double obstacle: well depth
};

inline void validate_potential(const PotentialSpec& p) {
  if (p.kind == PotentialSpec::logarithmic && !(p.theta > 0.0 && p.theta < p.theta0))
    throw std::invalid_argument("potential: logarithmic needs 0 < theta < theta0");
  if (p.kind == PotentialSpec::double_obstacle && !(p.c > 0.0))
    throw std::invalid_argument("potential: double obstacle needs c > 0");
}

// concave part, always linear here
inline double pi_part(const PotentialSpec& p, double r) {
  switch (p.kind) {
    case PotentialSpec::polynomial: return -r;
    case PotentialSpec::logarithmic: return -p.theta0 * r;
    case PotentialSpec::double_obstacle: return -2.0 * p.c * r;
  }
  return 0.0;
}

inline double lipschitz_Pi(const PotentialSpec& p) {
  switch (p.kind) {
    case PotentialSpec::polynomial: return 1.0;
    case PotentialSpec::logarithmic: return p.theta0;
    case PotentialSpec::double_obstacle: return 2.0 * p.c;
  }
  return 0.0;
}

inline double pi_hat(const PotentialSpec& p, double r) {
  switch (p.kind) {
    case PotentialSpec::polynomial: return -0.5 * r * r;
    case PotentialSpec::logarithmic: return -0.5 * p.theta0 * r * r;
    case PotentialSpec::double_obstacle: return -p.c * r * r;
  }
  return 0.0;
}

inline double xlogx_(double t) { return t <= 0.0 ? 0.0 : t * std::log(t); }

// convex part; infinite outside the effective domain for the singular kinds
inline double gamma_hat(const PotentialSpec& p, double r) {
  switch (p.kind) {
    case PotentialSpec::polynomial:
      return 0.25 * r * r * r * r;
    case PotentialSpec::logarithmic:
      if (std::abs(r) > 1.0) return std::numeric_limits<double>::infinity();
      return 0.5 * p.theta * (xlogx_(1.0 + r) + xlogx_(1.0 - r));
    case PotentialSpec::double_obstacle:
      return std::abs(r) <= 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

// J + lambda gamma(J) = r, solved per point. Polynomial and logarithmic use a
// bracketed Newton iteration; the obstacle resolvent is a plain clamp.
inline double resolvent_J(const PotentialSpec& p, double lambda, double r) {
  if (!(lambda > 0.0)) throw std::invalid_argument("resolvent_J: lambda must be positive");
  switch (p.kind) {
    case PotentialSpec::polynomial: {
      double lo = std::min(0.0, r), hi = std::max(0.0, r);
      double J = r / (1.0 + lambda);  // decent start for both small and large lambda
      for (int it = 0; it < 100; ++it) {
        const double g = J + lambda * J * J * J - r;
        if (std::abs(g) <= 1e-13 * std::max(1.0, std::abs(r))) return J;
        (g > 0.0 ? hi : lo) = J;
        const double step = g / (1.0 + 3.0 * lambda * J * J);
        J -= step;
        if (!(J > lo && J < hi)) J = 0.5 * (lo + hi);
      }
      return J;
    }
    case PotentialSpec::logarithmic: {
      const double edge = 1.0 - 1e-16;  // largest double below 1
      double lo = -edge, hi = edge;
      const double a = lambda * p.theta;
      if (r >= hi + a * std::atanh(hi)) return hi;  // saturates only for extreme data
      if (r <= lo + a * std::atanh(lo)) return lo;
      double J = std::clamp(r, -0.9, 0.9);
      for (int it = 0; it < 200; ++it) {
        const double g = J + a * std::atanh(J) - r;
        if (std::abs(g) <= 1e-13 * std::max(1.0, std::abs(r))) return J;
        (g > 0.0 ? hi : lo) = J;
        const double step = g / (1.0 + a / (1.0 - J * J));
        J -= step;
        if (!(J > lo && J < hi)) J = 0.5 * (lo + hi);
      }
      return J;
    }
    case PotentialSpec::double_obstacle:
      return std::clamp(r, -1.0, 1.0);
  }
  return r;
}

inline double yosida_gamma(const PotentialSpec& p, double lambda, double r) {
  return (r - resolvent_J(p, lambda, r)) / lambda;
}

// derivative of gamma_lambda, used in Newton Jacobians; 1/(lambda)-bounded
inline double yosida_gamma_prime(const PotentialSpec& p, double lambda, double r) {
  if (!(lambda > 0.0)) throw std::invalid_argument("yosida_gamma_prime: lambda must be positive");
  switch (p.kind) {
    case PotentialSpec::polynomial: {
      const double J = resolvent_J(p, lambda, r);
      const double Jp = 1.0 / (1.0 + 3.0 * lambda * J * J);
      return (1.0 - Jp) / lambda;
    }
    case PotentialSpec::logarithmic: {
      const double J = resolvent_J(p, lambda, r);
      const double Jp = 1.0 / (1.0 + lambda * p.theta / (1.0 - J * J));
      return (1.0 - Jp) / lambda;
    }
    case PotentialSpec::double_obstacle:
      return std::abs(r) <= 1.0 ? 0.0 : 1.0 / lambda;
  }
  return 0.0;
}

// Moreau envelope: gamma_hat(J(r)) + lambda/2 |gamma_lambda(r)|^2, finite
// everywhere and below gamma_hat
inline double gamma_hat_lambda(const PotentialSpec& p, double lambda, double r) {
  const double J = resolvent_J(p, lambda, r);
  const double gl = (r - J) / lambda;
  return gamma_hat(p, J) + 0.5 * lambda * gl * gl;
}

inline double potential_energy(const Grid& g, const PotentialSpec& p, double lambda,
                               const Field& u) {
  if (u.size() != g.cells())
    throw std::invalid_argument("potential_energy: field size does not match grid");
  double s = 0.0;
  for (int i = 0; i < u.size(); ++i) s += gamma_hat_lambda(p, lambda, u[i]) + pi_hat(p, u[i]);
  return g.cell_volume() * s;
}

}  // namespace nlch

#endif
