// geometry.hpp
// Uniform cell-centered grids on the unit box (0,1)^d, d = 1 or 2, and the
// discrete H inner product all other modules are built on.

#ifndef NLCH_GEOMETRY_HPP
#define NLCH_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

namespace nlch {

using Field = Eigen::VectorXd;

struct Grid {
  int dim;
  int n;     // cells per dimension
  double h;  // 1/n

  Grid(int dim_, int n_) : dim(dim_), n(n_), h(1.0 / n_) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("Grid: dim must be 1 or 2");
    if (n < 4) throw std::invalid_argument("Grid: n must be >= 4");
  }

  int cells() const { return dim == 1 ? n : n * n; }
  double cell_volume() const { return dim == 1 ? h : h * h; }

  // linear index is iy*n + ix in 2d, plain i in 1d; centers at (i+1/2)h
  double x(int idx) const { return ((dim == 1 ? idx : idx % n) + 0.5) * h; }
  double y(int idx) const { return (idx / n + 0.5) * h; }
};

struct TimeGrid {
  double dt;
  double t_final;
  int steps;

  TimeGrid(double dt_, double t_final_) : dt(dt_), t_final(t_final_) {
    if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be positive");
    if (!(t_final > 0.0)) throw std::invalid_argument("TimeGrid: t_final must be positive");
    // the (1 - 1e-12) slack keeps an exactly divisible t_final from picking up
    // a spurious extra step through roundoff in the quotient
    steps = static_cast<int>(std::ceil((t_final / dt) * (1.0 - 1e-12)));
    if (steps < 1) steps = 1;
  }
};

// discrete L2 pairing, h^d sum a_i b_i; summation order is fixed (left to
// right) so reports reproduce bit-for-bit and inner_h(a,b) == inner_h(b,a)
inline double inner_h(const Grid& g, const Field& a, const Field& b) {
  if (a.size() != g.cells() || b.size() != g.cells())
    throw std::invalid_argument("inner_h: field size does not match grid");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return g.cell_volume() * s;
}

inline double norm_h(const Grid& g, const Field& a) { return std::sqrt(inner_h(g, a, a)); }

// |Omega| = 1, so the mean is just the h^d-weighted sum
inline double mean(const Grid& g, const Field& a) {
  if (a.size() != g.cells())
    throw std::invalid_argument("mean: field size does not match grid");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i];
  return g.cell_volume() * s;
}

struct InitSpec {
  enum Kind { constant, cosine, random } kind = constant;
  double mean = 0.0;
  // cosine: mean + amp cos(kx pi x) [cos(ky pi y)] + amp2 cos(kx2 pi x) [cos(ky2 pi y)]
  double amp = 0.0;
  int kx = 1, ky = 0;
  double amp2 = 0.0;
  int kx2 = 0, ky2 = 0;
  // random: uniform in [mean-amp, mean+amp], then shifted to hit the mean exactly
  unsigned long seed = 1;
};

inline Field make_field(const Grid& g, const InitSpec& spec) {
  const double pi = 3.14159265358979323846;
  Field u(g.cells());
  switch (spec.kind) {
    case InitSpec::constant:
      u.setConstant(spec.mean);
      break;
    case InitSpec::cosine:
      for (int i = 0; i < u.size(); ++i) {
        double v = spec.mean;
        double m1 = std::cos(spec.kx * pi * g.x(i));
        double m2 = std::cos(spec.kx2 * pi * g.x(i));
        if (g.dim == 2) {
          m1 *= std::cos(spec.ky * pi * g.y(i));
          m2 *= std::cos(spec.ky2 * pi * g.y(i));
        }
        u[i] = v + spec.amp * m1 + spec.amp2 * m2;
      }
      break;
    case InitSpec::random: {
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      for (int i = 0; i < u.size(); ++i) u[i] = spec.mean + spec.amp * dist(rng);
      const double shift = spec.mean - mean(g, u);
      for (int i = 0; i < u.size(); ++i) u[i] += shift;
      break;
    }
  }
  for (int i = 0; i < u.size(); ++i)
    if (!std::isfinite(u[i])) throw std::runtime_error("make_field: non-finite value");
  return u;
}

// snapshot format: index,x[,y],value with 17 significant digits
inline void write_field_csv(const Grid& g, const Field& u, const std::string& path) {
  if (u.size() != g.cells())
    throw std::invalid_argument("write_field_csv: field size does not match grid");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_field_csv: cannot open " + path);
  char buf[96];
  out << (g.dim == 1 ? "index,x,value\n" : "index,x,y,value\n");
  for (int i = 0; i < u.size(); ++i) {
    if (g.dim == 1)
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", i, g.x(i), u[i]);
    else
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", i, g.x(i), g.y(i), u[i]);
    out << buf;
  }
  if (!out) throw std::runtime_error("write_field_csv: write failed for " + path);
}

}  // namespace nlch

#endif
