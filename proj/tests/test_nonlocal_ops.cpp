#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nlch/nonlocal_ops.hpp"

using namespace nlch;

namespace {

Field random_field(int n, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field u(n);
  for (int i = 0; i < n; ++i) u[i] = dist(rng);
  return u;
}

}  // namespace

// Independent oracle: rebuild B for a small grid straight from the kernel
// definition (no shared code with assemble_kernel beyond the mollifier) and
// compare matrix-vector products entry by entry.
TEST_CASE("operator matches a hand-built matrix", "[nonlocal_ops]") {
  const Grid g(1, 8);
  const MollifierSpec m = make_mollifier(MollifierSpec::indicator, 0.6, 1);
  const KernelMatrix km = assemble_kernel(g, m);
  const NonlocalOperator B(km);

  const int N = g.cells();
  Eigen::MatrixXd Bref = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      const double r = std::abs(g.x(i) - g.x(j));
      if (r >= m.support_radius()) continue;
      const double k = m.rho(r) / (r * r) * g.h;
      Bref(i, i) += k;
      Bref(i, j) -= k;
    }
  }

  const Field phi = random_field(N, 11);
  const Field got = B.apply_B(phi);
  const Field want = Bref * phi;
  CHECK((got - want).lpNorm<Eigen::Infinity>() <= 1e-12 * want.lpNorm<Eigen::Infinity>());
}

TEST_CASE("operator algebra", "[nonlocal_ops]") {
  const Grid g(1, 48);
  const KernelMatrix km = assemble_kernel(g, make_mollifier(MollifierSpec::bump, 0.2, 1));
  const NonlocalOperator B(km);
  const int N = g.cells();

  const Field x = random_field(N, 1), y = random_field(N, 2);

  // linearity
  const Field lhs = B.apply_B(2.0 * x - 3.0 * y);
  const Field rhs = 2.0 * B.apply_B(x) - 3.0 * B.apply_B(y);
  CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-12 * rhs.lpNorm<Eigen::Infinity>());

  // self-adjointness in the H pairing
  const double a = inner_h(g, B.apply_B(x), y);
  const double b = inner_h(g, x, B.apply_B(y));
  CHECK(a == Catch::Approx(b).epsilon(1e-12));

  // constants are in the kernel of B, and ranges have zero mean
  CHECK(B.apply_B(Field::Ones(N)).lpNorm<Eigen::Infinity>() <=
        1e-13 * km.row_sums.lpNorm<Eigen::Infinity>());
  CHECK(std::abs(mean(g, B.apply_B(x))) <= 1e-13 * norm_h(g, B.apply_B(x)));

  CHECK_THROWS_AS(B.apply_B(Field::Ones(N + 1)), std::invalid_argument);
}

TEST_CASE("interaction energy", "[nonlocal_ops]") {
  const Grid g(1, 48);
  const KernelMatrix km = assemble_kernel(g, make_mollifier(MollifierSpec::indicator, 0.2, 1));
  const NonlocalOperator B(km);
  const int N = g.cells();

  CHECK(B.energy_E(Field::Ones(N)) == 0.0);
  CHECK(B.energy_E(Field::Zero(N)) == 0.0);

  // the pair sum and the quadratic form are independent routes to 2E
  for (unsigned long seed : {3ul, 4ul, 5ul}) {
    const Field phi = random_field(N, seed);
    const double E = B.energy_E(phi);
    CHECK(E >= 0.0);
    const double q = inner_h(g, B.apply_B(phi), phi);
    CHECK(2.0 * E == Catch::Approx(q).epsilon(1e-10));
  }

  // energy ignores constant shifts
  const Field phi = random_field(N, 6);
  Field shifted = phi;
  shifted.array() += 0.7;
  CHECK(B.energy_E(shifted) == Catch::Approx(B.energy_E(phi)).epsilon(1e-12));
}

TEST_CASE("resolvent of the nonlocal operator", "[nonlocal_ops]") {
  const Grid g(1, 48);
  const KernelMatrix km = assemble_kernel(g, make_mollifier(MollifierSpec::indicator, 0.2, 1));
  const NonlocalOperator B(km);
  const int N = g.cells();
  const Field phi = random_field(N, 21);

  SECTION("residual and contractions") {
    const double delta = 0.05;
    const Field x = B.resolvent_B(phi, delta);
    const Field res = x + delta * B.apply_B(x) - phi;
    CHECK(norm_h(g, res) <= 1e-10 * norm_h(g, phi));

    // nonexpansive in both the flat and the energy norms
    CHECK(norm_h(g, x) <= (1.0 + 1e-12) * norm_h(g, phi));
    CHECK(B.norm_Veps(x) <= (1.0 + 1e-12) * B.norm_Veps(phi));
  }

  SECTION("resolvent converges to the identity") {
    double prev = -1.0;
    for (double delta : {0.1, 0.01, 0.001}) {
      const double err = norm_h(g, B.resolvent_B(phi, delta) - phi);
      if (prev >= 0.0) CHECK(err < prev);
      prev = err;
    }
    CHECK((B.resolvent_B(phi, 0.0) - phi).lpNorm<Eigen::Infinity>() == 0.0);
  }

  SECTION("bad arguments") {
    CHECK_THROWS_AS(B.resolvent_B(phi, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(B.resolvent_B(Field::Ones(N + 2), 0.1), std::invalid_argument);
  }
}

TEST_CASE("energy norm", "[nonlocal_ops]") {
  const Grid g(1, 32);
  const KernelMatrix km = assemble_kernel(g, make_mollifier(MollifierSpec::bump, 0.25, 1));
  const NonlocalOperator B(km);

  // constants carry no interaction energy, so the norm is the H norm
  Field c = Field::Constant(32, -0.4);
  CHECK(B.norm_Veps(c) == Catch::Approx(0.4).epsilon(1e-14));

  const Field phi = random_field(32, 9);
  const double n2 = B.norm_Veps(phi);
  CHECK(n2 * n2 == Catch::Approx(inner_h(g, phi, phi) + 2.0 * B.energy_E(phi)).epsilon(1e-13));
}
