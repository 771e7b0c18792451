#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

#include "sls/mb_solver.hpp"
#include "sls/potentials.hpp"

using namespace sls;

TEST_SUITE("potentials") {
  const auto medium = figure_preset<double>();
  const auto params = derive_params(medium);

  TEST_CASE("well arguments") {
    Grid<double> g(4096, 4096.0);
    CHECK(square_well(g, 1.875, 0.1, params).well_argument() == doctest::Approx(0.1875).epsilon(1e-14));
    CHECK(square_well(g, 3.125, 0.1, params).well_argument() == doctest::Approx(0.3125).epsilon(1e-14));
    CHECK(square_well(g, 3.125, 0.1, params).klein_parameter() == 3.125);
    const auto zero = square_well(g, 0.0, 0.1, params);
    CHECK(zero.is_zero());
    CHECK(zero.samples.abs().maxCoeff() == 0.0);
  }

  TEST_CASE("sharp well samples") {
    Grid<double> g(4096, 4096.0);
    const auto w = square_well(g, 1.875, 0.1, params);
    const double depth = 1.875 * params.rest_energy;
    const double half = 0.1 * params.lambda_c;
    for (Eigen::Index j = 0; j < g.n_points(); ++j) {
      const double expect = std::abs(g.z()[j]) <= half ? -depth : 0.0;
      REQUIRE(w.samples[j] == expect);
    }
    // Integral within one cell of -U0 2 a lambda_C.
    const double integral = w.samples.sum() * g.dz();
    CHECK(std::abs(integral + depth * 2 * half) <= depth * g.dz() + 1e-12);
    // Bitwise even about z = 0 (index n/2).
    const Eigen::Index n = g.n_points();
    for (Eigen::Index j = 1; j < n / 2; ++j) REQUIRE(w.samples[n / 2 + j] == w.samples[n / 2 - j]);
    CHECK((w.delta_samples == w.samples).all());
    CHECK(w.max_abs() == doctest::Approx(depth));
  }

  TEST_CASE("smoothed edges") {
    Grid<double> g(4096, 4096.0);
    const auto w = square_well(g, 1.875, 0.1, params, 4.0);
    const double depth = 1.875 * params.rest_energy;
    CHECK(w.samples[g.n_points() / 2] == doctest::Approx(-depth).epsilon(1e-6));
    CHECK(std::abs(w.samples[0]) < 1e-12);
    CHECK((w.samples <= 0).all());
  }

  TEST_CASE("preconditions") {
    Grid<double> g(1024, 1024.0);
    CHECK_THROWS_AS(square_well(g, -1.0, 0.1, params), ConfigError);
    CHECK_THROWS_AS(square_well(g, 1.0, 0.0, params), ConfigError);
    CHECK_THROWS_AS(square_well(g, 1.0, 3.0, params), ConfigError);  // 598.5 > 512
    CHECK_THROWS_AS(custom_potential<double>(g, RealArray<double>::Zero(10)), ConfigError);
  }

  TEST_CASE("detuning mappings") {
    const double u = -0.4 * params.rest_energy;
    CHECK(detuning_for_potential(u, medium, params, DetuningMapping::unit) == u);
    CHECK(detuning_for_potential(u, medium, params, DetuningMapping::linear) ==
          doctest::Approx(u / (1 - params.cos2_theta)));
    CHECK(detuning_for_potential(0.0, medium, params, DetuningMapping::polariton) == 0.0);
  }

  TEST_CASE("polariton mapping places the uniform sum-mode level at U") {
    // Oracle: eigenvalues of the local generator with gamma -> 0, restricted to
    // no derivative coupling (k = 0). The level continuously connected to the
    // dark state must sit at energy U.
    auto m0 = medium;
    m0.gamma = 1e-12;
    for (double u0 : {0.05, 0.5, 1.0, 1.875}) {
      const double u = -u0 * params.rest_energy;
      const double d = detuning_for_potential(u, m0, params, DetuningMapping::polariton);
      const Matrix5<double> a = mb_local_generator(m0, d, false);
      Eigen::ComplexEigenSolver<Matrix5<double>> es(a);
      double best = 1e300;
      for (int i = 0; i < 5; ++i) {
        // Time dependence exp(-i E t) <-> eigenvalue -i E.
        const double e = -es.eigenvalues()[i].imag();
        best = std::min(best, std::abs(e - u));
      }
      CHECK(best < 1e-9 * params.rest_energy + 1e-12);
    }
  }
}
