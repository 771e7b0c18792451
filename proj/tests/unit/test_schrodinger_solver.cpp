#include <doctest.h>

#include <cmath>

#include "sls/observables.hpp"
#include "sls/schrodinger_solver.hpp"

using namespace sls;
using C = std::complex<double>;

namespace {

const DerivedParams<double> kParams = derive_params(figure_preset<double>());

SumModeState<double> gaussian(const Grid<double>& g, double w, double k0 = 0) {
  SumModeState<double> s;
  s.field.resize(g.n_points());
  for (Eigen::Index j = 0; j < g.n_points(); ++j) {
    const double x = g.z()[j] / w;
    s.field[j] = std::exp(-x * x / 2) * std::exp(C(0, k0 * g.z()[j]));
  }
  s.field /= std::sqrt(s.norm(g.dz()));
  return s;
}

}  // namespace

TEST_SUITE("schrodinger_solver") {
  TEST_CASE("free gaussian spreads analytically") {
    Grid<double> g(4096, 16384.0);
    const double w = 100.0;
    auto s = gaussian(g, w);
    const double r0 = measure(s, g).width;
    SchrodingerSolver<double> solver(g, kParams, free_potential(g), {1.0, false, 1});
    for (int block = 1; block <= 4; ++block) {
      solver.advance(s, 100);
      const double t = s.t;
      const double expect = std::sqrt(1 + std::pow(t / (kParams.m_star * w * w), 2));
      CHECK(measure(s, g).width / r0 == doctest::Approx(expect).epsilon(1e-6));
    }
  }

  TEST_CASE("plane wave decays at the imaginary-mass rate") {
    Grid<double> g(256, 2560.0);
    const Eigen::Index mode = 7;
    const double k = g.k()[mode];
    SumModeState<double> s;
    s.field = (C(0, 1) * (g.k()[mode] * g.z()).cast<C>()).exp();
    SchrodingerSolver<double> solver(g, kParams, free_potential(g), {2.0, true, 1});
    solver.advance(s, 2000);
    const double rate = -std::log(std::abs(s.field[17])) / s.t;
    const double expect = kParams.gamma_over_delta * k * k / (2 * kParams.m_star);
    CHECK(rate == doctest::Approx(expect).epsilon(1e-6));
    CHECK((s.field.abs() - s.field.abs()[0]).abs().maxCoeff() < 1e-12);
  }

  TEST_CASE("constant potential only changes the phase") {
    Grid<double> g(512, 2048.0);
    RealArray<double> u = RealArray<double>::Constant(512, -0.01);
    const auto pot = custom_potential(g, u);
    auto a = gaussian(g, 40.0, 0.02), b = a;
    SchrodingerSolver<double> with(g, kParams, pot, {2.0, false, 1});
    SchrodingerSolver<double> without(g, kParams, free_potential(g), {2.0, false, 1});
    with.advance(a, 300);
    without.advance(b, 300);
    CHECK((a.intensity() - b.intensity()).abs().maxCoeff() < 1e-12);
    CHECK(std::abs(a.field[256] / b.field[256] - std::exp(C(0, 0.01 * 600))) < 1e-10);
  }

  TEST_CASE("norm conservation without damping") {
    Grid<double> g(1024, 1024.0);
    const auto pot = square_well(g, 1.875, 0.1, kParams);
    auto s = gaussian(g, 10.0, 0.1);
    SchrodingerSolver<double> solver(g, kParams, pot, {0.5, false, 1});
    solver.advance(s, 10000);
    CHECK(std::abs(s.norm(g.dz()) - 1) < 1e-10);
  }

  TEST_CASE("norm strictly decreases with damping") {
    Grid<double> g(1024, 4096.0);
    auto s = gaussian(g, 30.0, 0.02);
    SchrodingerSolver<double> solver(g, kParams, free_potential(g), {1.0, true, 1});
    double last = s.norm(g.dz());
    for (int k = 0; k < 50; ++k) {
      solver.advance(s, 20);
      const double n = s.norm(g.dz());
      CHECK(n < last);
      last = n;
    }
  }

  TEST_CASE("step helper and finite check") {
    Grid<double> g(128, 128.0);
    auto s = gaussian(g, 10.0);
    const auto r = schrodinger_step(s, SchrodingerConfig<double>{0.5, false, 1}, g, kParams,
                                    free_potential(g));
    CHECK(r.t == 0.5);
    s.field[3] = C(std::nan(""), 0);
    SchrodingerSolver<double> solver(g, kParams, free_potential(g), {0.5, false, 1});
    CHECK_THROWS_AS(solver.advance(s, 64), NumericalAbort);
    CHECK_THROWS_AS(SchrodingerSolver<double>(g, kParams, free_potential(g), {0.0, false, 1}), ConfigError);
  }
}
