#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sls/analytic.hpp"
#include "sls/observables.hpp"

using namespace sls;

TEST_SUITE("analytic") {
  const DerivedParams<double> p = derive_params(figure_preset<double>());

  TEST_CASE("vanishing well argument binds nothing") {
    const auto w = well_bound_energy(0.0, 0.1);
    CHECK(w.energy == 1.0);
    CHECK(std::isinf(w.decay_length));
    CHECK_FALSE(w.bound);
    CHECK_THROWS_AS(well_eigenprofile(Grid<double>(256, 256.0), 0.0, 0.1, p), ConfigError);
  }

  TEST_CASE("quarter-period argument binds maximally") {
    const auto w = well_bound_energy(std::numbers::pi / 2, 1.0);
    CHECK(w.energy == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(w.decay_length == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w.bound);
  }

  TEST_CASE("shallow narrow well") {
    const auto w = well_bound_energy(1.875, 0.1);
    CHECK(w.well_argument == doctest::Approx(0.1875));
    // Reference values from an independent high-precision evaluation.
    CHECK(w.energy == doctest::Approx(0.9824733131).epsilon(1e-10));
    CHECK(w.decay_length == doctest::Approx(5.364711984).epsilon(1e-9));
    CHECK(w.energy == doctest::Approx(0.98247).epsilon(1e-5));
    CHECK(1 / w.decay_length == doctest::Approx(0.18640).epsilon(1e-4));
  }

  TEST_CASE("bounds hold on random wells") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u0(0.0, 50.0), a(1e-4, 5.0);
    for (int i = 0; i < 10000; ++i) {
      const auto w = well_bound_energy(u0(rng), a(rng));
      REQUIRE(w.decay_length >= 1.0);
      REQUIRE(w.energy <= 1.0);
      REQUIRE(w.energy >= 0.0);
    }
  }

  TEST_CASE("eigenprofile") {
    Grid<double> g(2048, 4096.0);
    const auto f = well_eigenprofile(g, std::numbers::pi / 2, 1.0, p);
    const Eigen::Index n = g.n_points();
    CHECK(f.square().sum() * g.dz() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f[n / 2 + 11] / f[n / 2 + 10] == doctest::Approx(std::exp(-g.dz() / p.lambda_c)).epsilon(1e-12));
    for (Eigen::Index j = 1; j < n / 2; ++j) REQUIRE(f[n / 2 + j] == f[n / 2 - j]);
  }

  TEST_CASE("trembling trajectory") {
    const double sk = 0.1;
    const double m = p.rest_energy;
    const double lim = std::sqrt(std::numbers::pi) / (sk * std::cosh(2 * p.beta));
    CHECK(zitter_com(1e18, sk, p) == doctest::Approx(lim).epsilon(1e-6));
    CHECK(zitter_com_normalized(1234.5, sk, p) == doctest::Approx(zitter_com(1234.5, sk, p) / 2));
    CHECK(zitter_com_limit(sk, p) == doctest::Approx(lim / 2));

    // Envelope A(t) = (lim - z) / cos(2 m t + pi/4) falls as t^(-1/2).
    auto envelope = [&](double t) {
      return (lim - zitter_com(t, sk, p)) / std::cos(2 * m * t + std::numbers::pi / 4);
    };
    for (double t : {1000.0, 2500.0, 4000.0, 7000.0}) {
      const double c1 = std::cos(2 * m * t + std::numbers::pi / 4);
      const double c4 = std::cos(8 * m * t + std::numbers::pi / 4);
      if (std::abs(c1) < 0.3 || std::abs(c4) < 0.3) continue;
      CHECK(envelope(t) / envelope(4 * t) == doctest::Approx(2.0).epsilon(1e-6));
    }
  }

  TEST_CASE("spectrum of the sampled trajectory peaks at twice the rest energy") {
    const double sk = 0.1;
    ObservableSeries<double> series;
    const double t_final = 40 / p.rest_energy;
    const int n = 2000;
    for (int i = 1; i <= n; ++i) {
      ObservableRecord<double> r;
      r.t = t_final * i / n;
      r.com = zitter_com(r.t, sk, p);
      r.valid = true;
      series.push_back(r);
    }
    const auto spec = com_spectrum(series, Window::hann, SpectrumSignal::com);
    REQUIRE(spec.has_peak);
    CHECK(std::abs(spec.peak_omega - p.zitter_freq) < spec.bin_width);
    CHECK(std::abs(spec.peak_omega - p.zitter_freq) / p.zitter_freq < 0.02);
  }
}
