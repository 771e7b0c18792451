#include <doctest.h>

#include <cmath>
#include <random>

#include "sls/params.hpp"

using namespace sls;

TEST_SUITE("params") {
  TEST_CASE("figure preset gives lambda_C = 199.5 L_abs") {
    const auto p = derive_params(figure_preset<double>());
    CHECK(p.l_abs == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(p.lambda_c / p.l_abs - 199.5) / 199.5 < 1e-9);
  }

  TEST_CASE("rest energy and trembling frequency of the preset") {
    const auto p = derive_params(figure_preset<double>());
    // (gamma/delta) c / (2 L_abs) evaluated by hand
    CHECK(p.rest_energy == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(p.zitter_freq == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(p.c_star == doctest::Approx(0.9975).epsilon(1e-14));
  }

  TEST_CASE("tan^2 theta from cos theta") {
    CHECK(tan2_theta_from_cos(1.0) == 0.0);
    CHECK(tan2_theta_from_cos(1 / std::sqrt(2.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(tan2_theta_from_cos(0.9975) == doctest::Approx(0.0050188).epsilon(1e-5));
    // round trip through a full derivation
    const auto p = derive_params(medium_from_ratios(0.01, 0.9975, 0.2));
    CHECK(p.tan2_theta == doctest::Approx(tan2_theta_from_cos(0.9975)).epsilon(1e-13));
    CHECK(p.cos_theta == doctest::Approx(0.9975).epsilon(1e-14));
    CHECK_THROWS_AS(tan2_theta_from_cos(0.0), ConfigError);
    CHECK_THROWS_AS(tan2_theta_from_cos(1.01), ConfigError);
    CHECK_THROWS_AS(tan2_theta_from_cos(-0.5), ConfigError);
  }

  TEST_CASE("identities hold for random media") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 1000; ++i) {
      MediumConfig<double> m;
      m.gamma = std::pow(10.0, u(rng));
      m.delta = (i % 2 ? 1 : -1) * std::pow(10.0, u(rng) + 1);
      m.omega = std::pow(10.0, u(rng));
      m.g2n = std::pow(10.0, u(rng));
      m.c = std::pow(10.0, u(rng) / 2);
      const auto p = derive_params(m);
      CHECK(p.lambda_c * std::abs(p.m_star) * p.c_star == doctest::Approx(1.0).epsilon(1e-12));
      const double alt = 2 * p.l_abs * std::abs(m.delta / m.gamma) * p.cos_theta;
      CHECK(p.lambda_c == doctest::Approx(alt).epsilon(1e-12));
      CHECK(p.c_star == doctest::Approx(std::sqrt(p.v_gr * m.c)).epsilon(1e-12));
      CHECK(p.cos_theta > 0);
      CHECK(p.cos_theta < 1);
      CHECK(std::tanh(2 * p.beta) ==
            doctest::Approx((1 - p.cos2_theta) / (1 + p.cos2_theta)).epsilon(1e-12));
      CHECK(p.weak_detuning == (std::abs(m.gamma / m.delta) > 0.1));
    }
  }

  TEST_CASE("strong control field recovers vacuum light speed") {
    MediumConfig<double> m{1.0, 50.0, 1e6, 1.0, 1.0};
    const auto p = derive_params(m);
    CHECK(p.c_star == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(p.v_gr == doctest::Approx(1.0).epsilon(1e-11));
  }

  TEST_CASE("lambda_C grows with cos theta at fixed coupling") {
    MediumConfig<double> m{1.0, 100.0, 1.0, 4.0, 1.0};
    double last = 0;
    for (double w : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      m.omega = w;
      const double lc = derive_params(m).lambda_c;
      CHECK(lc > last);
      last = lc;
    }
  }

  TEST_CASE("invalid media are rejected with the field name") {
    MediumConfig<double> ok{1.0, 100.0, 2.0, 1.0, 1.0};
    auto field_of = [](MediumConfig<double> m) {
      try {
        derive_params(m);
      } catch (const ConfigError& e) {
        return e.field();
      }
      return std::string();
    };
    auto m = ok;
    m.gamma = 0;
    CHECK(field_of(m) == "gamma");
    m = ok;
    m.omega = -1;
    CHECK(field_of(m) == "omega");
    m = ok;
    m.g2n = 0;
    CHECK(field_of(m) == "g2n");
    m = ok;
    m.delta = 0;
    CHECK(field_of(m) == "delta");
    CHECK(field_of(ok).empty());
  }

  TEST_CASE("rescaling to internal units") {
    MediumConfig<double> m{3e7, 3e9, 1e8, 2e17, 3e8};  // SI-like magnitudes
    const auto in = to_internal_units(m);
    const auto p0 = derive_params(m);
    const auto p1 = derive_params(in);
    CHECK(p1.l_abs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(in.c == 1.0);
    CHECK(p1.lambda_c == doctest::Approx(p0.lambda_c / p0.l_abs).epsilon(1e-12));
    CHECK(p1.beta == doctest::Approx(p0.beta).epsilon(1e-12));
    CHECK(p1.gamma_over_delta == doctest::Approx(p0.gamma_over_delta).epsilon(1e-12));
  }

  TEST_CASE("ratio construction reproduces the requested ratios") {
    const auto m = medium_from_ratios(0.02, 0.99, 0.3);
    CHECK(m.gamma / m.delta == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(m.omega / m.delta == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(derive_params(m).cos_theta == doctest::Approx(0.99).epsilon(1e-14));
    CHECK(derive_params(m).l_abs == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(medium_from_ratios(0.01, 1.0, 0.2), ConfigError);
    CHECK_THROWS_AS(medium_from_ratios(0.0, 0.9, 0.2), ConfigError);
  }
}
