#include <doctest.h>

#include <cmath>
#include <random>

#include "sls/observables.hpp"

using namespace sls;
using C = std::complex<double>;

namespace {

ObservableSeries<double> synthetic(int n, double dt, const std::function<void(ObservableRecord<double>&)>& fill) {
  ObservableSeries<double> s;
  for (int i = 0; i < n; ++i) {
    ObservableRecord<double> r;
    r.t = i * dt;
    r.valid = true;
    fill(r);
    s.push_back(r);
  }
  return s;
}

}  // namespace

TEST_SUITE("observables") {
  TEST_CASE("even profile has zero center") {
    Grid<double> g(1024, 512.0);
    RealArray<double> in = (-g.z().square() / 200.0).exp();
    in[0] = 0;  // the z = -L/2 sample has no mirror partner
    const auto r = measure_intensity<double>(in, 0.0, g);
    CHECK(r.valid);
    CHECK(std::abs(r.com) < 1e-13);
    CHECK(r.com_left == doctest::Approx(-r.com_right).epsilon(1e-12));
  }

  TEST_CASE("single occupied cell") {
    Grid<double> g(256, 256.0);
    RealArray<double> in = RealArray<double>::Zero(256);
    in[200] = 3.0;
    const auto r = measure_intensity<double>(in, 0.0, g);
    CHECK(r.com == g.z()[200]);
    CHECK(r.width == 0.0);
    CHECK(r.norm == doctest::Approx(3.0));
  }

  TEST_CASE("two separated gaussians") {
    Grid<double> g(8192, 4096.0);
    const double d = 600, sigma = 35;  // each lobe has rms sigma
    RealArray<double> in = (-(g.z() - d).square() / (2 * sigma * sigma)).exp() +
                           (-(g.z() + d).square() / (2 * sigma * sigma)).exp();
    const auto r = measure_intensity<double>(in, 0.0, g);
    // brute-force moments
    double m0 = 0, m1 = 0, m2 = 0;
    for (Eigen::Index j = 0; j < g.n_points(); ++j) {
      m0 += in[j];
      m1 += g.z()[j] * in[j];
      m2 += g.z()[j] * g.z()[j] * in[j];
    }
    CHECK(std::abs(r.com) < 1e-9);
    CHECK(r.width == doctest::Approx(std::sqrt(d * d + sigma * sigma)).epsilon(1e-10));
    CHECK(r.width == doctest::Approx(std::sqrt(m2 / m0 - (m1 / m0) * (m1 / m0))).epsilon(1e-10));
    CHECK(r.com_right == doctest::Approx(d).epsilon(1e-10));
    CHECK(r.com_left == doctest::Approx(-d).epsilon(1e-10));
    CHECK(r.peak_right == doctest::Approx(d).epsilon(1e-6));
    CHECK(r.peak_left == doctest::Approx(-d).epsilon(1e-6));
    CHECK(r.lobe_contrast == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("zero intensity is flagged") {
    Grid<double> g(128, 128.0);
    const auto r = measure_intensity<double>(RealArray<double>::Zero(128), 1.0, g);
    CHECK_FALSE(r.valid);
    CHECK(r.norm == 0.0);
  }

  TEST_CASE("global phase and translation") {
    Grid<double> g(1024, 1024.0);
    SumModeState<double> s;
    s.field = (-(g.z() - 30).square() / 800).exp().cast<C>() * (C(0, 0.1) * g.z().cast<C>()).exp();
    const auto a = measure(s, g);
    auto t = s;
    t.field *= std::exp(C(0, 1.234));
    const auto b = measure(t, g);
    CHECK(b.com == doctest::Approx(a.com).epsilon(1e-14));
    CHECK(b.width == doctest::Approx(a.width).epsilon(1e-14));
    SumModeState<double> shifted;
    shifted.field.resize(1024);
    for (Eigen::Index j = 0; j < 1024; ++j) shifted.field[(j + 17) % 1024] = s.field[j];
    CHECK(std::abs(measure(shifted, g).com - (a.com + 17 * g.dz())) <= g.dz());
  }

  TEST_CASE("in-well norm") {
    const auto params = derive_params(figure_preset<double>());
    Grid<double> g(4096, 4096.0);
    const auto well = square_well(g, 1.875, 0.1, params);
    RealArray<double> in = RealArray<double>::Ones(4096);
    const auto r = measure_intensity<double>(in, 0.0, g, &well);
    const double cells = ((g.z().abs() <= 0.1 * params.lambda_c)).cast<double>().sum();
    CHECK(r.norm_in_well == doctest::Approx(cells * g.dz()));
    CHECK(std::isnan(measure_intensity<double>(in, 0.0, g).norm_in_well));
  }

  TEST_CASE("spectrum of a cosine") {
    const double w0 = 0.37;
    const auto s = synthetic(512, 0.5, [&](auto& r) { r.com_right = std::cos(w0 * r.t); });
    const auto spec = com_spectrum(s, Window::none);
    REQUIRE(spec.has_peak);
    CHECK(std::abs(spec.peak_omega - w0) < spec.bin_width);
    const auto scaled = synthetic(512, 0.5, [&](auto& r) { r.com_right = 40 * std::cos(w0 * r.t) + 3; });
    CHECK(com_spectrum(scaled, Window::none).peak_omega == doctest::Approx(spec.peak_omega).epsilon(1e-12));
    CHECK(com_spectrum(s, Window::hann).peak_omega == doctest::Approx(w0).epsilon(0.01));
  }

  TEST_CASE("spectrum of a constant is empty") {
    const auto s = synthetic(128, 1.0, [](auto& r) { r.com_right = 4.5; });
    const auto spec = com_spectrum(s);
    CHECK_FALSE(spec.has_peak);
    CHECK(spec.omega.empty());
    CHECK(spec.magnitude.empty());
  }

  TEST_CASE("spectrum preconditions") {
    CHECK_THROWS_AS(com_spectrum(synthetic(32, 1.0, [](auto&) {})), ConfigError);
    auto s = synthetic(100, 1.0, [](auto& r) { r.com_right = std::sin(r.t); });
    s.records[50].t += 0.3;
    CHECK_THROWS_AS(com_spectrum(s), ConfigError);
  }

  TEST_CASE("lobe speed") {
    const double cs = 0.9975;
    const auto s = synthetic(100, 4.0, [&](auto& r) {
      r.peak_right = cs * r.t;
      r.com_right = 0.5 * cs * r.t + 7;
      r.lobe_contrast = 0.99;
    });
    const auto fit = lobe_speed(s, 0.0, 1e9);
    CHECK(fit.speed == doctest::Approx(cs).epsilon(1e-12));
    CHECK_FALSE(fit.low_confidence);
    CHECK(lobe_speed(s, 0.0, 1e9, LobeEstimator::centroid).speed == doctest::Approx(0.5 * cs).epsilon(1e-12));
    CHECK(com_right_slope(s) == doctest::Approx(0.5 * cs).epsilon(1e-12));
    CHECK(lobe_speed(s, 0.0, 30.0).low_confidence);  // 8 samples

    const auto diffusive = synthetic(100, 4.0, [&](auto& r) {
      r.peak_right = 1.0;
      r.com_right = 50 + 0.01 * r.t;
      r.lobe_contrast = 0.001;
    });
    CHECK(lobe_speed(diffusive, 0.0, 1e9).low_confidence);
  }

  TEST_CASE("decay rate fit") {
    const auto s = synthetic(200, 5.0, [](auto& r) { r.norm_in_well = 0.7 * std::exp(-0.003 * r.t); });
    const auto fit = in_well_decay_rate(s, 100.0);
    CHECK(fit.rate == doctest::Approx(0.003).epsilon(1e-10));
    CHECK(fit.samples == 180);
    CHECK_THROWS_AS(in_well_decay_rate(s, 1e9), ConfigError);
  }

  TEST_CASE("normalized intensity difference") {
    RealArray<double> a(4), b(4);
    a << 1, 2, 3, 4;
    b = 5 * a;
    CHECK(normalized_l2_difference(a, b) < 1e-15);
    b << 1, 2, 3, 5;
    const double expect = ((a / 10 - b / 11).matrix().norm()) / (b / 11).matrix().norm();
    CHECK(normalized_l2_difference(a, b) == doctest::Approx(expect));
    CHECK(std::isnan(normalized_l2_difference(a, RealArray<double>(RealArray<double>::Zero(4)))));
  }
}
