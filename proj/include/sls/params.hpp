#pragma once

// Medium parameters of the double-Lambda stationary-light scheme and the
// scales derived from them.
//
// Unit system: hbar = 1. Raw configurations may carry any consistent time
// and length units; to_internal_units() rescales to length = L_abs and
// time = L_abs / c, which is what every solver assumes.

#include <cmath>

#include "sls/error.hpp"

namespace sls {

template <typename Scalar = double>
struct MediumConfig {
  Scalar gamma{};  // optical dipole decay rate
  Scalar delta{};  // common single-photon detuning
  Scalar omega{};  // control Rabi frequency of each of the two (equal) beams
  Scalar g2n{};    // collective coupling g^2 n
  Scalar c{1};     // vacuum speed of light

  // Omega^2 = Omega_+^2 + Omega_-^2.
  Scalar omega_total_sq() const { return 2 * omega * omega; }
  Scalar gamma_over_delta() const { return gamma / delta; }
};

template <typename Scalar = double>
struct DerivedParams {
  Scalar l_abs{};
  Scalar tan2_theta{};
  Scalar cos_theta{};
  Scalar cos2_theta{};
  Scalar v_gr{};
  Scalar c_star{};
  Scalar m_star{};       // real part of the effective mass; carries the sign of delta
  Scalar lambda_c{};     // 1 / (|m_star| c_star)
  Scalar beta{};         // mixing angle, tanh(2 beta) = (1 - cos^2) / (1 + cos^2)
  Scalar rest_energy{};  // m_star c_star^2 (signed)
  Scalar zitter_freq{};  // 2 |m_star| c_star^2
  Scalar gamma_over_delta{};
  bool weak_detuning{};  // gamma/|delta| > 0.1: real-mass Dirac limit degraded
};

/// tan^2(theta) = (1 - cos^2 theta) / cos^2 theta for 0 < cos theta <= 1.
template <typename Scalar>
Scalar tan2_theta_from_cos(Scalar cos_theta) {
  if (!(cos_theta > 0 && cos_theta <= 1))
    throw ConfigError("cos_theta", "must lie in (0, 1]");
  const Scalar c2 = cos_theta * cos_theta;
  return (1 - c2) / c2;
}

/// Throws ConfigError naming the first offending field. allow_lossless admits
/// gamma = 0, which the solvers accept but derived scales do not.
template <typename Scalar>
void validate_medium(const MediumConfig<Scalar>& cfg, bool allow_lossless = false) {
  if (!(cfg.gamma > 0 || (allow_lossless && cfg.gamma == 0)))
    throw ConfigError("gamma", "must be positive");
  if (!(cfg.omega > 0)) throw ConfigError("omega", "must be positive");
  if (!(cfg.g2n > 0)) throw ConfigError("g2n", "must be positive");
  if (!(cfg.c > 0)) throw ConfigError("c", "must be positive");
  if (cfg.delta == 0 || !std::isfinite(cfg.delta))
    throw ConfigError("delta", "must be finite and non-zero (effective mass diverges)");
}

template <typename Scalar>
DerivedParams<Scalar> derive_params(const MediumConfig<Scalar>& cfg) {
  validate_medium(cfg);
  DerivedParams<Scalar> p;
  p.gamma_over_delta = cfg.gamma / cfg.delta;
  p.weak_detuning = std::abs(p.gamma_over_delta) > Scalar(0.1);
  p.l_abs = cfg.gamma * cfg.c / cfg.g2n;
  p.tan2_theta = cfg.g2n / cfg.omega_total_sq();
  p.cos2_theta = 1 / (1 + p.tan2_theta);
  p.cos_theta = std::sqrt(p.cos2_theta);
  p.v_gr = cfg.c * p.cos2_theta;
  p.c_star = cfg.c * p.cos_theta;
  p.m_star = p.gamma_over_delta / (2 * p.l_abs * cfg.c * p.cos2_theta);
  p.lambda_c = 1 / (std::abs(p.m_star) * p.c_star);
  p.beta = std::atanh((1 - p.cos2_theta) / (1 + p.cos2_theta)) / 2;
  p.rest_energy = p.m_star * p.c_star * p.c_star;
  p.zitter_freq = 2 * std::abs(p.rest_energy);
  return p;
}

/// Builds a raw configuration in internal units (c = 1, L_abs = 1) from the
/// dimensionless ratios gamma/delta, cos(theta) and Omega_pm/delta.
template <typename Scalar>
MediumConfig<Scalar> medium_from_ratios(Scalar gamma_over_delta, Scalar cos_theta,
                                        Scalar omega_over_delta) {
  if (!(gamma_over_delta != 0 && std::isfinite(gamma_over_delta)))
    throw ConfigError("gamma_over_delta", "must be finite and non-zero");
  if (!(omega_over_delta > 0)) throw ConfigError("omega_over_delta", "must be positive");
  const Scalar tan2 = tan2_theta_from_cos(cos_theta);
  if (!(tan2 > 0)) throw ConfigError("cos_theta", "must be < 1 for a coupled medium");
  // L_abs = gamma / g2n = 1 and g2n = 2 omega^2 tan^2(theta) fix all rates.
  const Scalar delta =
      gamma_over_delta / (2 * omega_over_delta * omega_over_delta * tan2);
  MediumConfig<Scalar> cfg;
  cfg.delta = delta;
  cfg.gamma = gamma_over_delta * delta;
  cfg.g2n = cfg.gamma;
  cfg.omega = omega_over_delta * std::abs(delta);
  cfg.c = 1;
  return cfg;
}

/// Rescales a configuration to length unit L_abs and time unit L_abs / c.
template <typename Scalar>
MediumConfig<Scalar> to_internal_units(const MediumConfig<Scalar>& cfg) {
  validate_medium(cfg);
  const Scalar l_abs = cfg.gamma * cfg.c / cfg.g2n;
  const Scalar t0 = l_abs / cfg.c;
  MediumConfig<Scalar> out;
  out.gamma = cfg.gamma * t0;
  out.delta = cfg.delta * t0;
  out.omega = cfg.omega * t0;
  out.g2n = cfg.g2n * t0 * t0;
  out.c = 1;
  return out;
}

/// Figure preset: gamma/delta = 0.01, Omega_pm/delta = 0.2, cos(theta) = 0.9975.
template <typename Scalar = double>
MediumConfig<Scalar> figure_preset() {
  return medium_from_ratios<Scalar>(Scalar(0.01), Scalar(0.9975), Scalar(0.2));
}

}  // namespace sls
