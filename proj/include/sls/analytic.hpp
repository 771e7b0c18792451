#pragma once

// Closed-form results for the effective Dirac description: lowest bound state
// of a narrow deep square well and the center-of-mass trajectory after a
// pi/2 flip of the relative control phase.

#include <cmath>
#include <limits>
#include <numbers>

#include "sls/error.hpp"
#include "sls/grid.hpp"
#include "sls/params.hpp"

namespace sls {

template <typename Scalar = double>
struct WellSolution {
  Scalar energy{};         // +|E| in units of m* c*^2; the pair is (+energy, -energy)
  Scalar decay_length{};   // L_conf in units of lambda_C
  Scalar well_argument{};  // (U0 / m* c*^2) (a / lambda_C)
  bool bound{};            // |E| < m* c*^2
};

/// E = +- m* c*^2 cos(u0 a), L_conf = lambda_C / |sin(u0 a)|.
///
/// Exact in the limit a -> 0, u0 -> infinity with u0 a fixed; for finite
/// wells it is an estimate.
template <typename Scalar>
WellSolution<Scalar> well_bound_energy(Scalar u0, Scalar a) {
  if (!(u0 >= 0)) throw ConfigError("u0_mc2", "must be non-negative");
  if (!(a > 0)) throw ConfigError("a_lambda_c", "must be positive");
  WellSolution<Scalar> w;
  w.well_argument = u0 * a;
  w.energy = std::abs(std::cos(w.well_argument));
  const Scalar s = std::abs(std::sin(w.well_argument));
  w.decay_length = s > 0 ? 1 / s : std::numeric_limits<Scalar>::infinity();
  w.bound = s > 0 && w.energy < 1;
  return w;
}

/// exp(-|z| |sin(u0 a)| / lambda_C) sampled on the grid with unit norm.
template <typename Scalar>
RealArray<Scalar> well_eigenprofile(const Grid<Scalar>& grid, Scalar u0, Scalar a,
                                    const DerivedParams<Scalar>& params) {
  const WellSolution<Scalar> w = well_bound_energy(u0, a);
  if (!w.bound) throw ConfigError("u0_mc2", "no bound state for a vanishing well argument");
  RealArray<Scalar> f = (-grid.z().abs() / (w.decay_length * params.lambda_c)).exp();
  f /= std::sqrt(f.square().sum() * grid.dz());
  return f;
}

/// Asymptotic center of mass for the unnormalized (1, i) packet of k-space
/// width sigma_k:
///   sqrt(pi) / (sigma_k cosh 2 beta) [1 - (pi m t)^(-1/2) cos(2 m t + pi/4)],
/// m = m* c*^2. Valid for t >> 1/m.
template <typename Scalar>
Scalar zitter_com(Scalar t, Scalar sigma_k, const DerivedParams<Scalar>& params) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar m = std::abs(params.rest_energy);
  const Scalar envelope = std::sqrt(pi) / (sigma_k * std::cosh(2 * params.beta));
  return envelope * (1 - std::cos(2 * m * t + pi / 4) / std::sqrt(pi * m * t));
}

/// Same trajectory for a unit-norm packet; the (1, i) spinor above carries
/// norm 2, so the moment per unit intensity is half as large.
template <typename Scalar>
Scalar zitter_com_normalized(Scalar t, Scalar sigma_k, const DerivedParams<Scalar>& params) {
  return zitter_com(t, sigma_k, params) / 2;
}

/// t -> infinity limit of zitter_com_normalized.
template <typename Scalar>
Scalar zitter_com_limit(Scalar sigma_k, const DerivedParams<Scalar>& params) {
  return std::sqrt(std::numbers::pi_v<Scalar>) / (2 * sigma_k * std::cosh(2 * params.beta));
}

}  // namespace sls
