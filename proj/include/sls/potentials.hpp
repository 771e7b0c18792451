#pragma once

// Potential profiles U(z) for the effective descriptions and the
// two-photon-detuning profiles delta(z) that realize them in the full model.

#include <algorithm>
#include <cmath>
#include <limits>

#include "sls/grid.hpp"
#include "sls/params.hpp"

namespace sls {

enum class PotentialKind { none, square_well, custom_samples };

/// How a polariton potential U is converted into a two-photon detuning.
///
///   unit       delta = U.
///   linear     delta = U / sin^2(theta); the small-U shift of the dark
///              polariton is sin^2(theta) * delta.
///   polariton  delta chosen so that the k = 0 sum-mode eigenvalue of the local
///              Maxwell-Bloch system (gamma neglected) is exactly U:
///              delta = U + 2 Omega_pm^2 / (Delta - U + g^2 n / U).
enum class DetuningMapping { unit, linear, polariton };

template <typename Scalar>
Scalar detuning_for_potential(Scalar u, const MediumConfig<Scalar>& medium,
                              const DerivedParams<Scalar>& params, DetuningMapping mapping) {
  if (u == 0) return 0;
  switch (mapping) {
    case DetuningMapping::unit:
      return u;
    case DetuningMapping::linear:
      return u / (1 - params.cos2_theta);
    case DetuningMapping::polariton: {
      const Scalar denom = medium.delta - u + medium.g2n / u;
      const Scalar scale = std::abs(medium.delta) + std::abs(medium.g2n / u);
      if (std::abs(denom) < 1e-9 * scale)
        throw ConfigError("potential.u0_mc2",
                          "depth coincides with the bright-state resonance; no finite detuning");
      return u + 2 * medium.omega * medium.omega / denom;
    }
  }
  return u;
}

template <typename Scalar = double>
struct PotentialProfile {
  PotentialKind kind{PotentialKind::none};
  Scalar u0{};          // depth in units of m* c*^2
  Scalar half_width{};  // a in units of lambda_C
  Scalar half_width_length{};  // a lambda_C in grid length units (L_abs)
  RealArray<Scalar> samples;        // U(z)
  RealArray<Scalar> delta_samples;  // two-photon detuning delta(z)
  DetuningMapping mapping{DetuningMapping::unit};

  Scalar klein_parameter() const { return u0; }
  /// (U0 / m* c*^2) (a / lambda_C)
  Scalar well_argument() const { return u0 * half_width; }
  Scalar max_abs() const { return samples.size() ? samples.abs().maxCoeff() : Scalar(0); }
  bool is_zero() const { return samples.size() == 0 || max_abs() == 0; }
};

/// Fills delta_samples from samples with the given mapping.
template <typename Scalar>
void assign_detuning(PotentialProfile<Scalar>& profile, const MediumConfig<Scalar>& medium,
                     const DerivedParams<Scalar>& params, DetuningMapping mapping) {
  profile.mapping = mapping;
  profile.delta_samples.resize(profile.samples.size());
  // Square wells have two distinct values; avoid re-evaluating the mapping per point.
  Scalar last_u = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar last_delta = 0;
  for (Eigen::Index j = 0; j < profile.samples.size(); ++j) {
    const Scalar u = profile.samples[j];
    if (u != last_u) {
      last_u = u;
      last_delta = detuning_for_potential(u, medium, params, mapping);
    }
    profile.delta_samples[j] = last_delta;
  }
}

template <typename Scalar>
PotentialProfile<Scalar> free_potential(const Grid<Scalar>& grid) {
  PotentialProfile<Scalar> p;
  p.samples = RealArray<Scalar>::Zero(grid.n_points());
  p.delta_samples = RealArray<Scalar>::Zero(grid.n_points());
  return p;
}

/// U(z) = -u0 m* c*^2 for |z| <= a lambda_C, else 0 (membership by cell center).
/// smooth_cells > 0 replaces the sharp edges by a tanh of that many cells.
template <typename Scalar>
PotentialProfile<Scalar> square_well(const Grid<Scalar>& grid, Scalar u0, Scalar a,
                                     const DerivedParams<Scalar>& params,
                                     Scalar smooth_cells = 0) {
  if (!(u0 >= 0)) throw ConfigError("potential.u0_mc2", "must be non-negative");
  if (!(a > 0)) throw ConfigError("potential.a_lambda_c", "must be positive");
  if (!(smooth_cells >= 0)) throw ConfigError("potential.smooth_cells", "must be non-negative");
  const Scalar half = a * params.lambda_c;
  if (!(half < grid.length() / 2))
    throw ConfigError("potential.a_lambda_c", "well is wider than half the domain");

  PotentialProfile<Scalar> p;
  p.kind = PotentialKind::square_well;
  p.u0 = u0;
  p.half_width = a;
  p.half_width_length = half;
  const Scalar depth = u0 * std::abs(params.rest_energy);
  const RealArray<Scalar> r = grid.z().abs();
  if (smooth_cells == 0) {
    p.samples = (r <= half).select(RealArray<Scalar>::Constant(r.size(), -depth),
                                   RealArray<Scalar>::Zero(r.size()));
  } else {
    const Scalar w = smooth_cells * grid.dz();
    p.samples = -depth * (((half - r) / w).tanh() + 1) / 2;
  }
  p.delta_samples = p.samples;
  return p;
}

template <typename Scalar>
PotentialProfile<Scalar> custom_potential(const Grid<Scalar>& grid, RealArray<Scalar> samples) {
  if (samples.size() != grid.n_points())
    throw ConfigError("potential.samples", "length does not match the grid");
  PotentialProfile<Scalar> p;
  p.kind = PotentialKind::custom_samples;
  p.samples = std::move(samples);
  p.delta_samples = p.samples;
  return p;
}

}  // namespace sls
