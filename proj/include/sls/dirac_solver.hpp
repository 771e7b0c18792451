#pragma once

// Two-component massive Dirac equation in the transformed basis,
//
//   i d/dt psi = ( -i c* sigma_z d/dz + m* c*^2 sigma_x + U(z) ) psi,
//
// by Strang splitting: kinetic half step (diagonal in k), exact 2x2 local
// step, kinetic half step. With damping enabled the mass term carries the
// finite-detuning correction m* c*^2 (1 + i gamma/Delta) (sigma_x - 1), of
// which only the real constant is dropped as a gauge.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>

#include "sls/error.hpp"
#include "sls/grid.hpp"
#include "sls/mb_solver.hpp"
#include "sls/params.hpp"
#include "sls/potentials.hpp"

namespace sls {

template <typename Scalar = double>
struct DiracStepperConfig {
  Scalar dt{};
  Eigen::Index record_every{1};
  bool damping{false};
};

/// 0.1 / max(|m* c*^2|, max|U|); infinite when both vanish.
template <typename Scalar>
Scalar dirac_max_dt(const DerivedParams<Scalar>& params, const PotentialProfile<Scalar>& potential) {
  const Scalar rate = std::max(std::abs(params.rest_energy), potential.max_abs());
  return rate > 0 ? Scalar(0.1) / rate : std::numeric_limits<Scalar>::infinity();
}

/// (+E, -E) with E = sqrt((c* k)^2 + (m* c*^2)^2).
template <typename Scalar>
std::pair<Scalar, Scalar> dirac_dispersion(Scalar k, const DerivedParams<Scalar>& params) {
  const Scalar e = std::hypot(params.c_star * k, params.rest_energy);
  return {e, -e};
}

template <typename Scalar = double>
class DiracSolver {
 public:
  using State = SpinorState<Scalar>;
  using C = std::complex<Scalar>;

  DiracSolver(const Grid<Scalar>& grid, const DerivedParams<Scalar>& params,
              const PotentialProfile<Scalar>& potential, DiracStepperConfig<Scalar> cfg)
      : cfg_(cfg), spectral_(grid.n_points()), n_(grid.n_points()) {
    if (!(cfg.dt > 0)) throw ConfigError("dirac.dt", "must be positive");
    const Scalar bound = dirac_max_dt(params, potential);
    if (cfg.dt > bound * (1 + Scalar(1e-12)))
      throw ConfigError("dirac.dt", "exceeds 0.1 / max(m* c*^2, max|U|) = " + std::to_string(bound));
    if (cfg.record_every < 1) throw ConfigError("dirac.record_every", "must be >= 1");
    if (potential.samples.size() != 0 && potential.samples.size() != n_)
      throw ConfigError("potential", "profile does not match the grid");

    half_plus_ = translation_multiplier(grid, params.c_star * cfg.dt / 2);
    half_minus_ = half_plus_.conjugate();
    full_plus_ = half_plus_.square();
    full_minus_ = full_plus_.conjugate();

    const C i(0, 1);
    const Scalar m = params.rest_energy;
    const Scalar g = cfg.damping ? params.gamma_over_delta : Scalar(0);
    const C mu = m * C(1, g) * cfg.dt;
    const C diag = std::cos(mu) * std::exp(-m * g * cfg.dt);
    const C off = -i * std::sin(mu) * std::exp(-m * g * cfg.dt);
    const ComplexArray<Scalar> phase =
        potential.samples.size() == n_
            ? ComplexArray<Scalar>((-i * (potential.samples * cfg.dt).template cast<C>()).exp())
            : ComplexArray<Scalar>::Ones(n_);
    diag_ = phase * diag;
    off_ = phase * off;
  }

  Scalar dt() const { return cfg_.dt; }

  void step(State& s) { advance(s, 1); }

  void advance(State& s, Eigen::Index steps) {
    if (s.basis != Basis::transformed)
      throw ConfigError("basis", "Dirac evolution requires the transformed basis");
    if (s.size() != n_) throw ConfigError("state", "does not match the grid");
    if (steps <= 0) return;
    kinetic(s, half_plus_, half_minus_);
    for (Eigen::Index j = 0; j < steps; ++j) {
      local(s);
      kinetic(s, j + 1 < steps ? full_plus_ : half_plus_, j + 1 < steps ? full_minus_ : half_minus_);
      s.t += cfg_.dt;
      if (++since_check_ >= 64) {
        since_check_ = 0;
        check_finite(s);
      }
    }
  }

  void check_finite(const State& s) const {
    if (!s.comps.allFinite())
      throw NumericalAbort("Dirac integration produced non-finite values", double(s.t),
                           double(s.comps.array().abs().isFinite().select(
                                      s.comps.array().abs(), Scalar(0)).maxCoeff()));
  }

 private:
  void local(State& s) {
    auto p = s.comps.col(0).array();
    auto q = s.comps.col(1).array();
    tmp_ = diag_ * p + off_ * q;
    q = off_ * p + diag_ * q;
    p = tmp_;
  }

  void kinetic(State& s, const ComplexArray<Scalar>& plus, const ComplexArray<Scalar>& minus) {
    spectral_.apply_multiplier(s.comps.col(0).data(), plus);
    spectral_.apply_multiplier(s.comps.col(1).data(), minus);
  }

  DiracStepperConfig<Scalar> cfg_;
  Spectral<Scalar> spectral_;
  Eigen::Index n_;
  ComplexArray<Scalar> half_plus_, half_minus_, full_plus_, full_minus_;
  ComplexArray<Scalar> diag_, off_, tmp_;
  int since_check_{0};
};

template <typename Scalar>
SpinorState<Scalar> dirac_step(SpinorState<Scalar> state, const DiracStepperConfig<Scalar>& cfg,
                               const Grid<Scalar>& grid, const DerivedParams<Scalar>& params,
                               const PotentialProfile<Scalar>& potential) {
  DiracSolver<Scalar> solver(grid, params, potential, cfg);
  solver.step(state);
  solver.check_finite(state);
  return state;
}

template <typename Scalar, typename Observer>
SpinorState<Scalar> dirac_run(SpinorState<Scalar> initial, Scalar t_final,
                              const DiracStepperConfig<Scalar>& cfg, const Grid<Scalar>& grid,
                              const DerivedParams<Scalar>& params,
                              const PotentialProfile<Scalar>& potential, Observer&& observer) {
  const Eigen::Index steps = steps_for(t_final, cfg.dt, "dirac.dt");
  DiracSolver<Scalar> solver(grid, params, potential, cfg);
  run_recorded(solver, initial, steps, cfg.record_every, observer);
  solver.check_finite(initial);
  return initial;
}

}  // namespace sls
