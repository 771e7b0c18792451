#pragma once

// Complex-mass Schroedinger equation for the sum mode,
//
//   i d/dt E_S = -(1 / 2 m*) (1 - i gamma/Delta) d^2/dz^2 E_S + U(z) E_S.
//
// The imaginary part of the mass is written with the sign that makes it a
// loss for Gamma = gamma + i Delta. Strang splitting: potential half phase,
// exact spectral kinetic step, potential half phase.

#include <Eigen/Dense>

#include <cmath>
#include <complex>

#include "sls/error.hpp"
#include "sls/grid.hpp"
#include "sls/mb_solver.hpp"
#include "sls/params.hpp"
#include "sls/potentials.hpp"

namespace sls {

template <typename Scalar = double>
struct SchrodingerConfig {
  Scalar dt{};
  bool include_damping{false};
  Eigen::Index record_every{1};
};

template <typename Scalar = double>
class SchrodingerSolver {
 public:
  using State = SumModeState<Scalar>;
  using C = std::complex<Scalar>;

  SchrodingerSolver(const Grid<Scalar>& grid, const DerivedParams<Scalar>& params,
                    const PotentialProfile<Scalar>& potential, SchrodingerConfig<Scalar> cfg)
      : cfg_(cfg), spectral_(grid.n_points()), n_(grid.n_points()) {
    if (!(cfg.dt > 0)) throw ConfigError("schrodinger.dt", "must be positive");
    if (cfg.record_every < 1) throw ConfigError("schrodinger.record_every", "must be >= 1");
    if (potential.samples.size() != 0 && potential.samples.size() != n_)
      throw ConfigError("potential", "profile does not match the grid");
    const C i(0, 1);
    const C factor(1, cfg.include_damping ? -params.gamma_over_delta : Scalar(0));
    const ComplexArray<Scalar> kinetic_energy =
        (grid.k().square() / (2 * params.m_star)).template cast<C>() * factor;
    kinetic_ = (-i * cfg.dt * kinetic_energy).exp();
    has_potential_ = potential.samples.size() == n_ && !potential.is_zero();
    if (has_potential_)
      half_phase_ = (-i * (potential.samples * (cfg.dt / 2)).template cast<C>()).exp();
  }

  Scalar dt() const { return cfg_.dt; }

  void step(State& s) { advance(s, 1); }

  void advance(State& s, Eigen::Index steps) {
    if (s.size() != n_) throw ConfigError("state", "does not match the grid");
    for (Eigen::Index j = 0; j < steps; ++j) {
      if (has_potential_) s.field *= half_phase_;
      spectral_.apply_multiplier(s.field.data(), kinetic_);
      if (has_potential_) s.field *= half_phase_;
      s.t += cfg_.dt;
      if (++since_check_ >= 64) {
        since_check_ = 0;
        check_finite(s);
      }
    }
  }

  void check_finite(const State& s) const {
    if (!s.field.allFinite())
      throw NumericalAbort("Schroedinger integration produced non-finite values", double(s.t),
                           double(s.field.abs().isFinite().select(s.field.abs(), Scalar(0)).maxCoeff()));
  }

 private:
  SchrodingerConfig<Scalar> cfg_;
  Spectral<Scalar> spectral_;
  Eigen::Index n_;
  ComplexArray<Scalar> kinetic_;
  ComplexArray<Scalar> half_phase_;
  bool has_potential_{false};
  int since_check_{0};
};

template <typename Scalar>
SumModeState<Scalar> schrodinger_step(SumModeState<Scalar> state,
                                      const SchrodingerConfig<Scalar>& cfg,
                                      const Grid<Scalar>& grid,
                                      const DerivedParams<Scalar>& params,
                                      const PotentialProfile<Scalar>& potential) {
  SchrodingerSolver<Scalar> solver(grid, params, potential, cfg);
  solver.step(state);
  solver.check_finite(state);
  return state;
}

template <typename Scalar, typename Observer>
SumModeState<Scalar> schrodinger_run(SumModeState<Scalar> initial, Scalar t_final,
                                     const SchrodingerConfig<Scalar>& cfg, const Grid<Scalar>& grid,
                                     const DerivedParams<Scalar>& params,
                                     const PotentialProfile<Scalar>& potential,
                                     Observer&& observer) {
  const Eigen::Index steps = steps_for(t_final, cfg.dt, "schrodinger.dt");
  SchrodingerSolver<Scalar> solver(grid, params, potential, cfg);
  run_recorded(solver, initial, steps, cfg.record_every, observer);
  solver.check_finite(initial);
  return initial;
}

}  // namespace sls
