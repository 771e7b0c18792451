#pragma once

// Full Maxwell-Bloch model in the linear-response limit, per grid point
//
//   d/dt sigma_gs   = -i delta(z) sigma_gs + i Omega (sigma_ge+ + sigma_ge-)
//   d/dt sigma_ge+- = -(gamma + i Delta) sigma_ge+- + i Omega sigma_gs + i g sqrt(n) eps+-
//   (d/dt +- c d/dz) eps+- = i g sqrt(n) sigma_ge+-
//
// integrated by Strang splitting: exact spectral advection of eps+- for dt/2,
// the exact exponential of the local 5x5 system for dt, advection for dt/2.
// Consecutive half advections are fused inside advance().

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sls/error.hpp"
#include "sls/grid.hpp"
#include "sls/params.hpp"
#include "sls/potentials.hpp"

namespace sls {

template <typename Scalar = double>
struct MBStepperConfig {
  Scalar dt{};
  Eigen::Index record_every{1};
  // Eliminate sigma_ge+- adiabatically (the shortened wave equations); off by default.
  bool adiabatic{false};
};

template <typename Scalar>
using Matrix5 = Eigen::Matrix<std::complex<Scalar>, 5, 5>;

/// 0.5 min(1/|Gamma|, dz/c).
template <typename Scalar>
Scalar mb_max_dt(const Grid<Scalar>& grid, const MediumConfig<Scalar>& medium) {
  const Scalar abs_gamma = std::hypot(medium.gamma, medium.delta);
  return Scalar(0.5) * std::min(1 / abs_gamma, grid.dz() / medium.c);
}

/// Generator of the local (non-advective) linear system at detuning delta.
template <typename Scalar>
Matrix5<Scalar> mb_local_generator(const MediumConfig<Scalar>& m, Scalar delta, bool adiabatic) {
  using C = std::complex<Scalar>;
  const C i(0, 1);
  const C big_gamma(m.gamma, m.delta);
  const Scalar gsn = std::sqrt(m.g2n);
  const Scalar w = m.omega;
  Matrix5<Scalar> a = Matrix5<Scalar>::Zero();
  enum { ep = 0, em, gs, gp, gm };
  if (!adiabatic) {
    a(ep, gp) = i * gsn;
    a(em, gm) = i * gsn;
    a(gs, gs) = -i * delta;
    a(gs, gp) = i * w;
    a(gs, gm) = i * w;
    a(gp, gp) = -big_gamma;
    a(gp, gs) = i * w;
    a(gp, ep) = i * gsn;
    a(gm, gm) = -big_gamma;
    a(gm, gs) = i * w;
    a(gm, em) = i * gsn;
  } else {
    // sigma_ge+- = i (Omega sigma_gs + g sqrt(n) eps+-) / Gamma
    a(ep, ep) = -m.g2n / big_gamma;
    a(ep, gs) = -gsn * w / big_gamma;
    a(em, em) = -m.g2n / big_gamma;
    a(em, gs) = -gsn * w / big_gamma;
    a(gs, gs) = -i * delta - 2 * w * w / big_gamma;
    a(gs, ep) = -w * gsn / big_gamma;
    a(gs, em) = -w * gsn / big_gamma;
  }
  return a;
}

template <typename Scalar = double>
class MBSolver {
 public:
  using State = MBState<Scalar>;
  using C = std::complex<Scalar>;

  MBSolver(const Grid<Scalar>& grid, const MediumConfig<Scalar>& medium,
           const PotentialProfile<Scalar>& potential, MBStepperConfig<Scalar> cfg)
      : medium_(medium), cfg_(cfg), spectral_(grid.n_points()), n_(grid.n_points()) {
    validate_medium(medium, true);
    if (!(cfg.dt > 0)) throw ConfigError("mb.dt", "must be positive");
    const Scalar bound = mb_max_dt(grid, medium);
    if (cfg.dt > bound * (1 + Scalar(1e-12)))
      throw ConfigError("mb.dt", "exceeds 0.5 min(1/|Gamma|, dz/c) = " + std::to_string(bound));
    if (cfg.record_every < 1) throw ConfigError("mb.record_every", "must be >= 1");
    if (potential.delta_samples.size() != 0 && potential.delta_samples.size() != n_)
      throw ConfigError("potential", "profile does not match the grid");

    half_plus_ = translation_multiplier(grid, medium.c * cfg.dt / 2);
    half_minus_ = half_plus_.conjugate();
    full_plus_ = half_plus_.square();
    full_minus_ = full_plus_.conjugate();
    build_segments(potential);
    work_.resize(n_, 5);
  }

  const MBStepperConfig<Scalar>& config() const { return cfg_; }
  Scalar dt() const { return cfg_.dt; }

  /// exp(dt A(delta)), cached per distinct detuning.
  const Matrix5<Scalar>& local_propagator(Scalar delta) {
    auto it = cache_.find(delta);
    if (it == cache_.end()) {
      const Matrix5<Scalar> gen = mb_local_generator(medium_, delta, cfg_.adiabatic);
      it = cache_.emplace(delta, Matrix5<Scalar>((gen * cfg_.dt).exp())).first;
    }
    return it->second;
  }

  void step(State& s) { advance(s, 1); }

  /// n Strang steps, with the inner half advections fused.
  void advance(State& s, Eigen::Index steps) {
    if (s.size() != n_) throw ConfigError("state", "does not match the grid");
    if (steps <= 0) return;
    advect(s, half_plus_, half_minus_);
    for (Eigen::Index j = 0; j < steps; ++j) {
      local(s);
      advect(s, j + 1 < steps ? full_plus_ : half_plus_, j + 1 < steps ? full_minus_ : half_minus_);
      s.t += cfg_.dt;
      if (++since_check_ >= kCheckEvery) {
        since_check_ = 0;
        check_finite(s);
      }
    }
  }

  void check_finite(const State& s) const {
    if (!s.fields.allFinite())
      throw NumericalAbort("Maxwell-Bloch integration produced non-finite values", double(s.t),
                           double(s.fields.array().abs().isFinite().select(
                                      s.fields.array().abs(), Scalar(0)).maxCoeff()));
  }

 private:
  static constexpr int kCheckEvery = 64;

  struct Segment {
    Eigen::Index begin, length;
    const Matrix5<Scalar>* propagator_t;  // transposed propagator
  };

  void build_segments(const PotentialProfile<Scalar>& potential) {
    const bool has = potential.delta_samples.size() == n_;
    auto delta_at = [&](Eigen::Index j) { return has ? potential.delta_samples[j] : Scalar(0); };
    for (Eigen::Index j = 0; j < n_;) {
      const Scalar d = delta_at(j);
      Eigen::Index e = j + 1;
      while (e < n_ && delta_at(e) == d) ++e;
      auto it = transposed_.find(d);
      if (it == transposed_.end())
        it = transposed_.emplace(d, Matrix5<Scalar>(local_propagator(d).transpose())).first;
      // Chunk long segments so the local update can run data-parallel.
      for (Eigen::Index b = j; b < e; b += kChunk)
        segments_.push_back({b, std::min(kChunk, e - b), &it->second});
      j = e;
    }
  }

  void local(State& s) {
    const auto count = static_cast<std::ptrdiff_t>(segments_.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t q = 0; q < count; ++q) {
      const Segment& seg = segments_[q];
      work_.middleRows(seg.begin, seg.length).noalias() =
          s.fields.middleRows(seg.begin, seg.length) * (*seg.propagator_t);
    }
    s.fields.swap(work_);
    if (cfg_.adiabatic) {
      const C i(0, 1);
      const C big_gamma(medium_.gamma, medium_.delta);
      const Scalar gsn = std::sqrt(medium_.g2n);
      s.fields.col(State::sigma_gep) =
          i * (medium_.omega * s.fields.col(State::sigma_gs) + gsn * s.fields.col(State::eps_plus)) /
          big_gamma;
      s.fields.col(State::sigma_gem) =
          i * (medium_.omega * s.fields.col(State::sigma_gs) + gsn * s.fields.col(State::eps_minus)) /
          big_gamma;
    }
  }

  void advect(State& s, const ComplexArray<Scalar>& plus, const ComplexArray<Scalar>& minus) {
    spectral_.apply_multiplier(s.fields.col(State::eps_plus).data(), plus);
    spectral_.apply_multiplier(s.fields.col(State::eps_minus).data(), minus);
  }

  static constexpr Eigen::Index kChunk = 2048;

  MediumConfig<Scalar> medium_;
  MBStepperConfig<Scalar> cfg_;
  Spectral<Scalar> spectral_;
  Eigen::Index n_;
  ComplexArray<Scalar> half_plus_, half_minus_, full_plus_, full_minus_;
  std::map<Scalar, Matrix5<Scalar>> cache_;
  std::map<Scalar, Matrix5<Scalar>> transposed_;
  std::vector<Segment> segments_;
  typename State::Fields work_;
  int since_check_{0};
};

/// One Strang step. Builds a solver each call; use MBSolver for loops.
template <typename Scalar>
MBState<Scalar> mb_step(MBState<Scalar> state, const MBStepperConfig<Scalar>& cfg,
                        const Grid<Scalar>& grid, const MediumConfig<Scalar>& medium,
                        const PotentialProfile<Scalar>& potential) {
  MBSolver<Scalar> solver(grid, medium, potential, cfg);
  solver.step(state);
  solver.check_finite(state);
  return state;
}

/// Number of steps of size dt in t_final; t_final must be an integer multiple of dt.
template <typename Scalar>
Eigen::Index steps_for(Scalar t_final, Scalar dt, const char* field) {
  if (!(t_final >= 0)) throw ConfigError("t_final", "must be non-negative");
  const Scalar ratio = t_final / dt;
  const auto n = static_cast<Eigen::Index>(std::llround(ratio));
  if (std::abs(ratio - Scalar(n)) > Scalar(1e-6) * std::max<Scalar>(1, ratio))
    throw ConfigError(field, "t_final is not an integer multiple of dt");
  return n;
}

/// Advances n steps in blocks of `record_every`, calling observer(state)
/// before the first step, after every block and after the last step.
template <typename Solver, typename State, typename Observer>
void run_recorded(Solver& solver, State& state, Eigen::Index steps, Eigen::Index record_every,
                  Observer&& observer) {
  observer(static_cast<const State&>(state));
  Eigen::Index done = 0;
  while (done < steps) {
    const Eigen::Index block = std::min(record_every, steps - done);
    solver.advance(state, block);
    done += block;
    observer(static_cast<const State&>(state));
  }
}

template <typename Scalar, typename Observer>
MBState<Scalar> mb_run(MBState<Scalar> initial, Scalar t_final, const MBStepperConfig<Scalar>& cfg,
                       const Grid<Scalar>& grid, const MediumConfig<Scalar>& medium,
                       const PotentialProfile<Scalar>& potential, Observer&& observer) {
  const Eigen::Index steps = steps_for(t_final, cfg.dt, "mb.dt");
  MBSolver<Scalar> solver(grid, medium, potential, cfg);
  run_recorded(solver, initial, steps, cfg.record_every, observer);
  solver.check_finite(initial);
  return initial;
}

/// (eps+, eps-) mapped by exp(beta sigma_x), tagged transformed.
template <typename Scalar>
SpinorState<Scalar> mb_project_spinor(const MBState<Scalar>& state,
                                      const DerivedParams<Scalar>& params) {
  SpinorState<Scalar> bare;
  bare.t = state.t;
  bare.basis = Basis::bare;
  bare.comps.resize(state.size(), 2);
  bare.comps.col(0) = state.col(MBState<Scalar>::eps_plus);
  bare.comps.col(1) = state.col(MBState<Scalar>::eps_minus);
  return transform_basis(bare, params, Direction::to_transformed);
}

}  // namespace sls
