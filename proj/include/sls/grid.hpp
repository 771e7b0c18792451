#pragma once

// Uniform periodic grid, field containers and the spectral workspace shared
// by all solvers.

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "sls/error.hpp"
#include "sls/params.hpp"

namespace sls {

template <typename Scalar>
using RealArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using ComplexArray = Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1>;

inline bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

/// z_j = (j - n/2) dz, j = 0..n-1; wavenumbers in FFT ordering.
template <typename Scalar = double>
class Grid {
 public:
  static constexpr Eigen::Index kMinPoints = 64;

  Grid(Eigen::Index n_points, Scalar length) : n_(n_points), length_(length) {
    if (n_points < kMinPoints || !is_power_of_two(n_points))
      throw ConfigError("grid.n_points", "must be a power of two >= 64");
    if (!(length > 0)) throw ConfigError("grid.length", "must be positive");
    dz_ = length / Scalar(n_points);
    z_.resize(n_);
    k_.resize(n_);
    const Scalar dk = 2 * std::numbers::pi_v<Scalar> / length;
    for (Eigen::Index j = 0; j < n_; ++j) {
      z_[j] = Scalar(j - n_ / 2) * dz_;
      k_[j] = Scalar(j < n_ / 2 ? j : j - n_) * dk;
    }
  }

  Eigen::Index n_points() const { return n_; }
  Scalar length() const { return length_; }
  Scalar dz() const { return dz_; }
  Scalar z_min() const { return z_[0]; }
  Scalar z_max() const { return z_[n_ - 1]; }
  const RealArray<Scalar>& z() const { return z_; }
  const RealArray<Scalar>& k() const { return k_; }
  bool contains(Scalar z) const { return z >= -length_ / 2 && z < length_ / 2; }

 private:
  Eigen::Index n_;
  Scalar length_;
  Scalar dz_{};
  RealArray<Scalar> z_;
  RealArray<Scalar> k_;
};

/// FFT workspace. Not thread-safe; each solver owns one.
template <typename Scalar = double>
class Spectral {
 public:
  explicit Spectral(Eigen::Index n) : n_(n), scratch_(n) {}

  Eigen::Index size() const { return n_; }

  void forward(const std::complex<Scalar>* src, std::complex<Scalar>* dst) {
    fft_.fwd(dst, src, n_);
  }
  void inverse(const std::complex<Scalar>* src, std::complex<Scalar>* dst) {
    fft_.inv(dst, src, n_);
  }

  /// field <- IFFT(multiplier * FFT(field)), in place on contiguous storage.
  void apply_multiplier(std::complex<Scalar>* field, const ComplexArray<Scalar>& multiplier) {
    fft_.fwd(scratch_.data(), field, n_);
    scratch_ *= multiplier;
    fft_.inv(field, scratch_.data(), n_);
  }

 private:
  Eigen::Index n_;
  Eigen::FFT<Scalar> fft_;
  ComplexArray<Scalar> scratch_;
};

/// exp(-i k d): translates a periodic field by +d.
template <typename Scalar>
ComplexArray<Scalar> translation_multiplier(const Grid<Scalar>& grid, Scalar distance) {
  const std::complex<Scalar> i(0, 1);
  ComplexArray<Scalar> m = (-i * (grid.k() * distance).template cast<std::complex<Scalar>>()).exp();
  // The Nyquist mode is its own mirror image; giving it zero speed keeps the
  // step unitary and symmetric under z -> -z.
  m[grid.n_points() / 2] = 1;
  return m;
}

enum class Basis { bare, transformed };

/// Fields of the full model; columns are (eps+, eps-, sigma_gs, sigma_ge+, sigma_ge-).
template <typename Scalar = double>
struct MBState {
  using Fields = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 5>;
  enum Component : int { eps_plus = 0, eps_minus, sigma_gs, sigma_gep, sigma_gem };

  Fields fields;
  Scalar t{};

  MBState() = default;
  explicit MBState(Eigen::Index n) : fields(Fields::Zero(n, 5)) {}

  Eigen::Index size() const { return fields.rows(); }
  auto col(Component c) { return fields.col(c); }
  auto col(Component c) const { return fields.col(c); }

  /// |eps+|^2 + |eps-|^2
  RealArray<Scalar> intensity() const {
    return fields.col(eps_plus).array().abs2() + fields.col(eps_minus).array().abs2();
  }
  /// Sum of all five |.|^2 times dz.
  Scalar total_excitation(Scalar dz) const { return fields.array().abs2().sum() * dz; }
};

/// Two-component field of the Dirac description, in either basis.
template <typename Scalar = double>
struct SpinorState {
  using Components = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 2>;
  Components comps;
  Scalar t{};
  Basis basis{Basis::bare};

  Eigen::Index size() const { return comps.rows(); }
  RealArray<Scalar> intensity() const { return comps.array().abs2().rowwise().sum(); }
  Scalar norm(Scalar dz) const { return comps.array().abs2().sum() * dz; }
};

/// Single-component sum mode (eps+ + eps-)/sqrt(2) of the Schroedinger description.
template <typename Scalar = double>
struct SumModeState {
  ComplexArray<Scalar> field;
  Scalar t{};

  Eigen::Index size() const { return field.size(); }
  RealArray<Scalar> intensity() const { return field.abs2(); }
  Scalar norm(Scalar dz) const { return field.abs2().sum() * dz; }
};

enum class Direction { to_transformed, to_bare };

/// Applies exp(+beta sigma_x) (to_transformed) or exp(-beta sigma_x) (to_bare).
template <typename Scalar>
SpinorState<Scalar> transform_basis(const SpinorState<Scalar>& state,
                                    const DerivedParams<Scalar>& params, Direction direction) {
  const Basis source = direction == Direction::to_transformed ? Basis::bare : Basis::transformed;
  if (state.basis != source)
    throw ConfigError("basis", direction == Direction::to_transformed
                                   ? "state is already in the transformed basis"
                                   : "state is already in the bare basis");
  const Scalar b = direction == Direction::to_transformed ? params.beta : -params.beta;
  Eigen::Matrix<std::complex<Scalar>, 2, 2> m;
  m << std::cosh(b), std::sinh(b), std::sinh(b), std::cosh(b);
  SpinorState<Scalar> out;
  out.t = state.t;
  out.basis = direction == Direction::to_transformed ? Basis::transformed : Basis::bare;
  out.comps.noalias() = state.comps * m.transpose();
  return out;
}

enum class RelativePhase { zero, half_pi };

template <typename Scalar>
struct InitialStates {
  MBState<Scalar> mb;
  SpinorState<Scalar> spinor;  // transformed basis, unit norm
  SumModeState<Scalar> sum_mode;
};

/// Gaussian stationary pulse exp(-(z - center)^2 / (2 width^2)) on the dark state.
///
/// Phase zero gives eps+ = eps-; half_pi gives eps- = i eps+, the state right
/// after a pi/2 flip of the relative control phase. In both cases
/// sigma_gs = -(g sqrt(n) / Omega_pm) eps+ and sigma_ge = 0. Field intensity,
/// spinor and sum mode are each normalized to unit norm.
template <typename Scalar>
InitialStates<Scalar> make_gaussian_stationary(const Grid<Scalar>& grid,
                                               const MediumConfig<Scalar>& medium,
                                               const DerivedParams<Scalar>& params, Scalar width,
                                               Scalar center, RelativePhase phase) {
  if (!(width > 4 * grid.dz()))
    throw ConfigError("initial.width", "pulse is not resolved (needs width > 4 dz)");
  if (!grid.contains(center)) throw ConfigError("initial.center", "outside the domain");

  using C = std::complex<Scalar>;
  const Eigen::Index n = grid.n_points();
  const Scalar dz = grid.dz();
  const RealArray<Scalar> x = (grid.z() - center) / width;
  const ComplexArray<Scalar> g = (-x.square() / 2).exp().template cast<C>();
  const C second = phase == RelativePhase::zero ? C(1) : C(0, 1);

  InitialStates<Scalar> out;
  out.mb = MBState<Scalar>(n);
  out.mb.col(MBState<Scalar>::eps_plus) = g.matrix();
  out.mb.col(MBState<Scalar>::eps_minus) = (second * g).matrix();
  const Scalar field_norm = std::sqrt(out.mb.intensity().sum() * dz);
  out.mb.col(MBState<Scalar>::eps_plus) /= field_norm;
  out.mb.col(MBState<Scalar>::eps_minus) /= field_norm;
  out.mb.col(MBState<Scalar>::sigma_gs) =
      -(std::sqrt(medium.g2n) / medium.omega) * out.mb.col(MBState<Scalar>::eps_plus);

  SpinorState<Scalar> bare;
  bare.basis = Basis::bare;
  bare.comps.resize(n, 2);
  bare.comps.col(0) = out.mb.col(MBState<Scalar>::eps_plus);
  bare.comps.col(1) = out.mb.col(MBState<Scalar>::eps_minus);
  out.spinor = transform_basis(bare, params, Direction::to_transformed);
  out.spinor.comps /= std::sqrt(out.spinor.norm(dz));

  out.sum_mode.field = (bare.comps.col(0) + bare.comps.col(1)).array() / std::sqrt(Scalar(2));
  out.sum_mode.field /= std::sqrt(out.sum_mode.norm(dz));
  return out;
}

}  // namespace sls
