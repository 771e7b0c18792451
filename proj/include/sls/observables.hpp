#pragma once

// Moments of the field intensity and the derived diagnostics: lobe tracking,
// in-well norm, the spectrum of the center of mass and fitted rates.

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "sls/error.hpp"
#include "sls/grid.hpp"
#include "sls/params.hpp"
#include "sls/potentials.hpp"

namespace sls {

template <typename Scalar = double>
struct ObservableRecord {
  Scalar t{};
  Scalar norm{};
  Scalar com{};
  Scalar width{};
  Scalar com_left{};
  Scalar com_right{};
  Scalar peak_left{};   // intensity maximum over z < 0
  Scalar peak_right{};  // intensity maximum over z > 0
  Scalar lobe_contrast{};  // 1 - I(0) / max_{z>0} I; near 1 once the lobes have split
  Scalar norm_in_well{std::numeric_limits<Scalar>::quiet_NaN()};  // NaN without a well
  bool valid{false};
};

template <typename Scalar = double>
struct ObservableSeries {
  std::vector<ObservableRecord<Scalar>> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  void push_back(const ObservableRecord<Scalar>& r) { records.push_back(r); }
  const ObservableRecord<Scalar>& operator[](std::size_t i) const { return records[i]; }
  const ObservableRecord<Scalar>& back() const { return records.back(); }

  template <typename F>
  std::vector<Scalar> column(F&& f) const {
    std::vector<Scalar> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(f(r));
    return out;
  }
  std::vector<Scalar> times() const {
    return column([](const auto& r) { return r.t; });
  }
};

namespace detail {

// Sub-cell location of the maximum of intensity[begin, end).
template <typename Scalar>
Scalar peak_position(const RealArray<Scalar>& intensity, const Grid<Scalar>& grid,
                     Eigen::Index begin, Eigen::Index end) {
  Eigen::Index best = begin;
  for (Eigen::Index j = begin; j < end; ++j)
    if (intensity[j] > intensity[best]) best = j;
  Scalar z = grid.z()[best];
  if (best > 0 && best + 1 < intensity.size()) {
    const Scalar a = intensity[best - 1], b = intensity[best], c = intensity[best + 1];
    const Scalar d = a - 2 * b + c;
    if (d < 0) z += grid.dz() * std::clamp<Scalar>((a - c) / (2 * d), -0.5, 0.5);
  }
  return z;
}

}  // namespace detail

/// Moments of a sampled intensity (midpoint sums). The record is flagged
/// invalid when the total intensity vanishes.
template <typename Scalar>
ObservableRecord<Scalar> measure_intensity(const RealArray<Scalar>& intensity, Scalar t,
                                           const Grid<Scalar>& grid,
                                           const PotentialProfile<Scalar>* potential = nullptr) {
  if (intensity.size() != grid.n_points())
    throw ConfigError("state", "does not match the grid");
  ObservableRecord<Scalar> r;
  r.t = t;
  const Scalar dz = grid.dz();
  const RealArray<Scalar>& z = grid.z();
  const Eigen::Index n = grid.n_points();
  const Eigen::Index mid = n / 2;  // z[mid] == 0

  const Scalar total = intensity.sum();
  r.norm = total * dz;
  if (potential != nullptr && potential->kind == PotentialKind::square_well) {
    const Scalar h = potential->half_width_length;
    r.norm_in_well = (z.abs() <= h).select(intensity, Scalar(0)).sum() * dz;
  }
  if (!(total > 0) || !std::isfinite(total)) {
    r.valid = false;
    return r;
  }
  r.valid = true;
  r.com = (z * intensity).sum() / total;
  r.width = std::sqrt(((z - r.com).square() * intensity).sum() / total);

  // Half domains z < 0 and z > 0; the z = 0 sample is shared equally.
  const Scalar c0 = intensity[mid] / 2;
  const Scalar left = intensity.head(mid).sum() + c0;
  const Scalar right = intensity.tail(n - mid - 1).sum() + c0;
  r.com_left = left > 0 ? (z.head(mid) * intensity.head(mid)).sum() / left : Scalar(0);
  r.com_right = right > 0 ? (z.tail(n - mid - 1) * intensity.tail(n - mid - 1)).sum() / right
                          : Scalar(0);
  r.peak_left = detail::peak_position(intensity, grid, 0, mid);
  r.peak_right = detail::peak_position(intensity, grid, mid + 1, n);
  const Scalar right_max = intensity.tail(n - mid - 1).maxCoeff();
  r.lobe_contrast = right_max > 0 ? 1 - intensity[mid] / right_max : Scalar(0);
  return r;
}

template <typename Scalar>
ObservableRecord<Scalar> measure(const MBState<Scalar>& s, const Grid<Scalar>& grid,
                                 const PotentialProfile<Scalar>* potential = nullptr) {
  return measure_intensity<Scalar>(s.intensity(), s.t, grid, potential);
}

/// Spinors are measured in the bare basis.
template <typename Scalar>
ObservableRecord<Scalar> measure(const SpinorState<Scalar>& s, const Grid<Scalar>& grid,
                                 const DerivedParams<Scalar>& params,
                                 const PotentialProfile<Scalar>* potential = nullptr) {
  if (s.basis == Basis::bare) return measure_intensity<Scalar>(s.intensity(), s.t, grid, potential);
  return measure_intensity<Scalar>(transform_basis(s, params, Direction::to_bare).intensity(), s.t,
                                   grid, potential);
}

template <typename Scalar>
ObservableRecord<Scalar> measure(const SumModeState<Scalar>& s, const Grid<Scalar>& grid,
                                 const PotentialProfile<Scalar>* potential = nullptr) {
  return measure_intensity<Scalar>(s.intensity(), s.t, grid, potential);
}

/// Bare-basis intensity of a spinor in either basis.
template <typename Scalar>
RealArray<Scalar> bare_intensity(const SpinorState<Scalar>& s, const DerivedParams<Scalar>& params) {
  return s.basis == Basis::bare ? s.intensity()
                                : transform_basis(s, params, Direction::to_bare).intensity();
}

/// || a/sum(a) - b/sum(b) ||_2 / || b/sum(b) ||_2
template <typename Scalar>
Scalar normalized_l2_difference(const RealArray<Scalar>& a, const RealArray<Scalar>& b) {
  if (a.size() != b.size()) throw ConfigError("intensity", "length mismatch");
  const Scalar sa = a.sum(), sb = b.sum();
  if (!(sa > 0) || !(sb > 0)) return std::numeric_limits<Scalar>::quiet_NaN();
  const RealArray<Scalar> na = a / sa, nb = b / sb;
  return std::sqrt((na - nb).square().sum() / nb.square().sum());
}

enum class Window { none, hann };
enum class SpectrumSignal { com, com_right };

template <typename Scalar = double>
struct Spectrum {
  std::vector<Scalar> omega;      // angular frequency of each bin
  std::vector<Scalar> magnitude;  // |DFT| of the (windowed, zero-padded) signal
  Scalar peak_omega{};            // parabolically refined peak location
  Scalar bin_width{};             // 2 pi / T of the unpadded record
  bool has_peak{false};
};

/// Spectrum of the mean-subtracted center of mass. The record is zero-padded
/// by `pad` and the peak refined on the padded grid; the reported resolution
/// is the native 2 pi / T.
template <typename Scalar>
Spectrum<Scalar> com_spectrum(const ObservableSeries<Scalar>& series, Window window = Window::hann,
                              SpectrumSignal signal = SpectrumSignal::com_right, int pad = 8) {
  const std::size_t n = series.size();
  if (n < 64) throw ConfigError("series", "needs at least 64 samples");
  if (pad < 1) throw ConfigError("pad", "must be >= 1");
  const Scalar ts = series[1].t - series[0].t;
  if (!(ts > 0)) throw ConfigError("series", "times must increase");
  for (std::size_t j = 1; j < n; ++j)
    if (std::abs(series[j].t - series[j - 1].t - ts) > Scalar(1e-9) * std::max<Scalar>(1, ts))
      throw ConfigError("series", "non-uniform sampling");

  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  std::vector<Scalar> x(n);
  for (std::size_t j = 0; j < n; ++j)
    x[j] = signal == SpectrumSignal::com ? series[j].com : series[j].com_right;
  Scalar mean = 0;
  for (Scalar v : x) mean += v;
  mean /= Scalar(n);
  Scalar scale = 0;
  for (Scalar& v : x) {
    scale = std::max(scale, std::abs(v) + std::abs(mean));
    v -= mean;
  }
  Spectrum<Scalar> out;
  out.bin_width = 2 * pi / (Scalar(n) * ts);
  Scalar spread = 0;
  for (Scalar v : x) spread = std::max(spread, std::abs(v));
  if (!(spread > Scalar(1e-12) * std::max<Scalar>(scale, 1))) return out;

  if (window == Window::hann)
    for (std::size_t j = 0; j < n; ++j)
      x[j] *= Scalar(0.5) * (1 - std::cos(2 * pi * Scalar(j) / Scalar(n - 1)));

  std::size_t m = 1;
  while (m < n * std::size_t(pad)) m <<= 1;
  x.resize(m, Scalar(0));
  Eigen::FFT<Scalar> fft;
  std::vector<std::complex<Scalar>> spec;
  fft.fwd(spec, x);
  const std::size_t half = m / 2 + 1;
  out.omega.resize(half);
  out.magnitude.resize(half);
  const Scalar dw = 2 * pi / (Scalar(m) * ts);
  for (std::size_t j = 0; j < half; ++j) {
    out.omega[j] = Scalar(j) * dw;
    out.magnitude[j] = std::abs(spec[j]);
  }
  // Skip the DC lobe left by mean subtraction and windowing.
  std::size_t best = 1;
  while (best + 1 < half && out.magnitude[best + 1] <= out.magnitude[best]) ++best;
  for (std::size_t j = best; j < half; ++j)
    if (out.magnitude[j] > out.magnitude[best]) best = j;
  Scalar refined = Scalar(best);
  if (best > 0 && best + 1 < half) {
    const Scalar a = out.magnitude[best - 1], b = out.magnitude[best], c = out.magnitude[best + 1];
    const Scalar d = a - 2 * b + c;
    if (d < 0) refined += std::clamp<Scalar>((a - c) / (2 * d), -0.5, 0.5);
  }
  out.peak_omega = refined * dw;
  out.has_peak = true;
  return out;
}

enum class LobeEstimator { peak, centroid };

template <typename Scalar = double>
struct SpeedFit {
  Scalar speed{};
  Scalar intercept{};
  std::size_t samples{};
  Scalar mean_contrast{};
  bool low_confidence{true};
};

/// Least-squares slope of the right lobe position over t in [t_begin, t_end].
/// Low confidence with fewer than 10 samples or when the intensity at z = 0
/// has not dropped well below the right maximum (lobes not split).
template <typename Scalar>
SpeedFit<Scalar> lobe_speed(const ObservableSeries<Scalar>& series, Scalar t_begin, Scalar t_end,
                            LobeEstimator estimator = LobeEstimator::peak) {
  Scalar st = 0, sx = 0, stt = 0, stx = 0, contrast = 0;
  std::size_t cnt = 0;
  for (const auto& r : series.records) {
    if (!r.valid || r.t < t_begin || r.t > t_end) continue;
    const Scalar x = estimator == LobeEstimator::peak ? r.peak_right : r.com_right;
    st += r.t;
    sx += x;
    stt += r.t * r.t;
    stx += r.t * x;
    contrast += r.lobe_contrast;
    ++cnt;
  }
  SpeedFit<Scalar> fit;
  fit.samples = cnt;
  if (cnt < 2) return fit;
  const Scalar nn = Scalar(cnt);
  const Scalar den = nn * stt - st * st;
  if (!(den > 0)) return fit;
  fit.speed = (nn * stx - st * sx) / den;
  fit.intercept = (sx - fit.speed * st) / nn;
  fit.mean_contrast = contrast / nn;
  fit.low_confidence = cnt < 10 || fit.mean_contrast < Scalar(0.5);
  return fit;
}

template <typename Scalar = double>
struct RateFit {
  Scalar rate{};  // -d ln N / dt
  Scalar intercept{};
  std::size_t samples{};
};

/// Log-linear least-squares fit of norm_in_well over t >= t_begin.
template <typename Scalar>
RateFit<Scalar> in_well_decay_rate(const ObservableSeries<Scalar>& series, Scalar t_begin) {
  Scalar st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t cnt = 0;
  for (const auto& r : series.records) {
    if (r.t < t_begin || !(r.norm_in_well > 0)) continue;
    const Scalar y = std::log(r.norm_in_well);
    st += r.t;
    sy += y;
    stt += r.t * r.t;
    sty += r.t * y;
    ++cnt;
  }
  RateFit<Scalar> fit;
  fit.samples = cnt;
  if (cnt < 2) throw ConfigError("series", "too few in-well samples after the transient");
  const Scalar nn = Scalar(cnt);
  const Scalar slope = (nn * sty - st * sy) / (nn * stt - st * st);
  fit.rate = -slope;
  fit.intercept = (sy - slope * st) / nn;
  return fit;
}

/// Least-squares slope of com_right(t) over the whole series.
template <typename Scalar>
Scalar com_right_slope(const ObservableSeries<Scalar>& series) {
  return lobe_speed(series, -std::numeric_limits<Scalar>::infinity(),
                    std::numeric_limits<Scalar>::infinity(), LobeEstimator::centroid)
      .speed;
}

}  // namespace sls
