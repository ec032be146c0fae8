#ifndef WVA_WAVEFORM_HPP
#define WVA_WAVEFORM_HPP

// Pointer waveforms and their spectra.
//
// Conventions used throughout the library:
//   * a pointer is p(t) = b(t) exp(+i omega0 t); only the complex envelope b
//     is ever sampled, omega0 is carried as a bookkeeping offset;
//   * p~(omega) = (2 pi)^(-1/2) \int p(t) exp(-i omega t) dt, so exp(+i w t)
//     sits at +w and the frequency operator is -i d/dt;
//   * sample grids are cell-centred, t_j = -W/2 + (j + 1/2) dt. Sums over the
//     grid are midpoint-rule integrals, and a rect edge at +-tau/2 falls on a
//     cell boundary whenever the window is a power-of-two multiple of tau.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "wva/csv.hpp"
#include "wva/error.hpp"
#include "wva/fft.hpp"
#include "wva/specfun.hpp"

namespace wva {

/// rect(x) = 1 for -1/2 <= x <= 1/2, else 0.
inline double rect(double x) { return std::abs(x) <= 0.5 ? 1.0 : 0.0; }

/// Gaussian pointer, |b(t)|^2 a normal density with standard deviation tau.
class GaussianPulse {
public:
  GaussianPulse(double omega0, double tau, double delay = 0.0)
      : omega0_(omega0), tau_(tau), delay_(delay) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("GaussianPulse: tau must be positive");
    if (!std::isfinite(omega0) || !std::isfinite(delay)) throw DomainError("GaussianPulse: non-finite parameter");
  }

  double omega0() const { return omega0_; }
  double tau() const { return tau_; }
  double delay() const { return delay_; }

  /// Envelope b(t); the carrier is not included.
  Complex envelope(double t) const {
    const double s = t - delay_;
    return std::exp(-s * s / (4 * tau_ * tau_)) / (std::pow(2 * std::numbers::pi, 0.25) * std::sqrt(tau_));
  }

private:
  double omega0_;
  double tau_;
  double delay_;
};

/// Linear chirp rect((t-d)/tau)/sqrt(tau) exp(i R (t-d)^2) on the carrier.
/// The sweep covers 2*Delta with Delta = R*tau.
class ChirpPulse {
public:
  ChirpPulse(double omega0, double tau, double chirp_rate, double delay = 0.0)
      : omega0_(omega0), tau_(tau), rate_(chirp_rate), delay_(delay) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("ChirpPulse: tau must be positive");
    if (!(chirp_rate > 0.0) || !std::isfinite(chirp_rate)) throw DomainError("ChirpPulse: chirp rate must be positive");
    if (!std::isfinite(omega0) || !std::isfinite(delay)) throw DomainError("ChirpPulse: non-finite parameter");
  }

  /// Chirp with a given half-bandwidth Delta; R = Delta / tau.
  static ChirpPulse from_half_bandwidth(double omega0, double tau, double delta, double delay = 0.0) {
    return ChirpPulse(omega0, tau, delta / tau, delay);
  }

  double omega0() const { return omega0_; }
  double tau() const { return tau_; }
  double chirp_rate() const { return rate_; }
  double delay() const { return delay_; }
  double delta() const { return rate_ * tau_; }
  double time_bandwidth() const { return tau_ * delta(); }

  Complex envelope(double t) const {
    const double s = t - delay_;
    if (rect(s / tau_) == 0.0) return 0.0;
    return std::polar(1.0 / std::sqrt(tau_), rate_ * s * s);
  }

private:
  double omega0_;
  double tau_;
  double rate_;
  double delay_;
};

using Pulse = std::variant<GaussianPulse, ChirpPulse>;

inline double carrier(const Pulse& p) {
  return std::visit([](const auto& x) { return x.omega0(); }, p);
}

/// Number of samples and total window length in seconds.
struct GridSpec {
  std::size_t n = std::size_t{1} << 18;
  double window = 0.0;
};

inline GridSpec default_grid(const GaussianPulse& p) { return {std::size_t{1} << 18, 16.0 * p.tau()}; }
inline GridSpec default_grid(const ChirpPulse& p) { return {std::size_t{1} << 18, 4.0 * p.tau()}; }
inline GridSpec default_grid(const Pulse& p) {
  return std::visit([](const auto& x) { return default_grid(x); }, p);
}

/// Uniformly sampled complex envelope. Sample j sits at t0 + j*dt.
class SampledWaveform {
public:
  SampledWaveform(std::vector<Complex> samples, double dt, double t0, double omega0)
      : samples_(std::move(samples)), dt_(dt), t0_(t0), omega0_(omega0) {
    if (samples_.size() < 2 || !std::has_single_bit(samples_.size())) {
      throw DomainError("SampledWaveform: length must be a power of two >= 2");
    }
    if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(t0) || !std::isfinite(omega0)) {
      throw DomainError("SampledWaveform: invalid time axis");
    }
    for (const auto& s : samples_) {
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw DomainError("SampledWaveform: non-finite sample");
    }
  }

  std::span<const Complex> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double dt() const { return dt_; }
  double t0() const { return t0_; }
  double omega0() const { return omega0_; }
  double time(std::size_t j) const { return t0_ + static_cast<double>(j) * dt_; }
  double window() const { return dt_ * static_cast<double>(samples_.size()); }

private:
  std::vector<Complex> samples_;
  double dt_;
  double t0_;
  double omega0_;
};

/// Complex amplitude on a uniform angular-frequency grid (absolute frequency,
/// carrier included). The grid is anchored at its centre so that moments about
/// the carrier do not lose digits to omega0.
class Spectrum {
public:
  Spectrum(std::vector<Complex> amplitudes, double domega, double omega_center)
      : amp_(std::move(amplitudes)), domega_(domega), center_(omega_center) {
    if (amp_.size() < 2) throw DomainError("Spectrum: need at least two points");
    if (!(domega > 0.0) || !std::isfinite(domega) || !std::isfinite(omega_center)) {
      throw DomainError("Spectrum: invalid frequency axis");
    }
  }

  std::span<const Complex> amplitudes() const { return amp_; }
  std::size_t size() const { return amp_.size(); }
  double domega() const { return domega_; }
  double omega_center() const { return center_; }
  /// Offset of point k from the grid centre.
  double offset(std::size_t k) const { return (static_cast<double>(k) - 0.5 * static_cast<double>(amp_.size() - 1)) * domega_; }
  double omega(std::size_t k) const { return center_ + offset(k); }
  double omega_start() const { return omega(0); }

private:
  std::vector<Complex> amp_;
  double domega_;
  double center_;
};

namespace detail {

inline void check_grid(const GridSpec& g) {
  if (g.n < 2 || !std::has_single_bit(g.n)) throw DomainError("grid: sample count must be a power of two >= 2");
  if (!(g.window > 0.0) || !std::isfinite(g.window)) throw DomainError("grid: window must be positive");
}

template <class Env>
std::vector<Complex> sample_envelope(const Env& env, const GridSpec& g, double& dt, double& t0) {
  dt = g.window / static_cast<double>(g.n);
  t0 = -0.5 * g.window + 0.5 * dt;
  std::vector<Complex> s(g.n);
  for (std::size_t j = 0; j < g.n; ++j) s[j] = env(t0 + static_cast<double>(j) * dt);
  return s;
}

inline double grid_norm(std::span<const Complex> s, double dt) {
  double acc = 0.0;
  for (const auto& v : s) acc += std::norm(v);
  return acc * dt;
}

}  // namespace detail

/// Samples the envelope of a Gaussian pointer. The window must span at least
/// 12 tau around the pulse centre.
inline SampledWaveform sample_waveform(const GaussianPulse& p, const GridSpec& g) {
  detail::check_grid(g);
  if (g.window < 12.0 * p.tau() + 2.0 * std::abs(p.delay())) {
    throw WindowTooSmall("sample_waveform: Gaussian needs a window of at least 12 tau around its centre");
  }
  double dt = 0, t0 = 0;
  auto s = detail::sample_envelope([&](double t) { return p.envelope(t); }, g, dt, t0);
  return SampledWaveform(std::move(s), dt, t0, p.omega0());
}

/// Samples the envelope of a chirp. If the rect edges do not fall on cell
/// boundaries the samples are rescaled to unit grid norm.
inline SampledWaveform sample_waveform(const ChirpPulse& p, const GridSpec& g) {
  detail::check_grid(g);
  if (g.window < p.tau() + 2.0 * std::abs(p.delay())) {
    throw WindowTooSmall("sample_waveform: rect support exceeds the window");
  }
  double dt = 0, t0 = 0;
  auto s = detail::sample_envelope([&](double t) { return p.envelope(t); }, g, dt, t0);
  const double norm = detail::grid_norm(s, dt);
  if (std::abs(norm - 1.0) > 1e-12) {
    const double k = 1.0 / std::sqrt(norm);
    for (auto& v : s) v *= k;
  }
  return SampledWaveform(std::move(s), dt, t0, p.omega0());
}

inline SampledWaveform sample_waveform(const Pulse& p, const GridSpec& g) {
  return std::visit([&](const auto& x) { return sample_waveform(x, g); }, p);
}

inline SampledWaveform sample_waveform(const Pulse& p) { return sample_waveform(p, default_grid(p)); }

/// b(t) -> conj(b(-t)) on the same (symmetric) grid; reverses the sweep
/// direction of a chirp and keeps the carrier.
inline SampledWaveform time_reversed(const SampledWaveform& w) {
  const auto s = w.samples();
  const std::size_t n = s.size();
  // Reflection t -> -t maps sample j to n-1-j only on a centred grid.
  const double mirror = w.time(0) + w.time(n - 1);
  if (std::abs(mirror) > 1e-9 * w.window()) throw DomainError("time_reversed: grid is not centred on t = 0");
  std::vector<Complex> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = std::conj(s[n - 1 - j]);
  return SampledWaveform(std::move(out), w.dt(), w.t0(), w.omega0());
}

/// Discrete transform under the library convention. The grid has n+1 points,
/// offsets -n/2 .. n/2 in steps of 2 pi / window about omega0; the Nyquist bin
/// is split evenly between both ends (amplitude / sqrt 2 each) so the grid is
/// symmetric and Parseval still holds exactly.
inline Spectrum spectrum_fft(const SampledWaveform& w) {
  const std::size_t n = w.size();
  std::vector<Complex> buf(w.samples().begin(), w.samples().end());
  fft::forward(buf);
  const double dt = w.dt();
  const double domega = 2.0 * std::numbers::pi / (dt * static_cast<double>(n));
  const double scale = dt / std::sqrt(2.0 * std::numbers::pi);
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  std::vector<Complex> amp(n + 1);
  for (std::ptrdiff_t m = -half; m <= half; ++m) {
    const std::size_t bin = static_cast<std::size_t>((m + static_cast<std::ptrdiff_t>(n)) % static_cast<std::ptrdiff_t>(n));
    const double om = static_cast<double>(m) * domega;
    // Sample j sits at t0 + j dt, so the transform picks up exp(-i om t0).
    amp[static_cast<std::size_t>(m + half)] = scale * buf[bin] * std::polar(1.0, -om * w.t0());
  }
  amp.front() *= std::numbers::sqrt2 / 2.0;
  amp.back() *= std::numbers::sqrt2 / 2.0;
  return Spectrum(std::move(amp), domega, w.omega0());
}

/// Closed-form transform of the rect chirp,
///   e^{i pi/4} e^{-i W^2/4R} / sqrt(8 Delta) [erf((Delta+W)/(2 sqrt(iR))) + erf((Delta-W)/(2 sqrt(iR)))]
/// with W = omega - omega0. The e^{i pi/4} puts it on the same global phase as
/// spectrum_fft; a delay d multiplies by e^{-i W d}.
inline Complex chirp_spectrum_analytic(const ChirpPulse& p, double omega) {
  const double w = omega - p.omega0();
  const double r = p.chirp_rate();
  const double delta = p.delta();
  const Complex bracket = specfun::erf_sqrt_i_scaled(delta + w, r) + specfun::erf_sqrt_i_scaled(delta - w, r);
  const double phase = std::numbers::pi / 4 - w * w / (4 * r) - w * p.delay();
  return std::polar(1.0 / std::sqrt(8 * delta), phase) * bracket;
}

/// Rectangular-spectrum approximation (1/sqrt(2 Delta)) rect(W/2Delta) e^{-i W^2/4R}.
inline Complex chirp_spectrum_rect_approx(const ChirpPulse& p, double omega) {
  const double w = omega - p.omega0();
  const double delta = p.delta();
  if (rect(w / (2 * delta)) == 0.0) return 0.0;
  return std::polar(1.0 / std::sqrt(2 * delta), -w * w / (4 * p.chirp_rate()) - w * p.delay());
}

/// Tabulates f(omega) on n points spaced domega around omega_center.
template <class F>
Spectrum tabulate_spectrum(F&& f, double omega_center, double domega, std::size_t n) {
  std::vector<Complex> amp(n);
  Spectrum axis(std::vector<Complex>(n), domega, omega_center);
  for (std::size_t k = 0; k < n; ++k) amp[k] = f(axis.omega(k));
  return Spectrum(std::move(amp), domega, omega_center);
}

/// The analytic spectrum evaluated on the frequency grid of another spectrum.
inline Spectrum chirp_spectrum_analytic(const ChirpPulse& p, const Spectrum& grid) {
  return tabulate_spectrum([&](double om) { return chirp_spectrum_analytic(p, om); }, grid.omega_center(), grid.domega(),
                           grid.size());
}

/// sum omega^n |p~|^2 domega (absolute frequency), n in {0, 1, 2}.
inline double spectral_moment(const Spectrum& s, int order) {
  if (order < 0 || order > 2) throw DomainError("spectral_moment: order must be 0, 1 or 2");
  double m0 = 0, m1 = 0, m2 = 0;
  const auto a = s.amplitudes();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double pw = std::norm(a[k]);
    const double x = s.offset(k);
    m0 += pw;
    m1 += x * pw;
    m2 += x * x * pw;
  }
  const double c = s.omega_center();
  const double dw = s.domega();
  switch (order) {
    case 0: return m0 * dw;
    case 1: return (c * m0 + m1) * dw;
    default: return (c * c * m0 + 2 * c * m1 + m2) * dw;
  }
}

/// Mean frequency relative to the grid centre. Free of the cancellation that
/// subtracting omega0 from mean_frequency would cause.
inline double mean_frequency_offset(const Spectrum& s) {
  double m0 = 0, m1 = 0;
  const auto a = s.amplitudes();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double pw = std::norm(a[k]);
    m0 += pw;
    m1 += s.offset(k) * pw;
  }
  if (!(m0 > 0.0)) throw DomainError("mean_frequency: spectrum carries no power");
  return m1 / m0;
}

/// Power-weighted mean frequency (first moment over zeroth).
inline double mean_frequency(const Spectrum& s) { return s.omega_center() + mean_frequency_offset(s); }

/// Normalized second moment about the mean frequency.
inline double spectral_variance(const Spectrum& s) {
  const double mu = mean_frequency(s) - s.omega_center();
  double m0 = 0, m2 = 0;
  const auto a = s.amplitudes();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double pw = std::norm(a[k]);
    const double x = s.offset(k) - mu;
    m0 += pw;
    m2 += x * x * pw;
  }
  return m2 / m0;
}

/// sum t^n |p(t)|^2 dt over the grid, n in {0, 1, 2}.
inline double time_moment(const SampledWaveform& w, int order) {
  if (order < 0 || order > 2) throw DomainError("time_moment: order must be 0, 1 or 2");
  double acc = 0;
  const auto s = w.samples();
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double t = w.time(j);
    acc += std::pow(t, order) * std::norm(s[j]);
  }
  return acc * w.dt();
}

/// Mean arrival time <t> of a (possibly unnormalized) waveform.
inline double mean_time(const SampledWaveform& w) { return time_moment(w, 1) / time_moment(w, 0); }

/// Product of the rms duration and the rms bandwidth. With a positive
/// band_limit only spectral points within that offset of the carrier count,
/// which keeps the sinc-like skirts of a rect pulse out of the bandwidth.
inline double time_bandwidth_product(const SampledWaveform& w, double band_limit = 0.0) {
  const double m0 = time_moment(w, 0);
  const double mt = time_moment(w, 1) / m0;
  const double sigma_t = std::sqrt(time_moment(w, 2) / m0 - mt * mt);
  const Spectrum s = spectrum_fft(w);
  double p0 = 0, p1 = 0, p2 = 0;
  const auto a = s.amplitudes();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double x = s.offset(k);
    if (band_limit > 0.0 && std::abs(x) > band_limit) continue;
    const double pw = std::norm(a[k]);
    p0 += pw;
    p1 += x * pw;
    p2 += x * x * pw;
  }
  const double mu = p1 / p0;
  return sigma_t * std::sqrt(p2 / p0 - mu * mu);
}

/// Spectrum as CSV: a units comment, the omega,re,im,power header, one row per point.
inline void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out << "# omega [rad/s], re and im [s^(1/2)], power [s]\n";
  out << "omega,re,im,power\n";
  const auto a = s.amplitudes();
  for (std::size_t k = 0; k < a.size(); ++k) {
    csv::write_row(out, {s.omega(k), a[k].real(), a[k].imag(), std::norm(a[k])});
  }
}

}  // namespace wva

#endif  // WVA_WAVEFORM_HPP
