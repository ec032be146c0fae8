#ifndef WVA_MEASUREMENT_HPP
#define WVA_MEASUREMENT_HPP

// The weak-measurement pipeline on a pointer waveform.
//
// The interaction exp(-i eps A (x) T) with A = |H><H| and T = t (time) is a
// frequency translation of the H branch by -eps. Because A is a projector the
// post-selected pointer is exact in closed form,
//
//   p_f(t) = <f|H><H|i> p(t) e^{-i eps t} + <f|V><V|i> p(t),
//
// and the first-order pipeline replaces e^{-i eps t} by (1 - i eps t), i.e.
// p~_f = N (1 + eps A_w d/domega) p~_i.
//
// Mean frequency is always the first moment of the power spectrum.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wva/error.hpp"
#include "wva/parallel.hpp"
#include "wva/polarization.hpp"
#include "wva/waveform.hpp"

namespace wva {

struct InteractionConfig {
  /// Coupling strength; the H branch is shifted by -epsilon in frequency.
  double epsilon = 0.0;
};

enum class Method { exact, first_order };

inline const char* to_string(Method m) { return m == Method::exact ? "exact" : "first_order"; }

struct MeasurementOutcome {
  double mean_frequency = 0.0;
  /// mean_frequency - omega0, computed without cancellation.
  double frequency_shift = 0.0;
  /// Fraction of the signal surviving post-selection. Unknown (empty) for a
  /// first-order evaluation that was handed a bare weak value.
  std::optional<double> postselect_probability;
  /// <p_un|p_un> = 1 + 2 eps <T> Im A_w + eps^2 |A_w|^2 <T^2> for the
  /// first-order path; for the exact path, probability / |<f|i>|^2.
  std::optional<double> norm_first_order;
  bool linear_regime_ok = true;
  double regime_margin = 0.0;
  Method method = Method::exact;
  /// Post-selected mean arrival time (diagnostic, exact path only).
  std::optional<double> mean_time;
};

/// Threshold on the regime margin below which the first-order expansion is
/// taken to hold.
inline constexpr double kLinearRegimeThreshold = 0.1;

struct RegimeCheck {
  bool ok;
  double margin;
};

/// m = (omega0 |eps| / 4R) |A_w|^2 / |Im A_w|; ok iff m < 0.1. A purely real
/// weak value has no chirp amplification, so any eps != 0 gives m = inf.
inline RegimeCheck linear_regime_check(const ChirpPulse& p, Complex aw, double epsilon) {
  if (epsilon == 0.0) return {true, 0.0};
  const double im = std::abs(aw.imag());
  if (im == 0.0) return {false, std::numeric_limits<double>::infinity()};
  const double m = p.omega0() * std::abs(epsilon) / (4.0 * p.chirp_rate()) * std::norm(aw) / im;
  return {m < kLinearRegimeThreshold, m};
}

inline RegimeCheck linear_regime_check(const ChirpPulse& p, const WeakValue& aw, double epsilon) {
  return linear_regime_check(p, aw.value, epsilon);
}

/// Gaussian counterpart: m = |eps| |A_w| tau, the size of the first-order
/// term eps A_w t over the pulse.
inline RegimeCheck linear_regime_check(const GaussianPulse& p, Complex aw, double epsilon) {
  const double m = std::abs(epsilon) * std::abs(aw) * p.tau();
  return {m < kLinearRegimeThreshold, m};
}

inline RegimeCheck linear_regime_check(const Pulse& p, Complex aw, double epsilon) {
  return std::visit([&](const auto& x) { return linear_regime_check(x, aw, epsilon); }, p);
}

// ---------------------------------------------------------------------------
// Exact pipeline

inline SampledWaveform evolve_exact(const SampledWaveform& w, const BranchAmplitudes& c, const InteractionConfig& ic) {
  if (!std::isfinite(ic.epsilon)) throw DomainError("evolve_exact: non-finite epsilon");
  const auto s = w.samples();
  std::vector<Complex> out(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    out[j] = (c.h * std::polar(1.0, -ic.epsilon * w.time(j)) + c.v) * s[j];
  }
  return SampledWaveform(std::move(out), w.dt(), w.t0(), w.omega0());
}

/// Unnormalized post-selected pointer; its squared norm is the post-selection
/// probability. No division by <f|i>, so full extinction is allowed.
inline SampledWaveform evolve_exact(const SampledWaveform& w, const SelectorConfig& cfg, const InteractionConfig& ic) {
  return evolve_exact(w, branch_amplitudes(cfg), ic);
}

/// Squared L2 norm of an evolve_exact output.
inline double postselect_probability_exact(const SampledWaveform& w_out) { return time_moment(w_out, 0); }

/// Exact post-selected outcome for a sampled input pointer.
inline MeasurementOutcome measure_exact(const SampledWaveform& w, const SelectorConfig& cfg, double epsilon,
                                        std::optional<RegimeCheck> regime = std::nullopt) {
  const auto out = evolve_exact(w, cfg, {epsilon});
  MeasurementOutcome r;
  r.method = Method::exact;
  r.postselect_probability = postselect_probability_exact(out);
  if (!(*r.postselect_probability > 0.0)) {
    throw DomainError("measure_exact: nothing survives post-selection, mean frequency undefined");
  }
  const Spectrum spec = spectrum_fft(out);
  r.frequency_shift = mean_frequency_offset(spec);
  r.mean_frequency = spec.omega_center() + r.frequency_shift;
  r.mean_time = mean_time(out);
  const double overlap = postselection_overlap(cfg);
  if (overlap >= detail::kSingularOverlap) r.norm_first_order = *r.postselect_probability / overlap;
  if (regime) {
    r.linear_regime_ok = regime->ok;
    r.regime_margin = regime->margin;
  }
  return r;
}

inline MeasurementOutcome measure_exact(const Pulse& p, const SelectorConfig& cfg, double epsilon) {
  std::optional<RegimeCheck> regime;
  if (postselection_overlap(cfg) >= detail::kSingularOverlap) {
    regime = linear_regime_check(p, weak_value(cfg).value, epsilon);
  }
  return measure_exact(sample_waveform(p), cfg, epsilon, regime);
}

// ---------------------------------------------------------------------------
// First-order pipeline

/// N (1 + eps A_w d/domega) p~ with d/domega by central differences (one-sided
/// at the ends), renormalized to unit power. Stencil error O(domega^2).
inline Spectrum first_order_pointer_spectrum(const Spectrum& s, Complex aw, double epsilon) {
  const auto a = s.amplitudes();
  const std::size_t n = a.size();
  const double h = s.domega();
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex d;
    if (k == 0) {
      d = (a[1] - a[0]) / h;
    } else if (k + 1 == n) {
      d = (a[n - 1] - a[n - 2]) / h;
    } else {
      d = (a[k + 1] - a[k - 1]) / (2 * h);
    }
    out[k] = a[k] + epsilon * aw * d;
  }
  double norm = 0.0;
  for (const auto& v : out) norm += std::norm(v);
  norm *= h;
  if (!(norm > 0.0)) throw DomainError("first_order_pointer_spectrum: spectrum carries no power");
  const double k = 1.0 / std::sqrt(norm);
  for (auto& v : out) v *= k;
  return Spectrum(std::move(out), h, s.omega_center());
}

inline Spectrum first_order_pointer_spectrum(const Spectrum& s, const WeakValue& aw, double epsilon) {
  return first_order_pointer_spectrum(s, aw.value, epsilon);
}

enum class DerivativeScheme {
  /// d/domega of the discrete transform, taken as the transform of -i t p(t).
  spectral,
  /// Central differences on the frequency grid.
  central_difference,
};

struct FirstOrderOptions {
  DerivativeScheme derivative = DerivativeScheme::spectral;
  std::optional<GridSpec> grid;
};

/// First-order spectrum of a sampled pointer.
inline Spectrum first_order_spectrum(const SampledWaveform& w, Complex aw, double epsilon,
                                     DerivativeScheme scheme = DerivativeScheme::spectral) {
  const Spectrum base = spectrum_fft(w);
  if (scheme == DerivativeScheme::central_difference) return first_order_pointer_spectrum(base, aw, epsilon);
  const auto s = w.samples();
  std::vector<Complex> tb(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) tb[j] = Complex(0.0, -w.time(j)) * s[j];
  const Spectrum deriv = spectrum_fft(SampledWaveform(std::move(tb), w.dt(), w.t0(), w.omega0()));
  const auto a = base.amplitudes();
  const auto d = deriv.amplitudes();
  std::vector<Complex> out(a.size());
  double norm = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    out[k] = a[k] + epsilon * aw * d[k];
    norm += std::norm(out[k]);
  }
  norm *= base.domega();
  const double k = 1.0 / std::sqrt(norm);
  for (auto& v : out) v *= k;
  return Spectrum(std::move(out), base.domega(), base.omega_center());
}

/// 1 + 2 eps <T> Im A_w + eps^2 |A_w|^2 <T^2> over the (unit-norm) input.
inline double first_order_norm(const SampledWaveform& w, Complex aw, double epsilon) {
  return 1.0 + 2.0 * epsilon * time_moment(w, 1) * aw.imag() + epsilon * epsilon * std::norm(aw) * time_moment(w, 2);
}

inline MeasurementOutcome first_order_mean_frequency(const SampledWaveform& w, Complex aw, double epsilon,
                                                     RegimeCheck regime,
                                                     DerivativeScheme scheme = DerivativeScheme::spectral) {
  MeasurementOutcome r;
  r.method = Method::first_order;
  const Spectrum spec = first_order_spectrum(w, aw, epsilon, scheme);
  r.frequency_shift = mean_frequency_offset(spec);
  r.mean_frequency = spec.omega_center() + r.frequency_shift;
  r.norm_first_order = first_order_norm(w, aw, epsilon);
  r.linear_regime_ok = regime.ok;
  r.regime_margin = regime.margin;
  return r;
}

/// Mean frequency of N (1 + eps A_w d/domega) p~_i for an analytic pointer.
/// The post-selection probability stays empty: a bare weak value does not fix
/// |<f|i>|^2.
inline MeasurementOutcome first_order_mean_frequency(const Pulse& p, Complex aw, double epsilon,
                                                     const FirstOrderOptions& opts = {}) {
  const auto w = sample_waveform(p, opts.grid.value_or(default_grid(p)));
  return first_order_mean_frequency(w, aw, epsilon, linear_regime_check(p, aw, epsilon), opts.derivative);
}

inline MeasurementOutcome first_order_mean_frequency(const Pulse& p, const WeakValue& aw, double epsilon,
                                                     const FirstOrderOptions& opts = {}) {
  return first_order_mean_frequency(p, aw.value, epsilon, opts);
}

/// As above with the weak value taken from a selector; the probability is
/// |<f|i>|^2 <p_un|p_un>.
inline MeasurementOutcome first_order_mean_frequency(const Pulse& p, const SelectorConfig& cfg, double epsilon,
                                                     const FirstOrderOptions& opts = {}) {
  auto r = first_order_mean_frequency(p, weak_value(cfg).value, epsilon, opts);
  r.postselect_probability = postselection_overlap(cfg) * *r.norm_first_order;
  return r;
}

// ---------------------------------------------------------------------------
// Slopes

struct LineFit {
  double slope;
  double intercept;
  double r_squared;
};

/// Ordinary least squares y = slope * x + intercept.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line: need two or more (x, y) pairs");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DegenerateSweep("fit_line: all abscissae are equal");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (slope * x[i] + intercept);
    ss_res += e * e;
  }
  const double r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return {slope, intercept, r2};
}

struct SlopeResult {
  double slope;
  double r_squared;
  double intercept;
  std::vector<double> epsilons;
  /// Mean frequency minus omega0 at every sweep point.
  std::vector<double> shifts;
};

inline constexpr std::size_t kMinSweepPoints = 5;

/// Mean-frequency shifts for a sweep of eps with the selected pipeline,
/// evaluated on a shared sampled pointer.
inline std::vector<MeasurementOutcome> sweep_outcomes(const Pulse& p, const SelectorConfig& cfg, Method method,
                                                      std::span<const double> eps_sweep, unsigned threads = 1,
                                                      std::optional<GridSpec> grid = std::nullopt) {
  const auto w = sample_waveform(p, grid.value_or(default_grid(p)));
  std::optional<Complex> aw;
  if (postselection_overlap(cfg) >= detail::kSingularOverlap) aw = weak_value(cfg).value;
  if (method == Method::first_order && !aw) throw DivergentWeakValue("first-order pipeline needs a finite weak value");
  const double overlap = postselection_overlap(cfg);
  return parallel_map(eps_sweep.size(), threads, [&](std::size_t i) {
    const double eps = eps_sweep[i];
    std::optional<RegimeCheck> regime;
    if (aw) regime = linear_regime_check(p, *aw, eps);
    if (method == Method::exact) return measure_exact(w, cfg, eps, regime);
    auto r = first_order_mean_frequency(w, *aw, eps, *regime);
    r.postselect_probability = overlap * *r.norm_first_order;
    return r;
  });
}

/// Least-squares slope of (mean frequency - omega0) against eps.
inline SlopeResult amplification_slope(const Pulse& p, const SelectorConfig& cfg, Method method,
                                       std::span<const double> eps_sweep, unsigned threads = 1,
                                       std::optional<GridSpec> grid = std::nullopt) {
  if (eps_sweep.size() < kMinSweepPoints) throw DegenerateSweep("amplification_slope: need at least 5 sweep points");
  const auto outcomes = sweep_outcomes(p, cfg, method, eps_sweep, threads, grid);
  std::vector<double> shifts(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) shifts[i] = outcomes[i].frequency_shift;
  const auto fit = fit_line(eps_sweep, shifts);
  return {fit.slope, fit.r_squared, fit.intercept, {eps_sweep.begin(), eps_sweep.end()}, std::move(shifts)};
}

/// `points` logarithmically spaced eps over two decades, the largest at 90% of
/// the eps where the regime margin reaches max_margin.
inline std::vector<double> default_eps_sweep(const Pulse& p, Complex aw, std::size_t points = 8,
                                             double max_margin = 0.01) {
  if (points < 2) throw DomainError("default_eps_sweep: need at least two points");
  const double per_eps = linear_regime_check(p, aw, 1.0).margin;
  if (!(per_eps > 0.0) || !std::isfinite(per_eps)) {
    throw DomainError("default_eps_sweep: regime margin does not scale with eps for this weak value");
  }
  const double eps_max = 0.9 * max_margin / per_eps;
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(points - 1);
    out[i] = eps_max * std::pow(10.0, -2.0 * (1.0 - f));
  }
  out.back() = eps_max;
  return out;
}

}  // namespace wva

#endif  // WVA_MEASUREMENT_HPP
