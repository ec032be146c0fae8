#pragma once

// Scenarios shared by the unit tests and the acceptance runner.

#include <cmath>
#include <vector>

#include "wva/measurement.hpp"

namespace scenario {

using namespace wva;

/// Selector with both parts of A_w non-zero.
inline SelectorConfig generic_selector() { return {0.1, 0.3, 0.0, 0.0}; }

inline std::vector<double> log_points(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return v;
}

/// |first-order shift - exact shift| at one eps.
inline double discrepancy(const SampledWaveform& w, const SelectorConfig& cfg, double eps) {
  const Complex aw = weak_value(cfg).value;
  const auto ex = measure_exact(w, cfg, eps);
  const auto fo = first_order_mean_frequency(w, aw, eps, RegimeCheck{true, 0.0});
  return std::abs(fo.frequency_shift - ex.frequency_shift);
}

/// Log-log slope of the discrepancy over one decade of eps that starts at
/// regime margin m_lo.
inline double convergence_slope(const Pulse& p, const SelectorConfig& cfg, double m_lo = 1e-3) {
  const Complex aw = weak_value(cfg).value;
  const double per_eps = linear_regime_check(p, aw, 1.0).margin;
  const auto eps = log_points(m_lo / per_eps, 10 * m_lo / per_eps, 5);
  const auto w = sample_waveform(p);
  std::vector<double> x, y;
  for (double e : eps) {
    x.push_back(std::log(e));
    y.push_back(std::log(discrepancy(w, cfg, e)));
  }
  return fit_line(x, y).slope;
}

/// First-order shift / (eps Im A_w) for a purely imaginary weak value.
inline double chirp_coefficient(const ChirpPulse& p, double im, const std::vector<double>& eps) {
  const auto w = sample_waveform(Pulse{p});
  std::vector<double> shifts;
  for (double e : eps) {
    shifts.push_back(first_order_mean_frequency(w, Complex(0.0, im), e, RegimeCheck{true, 0.0}).frequency_shift);
  }
  return fit_line(eps, shifts).slope / im;
}

}  // namespace scenario
