#ifndef WVA_POLARIZATION_HPP
#define WVA_POLARIZATION_HPP

// Polarization selector: pre-selection |i> = (|H> + e^{i beta}|V>)/sqrt 2,
// post-selection |f> = cos(pi/4 + alpha)|H> - sin(pi/4 + alpha)|V>, and the
// weak value of A = |H><H| between them,
//
//   A_w = <f|A|i> / <f|i> = cos(theta) / (cos(theta) - e^{i beta} sin(theta)),
//   theta = pi/4 + alpha.
//
// alpha = beta = 0 makes the two states orthogonal and A_w singular.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "wva/error.hpp"
#include "wva/optimize.hpp"
#include "wva/specfun.hpp"

namespace wva {

inline constexpr double kDegree = std::numbers::pi / 180.0;

inline constexpr double deg_to_rad(double deg) { return deg * kDegree; }
inline constexpr double rad_to_deg(double rad) { return rad / kDegree; }

/// Selector angles and their 1-sigma uncertainties, all in radians.
struct SelectorConfig {
  double alpha = 0.0;
  double beta = 0.0;
  double dalpha = 0.0;
  double dbeta = 0.0;
};

struct WeakValue {
  Complex value;
  double sigma_re = 0.0;
  double sigma_im = 0.0;
};

/// Jones vectors in the (H, V) basis.
struct SelectorStates {
  std::array<Complex, 2> initial;
  std::array<Complex, 2> final;
};

/// <f|H><H|i> and <f|V><V|i>; they sum to <f|i>.
struct BranchAmplitudes {
  Complex h;
  Complex v;
};

namespace detail {

inline void check_angles(const SelectorConfig& cfg) {
  if (!std::isfinite(cfg.alpha) || !std::isfinite(cfg.beta) || !std::isfinite(cfg.dalpha) || !std::isfinite(cfg.dbeta)) {
    throw DomainError("SelectorConfig: non-finite angle");
  }
  if (cfg.dalpha < 0.0 || cfg.dbeta < 0.0) throw DomainError("SelectorConfig: uncertainties must be non-negative");
}

// Below this |<f|i>|^2 the weak value is treated as divergent.
inline constexpr double kSingularOverlap = 1e-30;

}  // namespace detail

namespace detail {

// cos and sin of theta = pi/4 + alpha, written so that they are bit-identical
// at alpha = 0 and the orthogonal configuration cancels exactly.
inline double cos_theta(double alpha) { return (std::cos(alpha) - std::sin(alpha)) * (std::numbers::sqrt2 / 2); }
inline double sin_theta(double alpha) { return (std::cos(alpha) + std::sin(alpha)) * (std::numbers::sqrt2 / 2); }

// cos(theta) - e^{i beta} sin(theta) without cancellation near alpha = beta = 0.
inline Complex weak_value_denominator(double alpha, double beta) {
  const double s = sin_theta(alpha);
  const double h = std::sin(beta / 2);
  return {-std::numbers::sqrt2 * std::sin(alpha) + 2.0 * s * h * h, -s * std::sin(beta)};
}

}  // namespace detail

inline SelectorStates selector_states(const SelectorConfig& cfg) {
  detail::check_angles(cfg);
  const double r = std::numbers::sqrt2 / 2;
  return {{Complex(r, 0.0), std::polar(r, cfg.beta)},
          {Complex(detail::cos_theta(cfg.alpha), 0.0), Complex(-detail::sin_theta(cfg.alpha), 0.0)}};
}

inline BranchAmplitudes branch_amplitudes(const SelectorConfig& cfg) {
  const auto s = selector_states(cfg);
  return {std::conj(s.final[0]) * s.initial[0], std::conj(s.final[1]) * s.initial[1]};
}

/// |<f|i>|^2, the fraction of the signal that survives post-selection.
inline double postselection_overlap(const SelectorConfig& cfg) {
  detail::check_angles(cfg);
  return 0.5 * std::norm(detail::weak_value_denominator(cfg.alpha, cfg.beta));
}

/// dA_w/dalpha and dA_w/dbeta.
struct WeakValueGradient {
  Complex d_alpha;
  Complex d_beta;
};

namespace detail {

inline Complex weak_value_closed_form(double alpha, double beta, Complex* denominator = nullptr) {
  const Complex d = weak_value_denominator(alpha, beta);
  if (denominator) *denominator = d;
  return cos_theta(alpha) / d;
}

inline void check_not_singular(const SelectorConfig& cfg) {
  if (postselection_overlap(cfg) < kSingularOverlap) {
    throw DivergentWeakValue("weak value diverges: pre- and post-selected states are orthogonal");
  }
}

}  // namespace detail

inline WeakValueGradient weak_value_gradient(const SelectorConfig& cfg) {
  detail::check_not_singular(cfg);
  Complex d;
  detail::weak_value_closed_form(cfg.alpha, cfg.beta, &d);
  const Complex e = std::polar(1.0, cfg.beta);
  const Complex d2 = d * d;
  const double cs = detail::cos_theta(cfg.alpha) * detail::sin_theta(cfg.alpha);
  return {e / d2, Complex(0.0, cs) * e / d2};
}

/// First-order propagation of independent Gaussian angle errors into A_w.
inline WeakValue propagate_uncertainty(const SelectorConfig& cfg) {
  detail::check_not_singular(cfg);
  const Complex value = detail::weak_value_closed_form(cfg.alpha, cfg.beta);
  const auto g = weak_value_gradient(cfg);
  const double sre = std::hypot(g.d_alpha.real() * cfg.dalpha, g.d_beta.real() * cfg.dbeta);
  const double sim = std::hypot(g.d_alpha.imag() * cfg.dalpha, g.d_beta.imag() * cfg.dbeta);
  return {value, sre, sim};
}

/// A_w with its propagated 1-sigma uncertainties. Throws DivergentWeakValue
/// when |<f|i>|^2 < 1e-30.
inline WeakValue weak_value(const SelectorConfig& cfg) { return propagate_uncertainty(cfg); }

/// Ellipticity that gives Im(A_w) = im at alpha = 0, where A_w = 1/2 + (i/2) cot(beta/2).
inline double beta_for_im_weak_value(double im) {
  if (!(im > 0.0) || !std::isfinite(im)) throw DomainError("beta_for_im_weak_value: target must be positive");
  return 2.0 * std::atan(1.0 / (2.0 * im));
}

/// Polarizer offset that gives the real weak value re at beta = 0, where
/// A_w = 1/(1 - tan(theta)). re = 1 puts |f> on |H> (alpha = -pi/4).
inline double alpha_for_real_weak_value(double re) {
  if (!std::isfinite(re) || re == 0.0) throw DomainError("alpha_for_real_weak_value: target must be finite and non-zero");
  return std::atan(1.0 - 1.0 / re) - std::numbers::pi / 4;
}

struct MaxImSearchOptions {
  /// Refine alpha around 0 after the beta search. Skipped when dalpha == 0:
  /// first-order propagation then has an error-free direction and the
  /// problem is unbounded.
  bool refine_alpha = true;
  double beta_min = 1e-8;
  double beta_max = std::numbers::pi / 2;
};

struct MaxImResult {
  double im_aw;
  double beta_star;
  double alpha_star;
  /// sigma_im / Im(A_w) at the optimum.
  double relative_error;
  /// False when the optimum sits on the search box instead of the budget.
  bool constraint_active;
};

namespace detail {

inline double relative_im_error(double alpha, double beta, double dalpha, double dbeta) {
  const auto w = propagate_uncertainty({alpha, beta, dalpha, dbeta});
  return w.sigma_im / std::abs(w.value.imag());
}

// Im(A_w), damped by (budget/ratio)^2 where the budget is violated. Along
// beta this peaks where the constraint becomes active.
inline double penalized_im(double alpha, double beta, double dalpha, double dbeta, double budget) {
  const SelectorConfig cfg{alpha, beta, dalpha, dbeta};
  if (postselection_overlap(cfg) < kSingularOverlap) return -1.0;
  const auto w = propagate_uncertainty(cfg);
  const double im = w.value.imag();
  if (!(im > 0.0)) return im;
  const double ratio = w.sigma_im / im;
  if (ratio <= budget) return im;
  const double k = budget / ratio;
  return im * k * k;
}

struct BetaOptimum {
  double beta;
  double value;
};

inline BetaOptimum best_beta(double alpha, double log_lo, double log_hi, double dalpha, double dbeta, double budget) {
  const auto opt = optimize::golden_section_maximize(
      [&](double u) { return penalized_im(alpha, std::exp(u), dalpha, dbeta, budget); }, log_lo, log_hi, 1e-13);
  return {std::exp(opt.x), opt.value};
}

}  // namespace detail

/// Largest Im(A_w) whose first-order relative 1-sigma error stays within
/// rel_err_budget. Golden-section search over beta at alpha = 0, then (if
/// dalpha > 0) a local golden-section refinement over alpha with beta
/// re-optimized at every alpha.
inline MaxImResult max_usable_im_weak_value(double dbeta, double dalpha, double rel_err_budget,
                                            const MaxImSearchOptions& opts = {}) {
  if (!(dbeta >= 0.0) || !(dalpha >= 0.0) || !(dbeta > 0.0 || dalpha > 0.0)) {
    throw DomainError("max_usable_im_weak_value: need dbeta > 0 or dalpha > 0, both non-negative");
  }
  if (!(rel_err_budget > 0.0 && rel_err_budget < 1.0)) {
    throw DomainError("max_usable_im_weak_value: budget must lie in (0, 1)");
  }
  const double lo = std::log(opts.beta_min);
  const double hi = std::log(opts.beta_max);
  auto best = detail::best_beta(0.0, lo, hi, dalpha, dbeta, rel_err_budget);
  double best_alpha = 0.0;

  if (opts.refine_alpha && dalpha > 0.0) {
    const double box = std::min(4.0 * best.beta, std::numbers::pi / 4 * 0.99);
    const double ulo = std::max(lo, std::log(best.beta) - 4.0);
    const double uhi = std::min(hi, std::log(best.beta) + 1.0);
    for (double sign : {-1.0, 1.0}) {
      const auto opt = optimize::golden_section_maximize(
          [&](double a) { return detail::best_beta(sign * a, ulo, uhi, dalpha, dbeta, rel_err_budget).value; }, 0.0,
          box, 1e-12 * box);
      if (opt.value > best.value) {
        best_alpha = sign * opt.x;
        best = detail::best_beta(best_alpha, ulo, uhi, dalpha, dbeta, rel_err_budget);
      }
    }
  }

  const double ratio = detail::relative_im_error(best_alpha, best.beta, dalpha, dbeta);
  if (ratio > rel_err_budget * (1.0 + 1e-9)) {
    throw InfeasibleBudget("max_usable_im_weak_value: no angle in the search box meets the error budget");
  }
  const double im = detail::weak_value_closed_form(best_alpha, best.beta).imag();
  const bool active = std::abs(ratio - rel_err_budget) <= 1e-6 * rel_err_budget;
  return {im, best.beta, best_alpha, ratio, active};
}

}  // namespace wva

#endif  // WVA_POLARIZATION_HPP
