#ifndef WVA_SPECFUN_HPP
#define WVA_SPECFUN_HPP

// Error function of a complex argument.
//
// The first quadrant is evaluated directly; the other three follow from
// erf(-z) = -erf(z) and erf(conj z) = conj erf(z), so both symmetries hold
// bit-for-bit. Inside the quadrant:
//
//   |z| <= kSeriesRadius                     Maclaurin series, extended precision
//   |z| <  kStripRadius, Re z < kStripWidth  Maclaurin series (the strip hugging
//                                            the imaginary axis, where the
//                                            continued fraction converges slowly)
//   otherwise                                erf = 1 - exp(-z^2) w(iz) with the
//                                            Laplace continued fraction for w
//
// Accuracy is ~1e-14 relative across |z| <= 1e4 wherever the result is
// representable. Results that overflow a double raise DomainError.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "wva/error.hpp"

namespace wva {

using Complex = std::complex<double>;

namespace specfun {

namespace detail {

inline constexpr double kSeriesRadius = 4.0;
inline constexpr double kStripRadius = 8.0;
inline constexpr double kStripWidth = 2.0;

static_assert(std::numeric_limits<long double>::digits >= 64,
              "the Maclaurin branch needs an extended-precision long double");

// 2/sqrt(pi) * sum_n (-1)^n z^(2n+1) / (n! (2n+1)); x, y >= 0.
inline Complex erf_maclaurin(double x, double y) {
  using Real = long double;
  using C = std::complex<Real>;
  const C z(x, y);
  // Raw component arithmetic; std::complex<long double> multiply goes through
  // the Annex G slow path.
  const Real zr2 = z.real() * z.real() - z.imag() * z.imag();
  const Real zi2 = 2 * z.real() * z.imag();
  Real tr = z.real(), ti = z.imag();  // (-1)^n z^(2n+1) / n!
  Real sr = tr, si = ti;
  const Real r2 = z.real() * z.real() + z.imag() * z.imag();
  for (int n = 1; n < 4000; ++n) {
    const Real nr = -(tr * zr2 - ti * zi2) / n;
    const Real ni = -(tr * zi2 + ti * zr2) / n;
    tr = nr;
    ti = ni;
    const Real cr = tr / (2 * n + 1), ci = ti / (2 * n + 1);
    sr += cr;
    si += ci;
    if (n > r2 && std::hypot(cr, ci) <= 1e-21L * std::hypot(sr, si)) break;
  }
  const Real scale = 2 / std::sqrt(std::numbers::pi_v<Real>);
  return {static_cast<double>(sr * scale), static_cast<double>(si * scale)};
}

// Faddeeva w(zeta) = exp(-zeta^2) erfc(-i zeta) for Im zeta >= 0 via the
// Laplace continued fraction  i/sqrt(pi) / (zeta - (1/2)/(zeta - 1/(zeta - ...))),
// evaluated forward with the modified Lentz scheme.
inline Complex faddeeva_cf(Complex zeta) {
  constexpr double tiny = 1e-300;
  Complex f = zeta;
  Complex c = f;
  Complex d = 0.0;
  for (int k = 1; k < 5000; ++k) {
    const double a = -0.5 * k;
    d = zeta + a * d;
    c = zeta + a / c;
    if (d == 0.0) d = tiny;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const Complex delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return Complex(0.0, 1.0 / std::sqrt(std::numbers::pi)) / f;
}

// exp(-(x + iy)^2) with the phase 2xy carried in two parts so that large
// arguments keep their phase accuracy.
inline Complex exp_minus_square(double x, double y) {
  const double re = (y - x) * (y + x);
  const double p = x * y;
  const double e = std::fma(x, y, -p);
  const double s = std::sin(2 * p);
  const double c = std::cos(2 * p);
  const double mag = std::exp(re);
  return {mag * (c - 2 * e * s), -mag * (s + 2 * e * c)};
}

// First quadrant, x, y >= 0.
inline Complex erf_first_quadrant(double x, double y) {
  const double r = std::hypot(x, y);
  if (r <= kSeriesRadius || (r < kStripRadius && x < kStripWidth)) {
    return erf_maclaurin(x, y);
  }
  const Complex erfc = exp_minus_square(x, y) * faddeeva_cf(Complex(-y, x));
  return 1.0 - erfc;
}

}  // namespace detail

/// Gaussian error function of a complex argument.
///
/// Throws DomainError for non-finite input or when the result is not
/// representable (|erf z| ~ exp(Im(z)^2 - Re(z)^2) overflows).
inline Complex erf_complex(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("erf_complex: non-finite argument");
  }
  const bool negate = std::signbit(z.real());
  if (negate) z = -z;
  const bool conjugate = std::signbit(z.imag());
  Complex w = detail::erf_first_quadrant(z.real(), std::abs(z.imag()));
  if (z.imag() == 0.0) w.imag(0.0);
  if (z.real() == 0.0) w.real(0.0);
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
    throw DomainError("erf_complex: result overflows a double");
  }
  if (conjugate) w = std::conj(w);
  return negate ? -w : w;
}

/// Principal square root of i*R, i.e. sqrt(R) * exp(i pi/4) for R > 0.
inline Complex sqrt_i(double chirp_rate) {
  return std::sqrt(Complex(0.0, chirp_rate));
}

/// erf(x / (2 sqrt(iR))) with the principal branch of the square root.
inline Complex erf_sqrt_i_scaled(double x, double chirp_rate) {
  if (!(chirp_rate > 0.0) || !std::isfinite(chirp_rate)) {
    throw DomainError("erf_sqrt_i_scaled: chirp rate must be positive and finite");
  }
  return erf_complex(x / (2.0 * sqrt_i(chirp_rate)));
}

}  // namespace specfun
}  // namespace wva

#endif  // WVA_SPECFUN_HPP
