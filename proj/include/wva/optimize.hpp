#ifndef WVA_OPTIMIZE_HPP
#define WVA_OPTIMIZE_HPP

#include <cmath>
#include <utility>

namespace wva::optimize {

struct ScalarOptimum {
  double x;
  double value;
  int iterations;
};

/// Golden-section search for the maximum of a unimodal f on [a, b].
/// Stops when the bracket is narrower than tol (absolute, in x).
template <class F>
ScalarOptimum golden_section_maximize(F&& f, double a, double b, double tol, int max_iterations = 500) {
  constexpr double inv_phi = 0.6180339887498948482;  // 1/phi
  if (a > b) std::swap(a, b);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  for (; it < max_iterations && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = fc >= fd ? c : d;
  return {x, fc >= fd ? fc : fd, it};
}

}  // namespace wva::optimize

#endif  // WVA_OPTIMIZE_HPP
