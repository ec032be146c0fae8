#ifndef WVA_FFT_HPP
#define WVA_FFT_HPP

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <span>

namespace wva::fft {

namespace detail {

// FFTW's planner is not reentrant; execution with a private plan is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
public:
  Plan(std::span<std::complex<double>> data, int sign) {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, sign, FFTW_ESTIMATE);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }

  void execute() const { fftw_execute(plan_); }

private:
  fftw_plan plan_;
};

}  // namespace detail

/// In place, unnormalized: X_k = sum_j x_j exp(-2 pi i j k / N).
inline void forward(std::span<std::complex<double>> data) {
  detail::Plan(data, FFTW_FORWARD).execute();
}

/// In place, unnormalized: x_j = sum_k X_k exp(+2 pi i j k / N).
inline void backward(std::span<std::complex<double>> data) {
  detail::Plan(data, FFTW_BACKWARD).execute();
}

}  // namespace wva::fft

#endif  // WVA_FFT_HPP
