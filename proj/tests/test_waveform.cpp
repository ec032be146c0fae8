#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "wva/waveform.hpp"

using namespace wva;

namespace {

const ChirpPulse kRadar(1e10, 1e-5, 1e13);
const GaussianPulse kGauss(1e10, 1e-5);

struct SpectrumError {
  double l2;
  double pointwise_in_band;
};

SpectrumError compare_with_analytic(const ChirpPulse& p, const Spectrum& s) {
  const Spectrum ref = chirp_spectrum_analytic(p, s);
  double num = 0, den = 0, worst = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Complex a = s.amplitudes()[k];
    const Complex b = ref.amplitudes()[k];
    num += std::norm(a - b);
    den += std::norm(b);
    // In band: away from the Fresnel transition at the band edges.
    if (std::abs(s.offset(k)) <= 0.9 * p.delta()) worst = std::max(worst, std::abs(a - b) / std::abs(b));
  }
  return {std::sqrt(num / den), worst};
}

}  // namespace

TEST(Pulses, RejectInvalidParameters) {
  EXPECT_THROW(GaussianPulse(1e10, -1e-5), DomainError);
  EXPECT_THROW(GaussianPulse(1e10, 0.0), DomainError);
  EXPECT_THROW(ChirpPulse(1e10, 1e-5, 0.0), DomainError);
  EXPECT_THROW(ChirpPulse(1e10, -1e-5, 1e13), DomainError);
}

TEST(Pulses, ChirpDeltaIsRateTimesTau) {
  EXPECT_EQ(kRadar.delta(), 1e13 * 1e-5);
  const auto p = ChirpPulse::from_half_bandwidth(1e10, 1e-5, 1e8);
  EXPECT_DOUBLE_EQ(p.chirp_rate(), 1e13);
}

TEST(Pulses, RectIncludesEndpoints) {
  EXPECT_EQ(rect(0.5), 1.0);
  EXPECT_EQ(rect(-0.5), 1.0);
  EXPECT_EQ(rect(0.5000001), 0.0);
}

TEST(SampleWaveform, GaussianPeakValue) {
  // Peak of the analytic envelope; the centred grid has no sample at t = 0.
  const double peak = 1.0 / (std::pow(2 * std::numbers::pi, 0.25) * std::sqrt(kGauss.tau()));
  EXPECT_NEAR(std::abs(kGauss.envelope(0.0)), peak, 1e-15 * peak);
  const auto w = sample_waveform(kGauss, default_grid(kGauss));
  const std::size_t mid = w.size() / 2;
  EXPECT_NEAR(w.time(mid), 0.5 * w.dt(), 1e-15 * w.window());
  EXPECT_NEAR(std::abs(w.samples()[mid]), std::abs(kGauss.envelope(w.time(mid))), 1e-15 * peak);
}

TEST(SampleWaveform, UnitNormOnGrid) {
  EXPECT_NEAR(time_moment(sample_waveform(kGauss, default_grid(kGauss)), 0), 1.0, 1e-10);
  EXPECT_NEAR(time_moment(sample_waveform(kRadar, default_grid(kRadar)), 0), 1.0, 1e-10);
  // Edges off the cell boundaries: still normalized.
  EXPECT_NEAR(time_moment(sample_waveform(kRadar, GridSpec{1 << 12, 3.3e-5}), 0), 1.0, 1e-10);
}

TEST(SampleWaveform, ChirpRectMagnitudeAndPhase) {
  const auto w = sample_waveform(kRadar, GridSpec{1 << 14, 4 * kRadar.tau()});
  const double h = 1.0 / std::sqrt(kRadar.tau());
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double t = w.time(j);
    const Complex s = w.samples()[j];
    if (std::abs(t) < kRadar.tau() / 2) {
      ASSERT_NEAR(std::abs(s), h, 1e-12 * h);
      const Complex expected = std::polar(1.0, kRadar.chirp_rate() * t * t);
      ASSERT_LT(std::abs(s / std::abs(s) - expected), 1e-9) << t;
    } else {
      ASSERT_EQ(s, Complex(0.0, 0.0)) << t;
    }
  }
}

TEST(SampleWaveform, WindowTooSmall) {
  EXPECT_THROW(sample_waveform(kRadar, GridSpec{1024, 0.5 * kRadar.tau()}), WindowTooSmall);
  EXPECT_THROW(sample_waveform(kGauss, GridSpec{1024, 8 * kGauss.tau()}), WindowTooSmall);
  EXPECT_THROW(sample_waveform(kGauss, GridSpec{1000, 16 * kGauss.tau()}), DomainError);
}

TEST(SampledWaveform, Invariants) {
  EXPECT_THROW(SampledWaveform(std::vector<Complex>(3), 1.0, 0.0, 0.0), DomainError);
  EXPECT_THROW(SampledWaveform(std::vector<Complex>(1), 1.0, 0.0, 0.0), DomainError);
  EXPECT_THROW(SampledWaveform(std::vector<Complex>(4, Complex(NAN, 0)), 1.0, 0.0, 0.0), DomainError);
  EXPECT_THROW(SampledWaveform(std::vector<Complex>(4), 0.0, 0.0, 0.0), DomainError);
}

TEST(SpectrumFft, ParsevalAndCarrier) {
  for (const Pulse& p : {Pulse{kGauss}, Pulse{kRadar}}) {
    const auto w = sample_waveform(p);
    const auto s = spectrum_fft(w);
    EXPECT_NEAR(spectral_moment(s, 0), time_moment(w, 0), 1e-8);
    EXPECT_EQ(s.omega_center(), 1e10);
    EXPECT_NEAR(s.omega(s.size() / 2), 1e10, 1e-6);
  }
}

TEST(SpectrumFft, GaussianWidthAndCentre) {
  const auto s = spectrum_fft(sample_waveform(kGauss));
  EXPECT_NEAR(mean_frequency(s), 1e10, 1e-6 * 1e10);
  EXPECT_NEAR(std::abs(mean_frequency(s) - 1e10), 0.0, 1e-6);
  EXPECT_NEAR(std::sqrt(spectral_variance(s)), 1.0 / (2 * kGauss.tau()), 1e-8 / kGauss.tau());
}

TEST(SpectrumFft, GaussianAnalyticPair) {
  // p~(W) = (2 tau^2 / pi)^(1/4) exp(-tau^2 W^2) for the centred Gaussian.
  // The 16 tau window clips the envelope at ~1e-7 of its peak, which bounds
  // the pointwise agreement.
  const auto s = spectrum_fft(sample_waveform(kGauss));
  const double tau = kGauss.tau();
  const double peak = std::pow(2 * tau * tau / std::numbers::pi, 0.25);
  for (std::size_t k = 0; k < s.size(); k += 97) {
    const double om = s.offset(k);
    const double expected = peak * std::exp(-tau * tau * om * om);
    ASSERT_NEAR(std::abs(s.amplitudes()[k] - expected), 0.0, 1e-8 * peak) << om;
  }
}

TEST(SpectrumFft, ShiftChangesPhaseOnly) {
  const GaussianPulse shifted(1e10, 1e-5, 1e-5);
  const auto a = spectrum_fft(sample_waveform(kGauss));
  const auto b = spectrum_fft(sample_waveform(shifted));
  for (std::size_t k = 0; k < a.size(); k += 101) {
    ASSERT_NEAR(std::norm(a.amplitudes()[k]), std::norm(b.amplitudes()[k]), 1e-12 * kGauss.tau());
  }
}

TEST(SpectrumFft, RadarChirpFlatOverSweep) {
  const auto s = spectrum_fft(sample_waveform(kRadar));
  const double flat = 1.0 / (2 * kRadar.delta());
  double mean = 0;
  int n = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (std::abs(s.offset(k)) < 0.8 * kRadar.delta()) {
      mean += std::norm(s.amplitudes()[k]);
      ++n;
      ASSERT_NEAR(std::norm(s.amplitudes()[k]), flat, 0.25 * flat);
    }
    if (std::abs(s.offset(k)) > 1.5 * kRadar.delta()) {
      ASSERT_LT(std::norm(s.amplitudes()[k]), 0.01 * flat);
    }
  }
  EXPECT_NEAR(mean / n, flat, 0.02 * flat);
}

TEST(ChirpAnalytic, CentreValue) {
  const Complex root = std::sqrt(Complex(0.0, kRadar.chirp_rate()));
  const Complex reference = 2.0 / std::sqrt(8 * kRadar.delta()) * specfun::erf_complex(kRadar.delta() / (2.0 * root));
  const Complex ours = chirp_spectrum_analytic(kRadar, kRadar.omega0());
  // Same magnitude; ours carries the e^{i pi/4} that aligns it with the FFT.
  EXPECT_NEAR(std::abs(ours - reference * std::polar(1.0, std::numbers::pi / 4)), 0.0, 1e-14 * std::abs(reference));
}

TEST(ChirpAnalytic, MatchesFftRadarDenseGrid) {
  const auto s = spectrum_fft(sample_waveform(kRadar, GridSpec{1 << 20, 4 * kRadar.tau()}));
  const auto e = compare_with_analytic(kRadar, s);
  EXPECT_LT(e.l2, 1e-3);
  EXPECT_LT(e.pointwise_in_band, 1e-2);
}

TEST(ChirpAnalytic, MatchesFftRandomTimeBandwidth) {
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const double tb = std::exp(std::log(10.0) + (std::log(2000.0) - std::log(10.0)) * u(g));
    const double tau = std::exp(std::log(1e-6) + (std::log(1e-4) - std::log(1e-6)) * u(g));
    const ChirpPulse p(1e10, tau, tb / (tau * tau));
    const auto s = spectrum_fft(sample_waveform(p));
    const auto e = compare_with_analytic(p, s);
    EXPECT_LT(e.l2, 1e-3) << "tau*Delta = " << tb;
    EXPECT_LT(e.pointwise_in_band, 1e-2) << "tau*Delta = " << tb;
  }
}

TEST(ChirpAnalytic, OutOfBandDecay) {
  // The tail ripples; its envelope (the maximum over each band) decays.
  auto band_max = [](double f0) {
    double m = 0.0;
    for (int i = 0; i < 400; ++i) {
      const double f = f0 + i / 400.0;
      m = std::max(m, std::abs(chirp_spectrum_analytic(kRadar, kRadar.omega0() + f * kRadar.delta())));
    }
    return m;
  };
  double prev = band_max(1.5);
  for (double f = 2.5; f <= 50.0; f += 1.0) {
    const double v = band_max(f);
    EXPECT_LT(v, prev) << f;
    prev = v;
  }
}

TEST(ChirpAnalytic, DelayIsPhaseOnly) {
  const double d = 2.5e-6;
  const ChirpPulse delayed(1e10, 1e-5, 1e13, d);
  const auto s = spectrum_fft(sample_waveform(delayed));
  EXPECT_LT(compare_with_analytic(delayed, s).l2, 1e-3);
}

TEST(RectApprox, Values) {
  EXPECT_NEAR(std::abs(chirp_spectrum_rect_approx(kRadar, kRadar.omega0()) - 1.0 / std::sqrt(2 * kRadar.delta())), 0.0,
              1e-18);
  EXPECT_EQ(chirp_spectrum_rect_approx(kRadar, kRadar.omega0() + 2 * kRadar.delta()), Complex(0.0, 0.0));
  for (double f : {-0.9, -0.3, 0.2, 0.7}) {
    const double om = f * kRadar.delta();
    const Complex v = chirp_spectrum_rect_approx(kRadar, kRadar.omega0() + om);
    const double expected = -om * om / (4 * kRadar.chirp_rate());
    EXPECT_NEAR(std::remainder(std::arg(v) - expected, 2 * std::numbers::pi), 0.0, 1e-9);
  }
}

TEST(RectApprox, AnalyticPhaseMatchesInBand) {
  // Away from the edges the Fresnel bracket tends to 2, leaving e^{i pi/4}.
  for (double f : {-0.5, -0.1, 0.3}) {
    const double om = kRadar.omega0() + f * kRadar.delta();
    const Complex ratio = chirp_spectrum_analytic(kRadar, om) / chirp_spectrum_rect_approx(kRadar, om);
    EXPECT_NEAR(std::abs(ratio), 1.0, 0.05);
    EXPECT_NEAR(std::arg(ratio), std::numbers::pi / 4, 0.05);
  }
}

TEST(RectApprox, InBandAgreementImprovesWithTimeBandwidth) {
  double prev = 1e300;
  for (double tb : {10.0, 100.0, 1000.0}) {
    const double tau = 1e-5;
    const ChirpPulse p(1e10, tau, tb / (tau * tau));
    const auto grid = tabulate_spectrum([&](double om) { return chirp_spectrum_analytic(p, om); }, p.omega0(),
                                        p.delta() / 2000, 4001);
    double num = 0, den = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double a = std::norm(grid.amplitudes()[k]);
      const double b = std::norm(chirp_spectrum_rect_approx(p, grid.omega(k)));
      num += (a - b) * (a - b);
      den += b * b;
    }
    const double err = std::sqrt(num / den);
    EXPECT_LT(err, prev) << tb;
    prev = err;
  }
}

TEST(RectApprox, CentralSecondMoment) {
  const auto s = tabulate_spectrum([](double om) { return chirp_spectrum_rect_approx(kRadar, om); }, kRadar.omega0(),
                                   kRadar.delta() / 20000, 40001);
  const double d = kRadar.delta();
  EXPECT_NEAR(spectral_variance(s), d * d / 3, 1e-3 * d * d / 3);
}

TEST(Moments, TimeMoments) {
  const auto g = sample_waveform(kGauss);
  EXPECT_NEAR(time_moment(g, 1) / kGauss.tau(), 0.0, 1e-10);
  EXPECT_NEAR(time_moment(g, 2), kGauss.tau() * kGauss.tau(), 1e-3 * kGauss.tau() * kGauss.tau());
  const auto c = sample_waveform(kRadar);
  const double t2 = kRadar.tau() * kRadar.tau() / 12;
  EXPECT_NEAR(time_moment(c, 2), t2, 1e-3 * t2);
  EXPECT_THROW(time_moment(c, 3), DomainError);
  EXPECT_THROW(spectral_moment(spectrum_fft(c), -1), DomainError);
}

TEST(Moments, TimeBandwidth) {
  EXPECT_NEAR(time_bandwidth_product(sample_waveform(kGauss)), 0.5, 0.005);
  // Chirp: grows linearly with tau*Delta (rms widths tau/sqrt 12 and Delta/sqrt 3).
  std::vector<double> tbp;
  const std::vector<double> tbs = {100.0, 200.0, 400.0, 800.0};
  for (double tb : tbs) {
    const double tau = 1e-5;
    const ChirpPulse p(1e10, tau, tb / (tau * tau));
    tbp.push_back(time_bandwidth_product(sample_waveform(p), 1.5 * p.delta()));
  }
  for (std::size_t i = 0; i < tbs.size(); ++i) {
    EXPECT_NEAR(tbp[i] / tbs[i], 1.0 / 6.0, 0.02) << tbs[i];
  }
}

TEST(TimeReversed, ReversesSweepAndKeepsPower) {
  const auto w = sample_waveform(kRadar);
  const auto r = time_reversed(w);
  EXPECT_NEAR(time_moment(r, 0), 1.0, 1e-12);
  const auto sw = spectrum_fft(w);
  const auto sr = spectrum_fft(r);
  // conj(b(-t)) has spectrum conj(p~(W)); power is unchanged.
  for (std::size_t k = 0; k < sw.size(); k += 211) {
    ASSERT_NEAR(std::norm(sw.amplitudes()[k]), std::norm(sr.amplitudes()[k]), 1e-9 * kRadar.tau());
  }
  const SampledWaveform off(std::vector<Complex>(8, 1.0), 1.0, 0.0, 0.0);
  EXPECT_THROW(time_reversed(off), DomainError);
}

TEST(SpectrumCsv, HeaderAndRows) {
  const auto s = tabulate_spectrum([](double) { return Complex(0.5, -0.25); }, 10.0, 1.0, 3);
  std::ostringstream out;
  write_spectrum_csv(out, s);
  EXPECT_EQ(out.str(),
            "# omega [rad/s], re and im [s^(1/2)], power [s]\n"
            "omega,re,im,power\n"
            "9,0.5,-0.25,0.3125\n"
            "10,0.5,-0.25,0.3125\n"
            "11,0.5,-0.25,0.3125\n");
}
