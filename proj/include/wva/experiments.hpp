#ifndef WVA_EXPERIMENTS_HPP
#define WVA_EXPERIMENTS_HPP

// Config-driven experiments. Each writes one CSV (a `#` units line, then the
// column header, then data) and returns headline numbers for the report.
// CSV bytes depend only on the configuration, never on timing or threads.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "wva/config.hpp"
#include "wva/csv.hpp"
#include "wva/measurement.hpp"
#include "wva/parallel.hpp"
#include "wva/polarization.hpp"
#include "wva/serialize.hpp"
#include "wva/waveform.hpp"

namespace wva {

struct RunOptions {
  /// Output directory; empty means the config's `output` field, then ".".
  std::string out_dir;
  unsigned threads = 1;
  /// Echoed in the report. No experiment draws random numbers.
  std::uint64_t seed = 0;
};

struct RunReport {
  Experiment experiment;
  nlohmann::json input;
  /// Ordered by name so the report layout is stable.
  std::map<std::string, double> headline;
  std::vector<std::string> outputs;
  nlohmann::json outcomes = nlohmann::json::array();
  double wall_time_s = 0.0;
};

inline nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["experiment"] = std::string(to_string(r.experiment));
  j["input"] = r.input;
  nlohmann::json h = nlohmann::json::object();
  for (const auto& [k, v] : r.headline) h[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  j["headline"] = h;
  j["outputs"] = r.outputs;
  if (!r.outcomes.empty()) j["outcomes"] = r.outcomes;
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

namespace detail {

inline std::vector<double> linspace(const Range& r) {
  std::vector<double> v(r.points);
  for (std::size_t i = 0; i < r.points; ++i) {
    v[i] = r.min + (r.max - r.min) * static_cast<double>(i) / static_cast<double>(r.points - 1);
  }
  v.back() = r.max;
  return v;
}

inline std::vector<double> logspace(const Range& r) {
  std::vector<double> v(r.points);
  const double a = std::log10(r.min);
  const double b = std::log10(r.max);
  for (std::size_t i = 0; i < r.points; ++i) {
    v[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(r.points - 1));
  }
  v.front() = r.min;
  v.back() = r.max;
  return v;
}

class CsvFile {
public:
  CsvFile(const std::filesystem::path& path, const std::string& units, const std::string& header)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open `" + path.string() + "` for writing");
    out_ << "# " << units << "\n" << header << "\n";
  }
  std::ostream& stream() { return out_; }
  void row(std::initializer_list<double> values) { csv::write_row(out_, values); }
  std::string close() {
    out_.close();
    if (!out_) throw IoError("error while writing `" + path_.string() + "`");
    return path_.string();
  }

private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Distance between the outermost -3 dB points, linearly interpolated. The
/// reference level is the mean power within +-core of the centre, which
/// averages over the Fresnel ripple of a chirp.
inline double half_power_width(const Spectrum& s, double core) {
  const auto a = s.amplitudes();
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(s.offset(k)) <= core) {
      acc += std::norm(a[k]);
      ++n;
    }
  }
  if (n == 0) throw DomainError("half_power_width: empty reference band");
  const double level = 0.5 * acc / static_cast<double>(n);
  std::size_t lo = 0, hi = a.size() - 1;
  while (lo < hi && std::norm(a[lo]) < level) ++lo;
  while (hi > lo && std::norm(a[hi]) < level) --hi;
  auto cross = [&](std::size_t in, std::size_t out) {
    const double pi = std::norm(a[in]);
    const double po = std::norm(a[out]);
    const double f = (pi - level) / (pi - po);
    return s.offset(in) + f * (s.offset(out) - s.offset(in));
  };
  const double left = lo > 0 ? cross(lo, lo - 1) : s.offset(0);
  const double right = hi + 1 < a.size() ? cross(hi, hi + 1) : s.offset(a.size() - 1);
  return right - left;
}

inline void run_fig1(const ExperimentConfig& c, const std::filesystem::path& dir, RunReport& r) {
  const ChirpPulse p = c.chirp();
  const auto w = sample_waveform(p, c.grid());
  const Spectrum s = spectrum_fft(w);
  CsvFile f(dir / "fig1.csv", "omega [rad/s], re and im [s^(1/2)], power [s]", "omega,re,im,power");
  const auto a = s.amplitudes();
  for (std::size_t k = 0; k < a.size(); ++k) f.row({s.omega(k), a[k].real(), a[k].imag(), std::norm(a[k])});
  r.outputs.push_back(f.close());

  // Analytic spectrum against the FFT, over the whole grid and over the
  // plotted band |Omega| <= 2 Delta.
  const Spectrum ref = chirp_spectrum_analytic(p, s);
  double num = 0, den = 0, num_band = 0, den_band = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double e = std::norm(a[k] - ref.amplitudes()[k]);
    const double d = std::norm(ref.amplitudes()[k]);
    num += e;
    den += d;
    if (std::abs(s.offset(k)) <= 2.0 * p.delta()) {
      num_band += e;
      den_band += d;
    }
  }
  r.headline["total_power"] = spectral_moment(s, 0);
  r.headline["half_power_width"] = half_power_width(s, 0.5 * p.delta());
  r.headline["sweep_width_2delta"] = 2.0 * p.delta();
  r.headline["time_bandwidth"] = p.time_bandwidth();
  r.headline["analytic_l2_rel_error"] = std::sqrt(num / den);
  r.headline["analytic_l2_rel_error_2delta"] = std::sqrt(num_band / den_band);
}

inline constexpr double kFig2Dbeta[] = {0.1, 0.01, 0.001};

inline void run_fig2(const ExperimentConfig& c, const std::filesystem::path& dir, RunReport& r) {
  CsvFile f(dir / "fig2.csv", "beta_deg [deg], im_aw [1], sigma_im for dbeta = 0.1, 0.01, 0.001 deg [1]",
            "beta_deg,im_aw,sigma_im_0p1,sigma_im_0p01,sigma_im_0p001");
  const auto betas = linspace(c.beta_deg);
  for (double bdeg : betas) {
    SelectorConfig s = c.selector;
    s.beta = deg_to_rad(bdeg);
    double sig[3];
    double im = 0;
    for (int i = 0; i < 3; ++i) {
      s.dbeta = deg_to_rad(kFig2Dbeta[i]);
      const auto w = weak_value(s);
      im = w.value.imag();
      sig[i] = w.sigma_im;
    }
    f.row({bdeg, im, sig[0], sig[1], sig[2]});
  }
  r.outputs.push_back(f.close());
  r.headline["beta_points"] = static_cast<double>(betas.size());
}

inline void run_fig3(const ExperimentConfig& c, const std::filesystem::path& dir, unsigned threads, RunReport& r) {
  const auto dbetas = logspace(c.dbeta_deg);
  struct Row {
    double a, b;
  };
  const auto rows = parallel_map(dbetas.size(), threads, [&](std::size_t i) {
    const double db = deg_to_rad(dbetas[i]);
    return Row{max_usable_im_weak_value(db, c.selector.dalpha, 0.01).im_aw,
               max_usable_im_weak_value(db, c.selector.dalpha, 0.001).im_aw};
  });
  CsvFile f(dir / "fig3.csv", "dbeta_deg [deg], largest Im(A_w) within a 1% and 0.1% relative error [1]",
            "dbeta_deg,max_im_1pct,max_im_0p1pct");
  for (std::size_t i = 0; i < rows.size(); ++i) f.row({dbetas[i], rows[i].a, rows[i].b});
  r.outputs.push_back(f.close());
  const auto ref = max_usable_im_weak_value(deg_to_rad(0.01), c.selector.dalpha, 0.01);
  r.headline["max_im_at_0p01deg_1pct"] = ref.im_aw;
  r.headline["beta_star_deg_at_0p01deg_1pct"] = rad_to_deg(ref.beta_star);
}

/// Slope predicted by the first-order formulas on an ideal pointer.
inline double predicted_slope(const Pulse& p, Complex aw) {
  if (const auto* ch = std::get_if<ChirpPulse>(&p)) return -aw.real() + ch->time_bandwidth() / 3.0 * aw.imag();
  return -aw.real();
}

inline void run_slope(const ExperimentConfig& c, const std::filesystem::path& dir, unsigned threads, RunReport& r) {
  const Pulse p = c.pulse();
  const WeakValue aw = weak_value(c.selector);
  const auto eps = c.eps_sweep ? logspace(*c.eps_sweep) : default_eps_sweep(p, aw.value);
  const auto grid = c.grid();
  const auto exact = sweep_outcomes(p, c.selector, Method::exact, eps, threads, grid);
  const auto first = sweep_outcomes(p, c.selector, Method::first_order, eps, threads, grid);

  CsvFile f(dir / "slope.csv", "epsilon [1/s], mean frequencies [rad/s]", "epsilon,mean_freq_exact,mean_freq_first_order");
  std::vector<double> de(eps.size()), df(eps.size());
  double max_margin = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    f.row({eps[i], exact[i].mean_frequency, first[i].mean_frequency});
    de[i] = exact[i].frequency_shift;
    df[i] = first[i].frequency_shift;
    max_margin = std::max(max_margin, exact[i].regime_margin);
    r.outcomes.push_back(to_json(exact[i], c.selector, eps[i]));
    r.outcomes.push_back(to_json(first[i], c.selector, eps[i]));
  }
  r.outputs.push_back(f.close());

  const auto fe = fit_line(eps, de);
  const auto ff = fit_line(eps, df);
  r.headline["slope_exact"] = fe.slope;
  r.headline["r_squared_exact"] = fe.r_squared;
  r.headline["slope_first_order"] = ff.slope;
  r.headline["r_squared_first_order"] = ff.r_squared;
  r.headline["slope_predicted"] = predicted_slope(p, aw.value);
  r.headline["aw_re"] = aw.value.real();
  r.headline["aw_im"] = aw.value.imag();
  r.headline["max_regime_margin"] = max_margin;
  r.headline["postselect_probability"] = postselection_overlap(c.selector);
}

inline void run_regime_scan(const ExperimentConfig& c, const std::filesystem::path& dir, unsigned threads,
                            RunReport& r) {
  const Pulse p = c.chirp();
  const Complex aw = weak_value(c.selector).value;
  const auto margins = logspace(c.margin);
  const auto grid = c.grid();
  CsvFile f(dir / "regime.csv", "margin_max [1], eps_max [1/s], slope_exact [1], r_squared [1]",
            "margin_max,eps_max,slope_exact,r_squared");
  double r2_first = 0, r2_last = 0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    // default_eps_sweep tops out at 90% of the requested margin.
    const auto eps = default_eps_sweep(p, aw, 8, margins[i] / 0.9);
    const auto fit = amplification_slope(p, c.selector, Method::exact, eps, threads, grid);
    f.row({margins[i], eps.back(), fit.slope, fit.r_squared});
    if (i == 0) r2_first = fit.r_squared;
    r2_last = fit.r_squared;
  }
  r.outputs.push_back(f.close());
  r.headline["r_squared_smallest_margin"] = r2_first;
  r.headline["r_squared_largest_margin"] = r2_last;
}

}  // namespace detail

/// Runs one experiment and writes its CSV into the output directory.
/// DomainError from the numerics is rethrown with the experiment name.
inline RunReport run_experiment(const ExperimentConfig& c, const RunOptions& opts = {}) {
  const auto start = std::chrono::steady_clock::now();
  RunReport r{c.experiment, to_json(c), {}, {}, nlohmann::json::array(), 0.0};
  r.input["seed"] = opts.seed;
  r.input["threads"] = opts.threads;

  const std::filesystem::path dir = !opts.out_dir.empty() ? opts.out_dir : (!c.output.empty() ? c.output : ".");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory `" + dir.string() + "`: " + ec.message());

  const unsigned threads = std::max(1u, opts.threads);
  try {
    switch (c.experiment) {
      case Experiment::fig1_spectrum: detail::run_fig1(c, dir, r); break;
      case Experiment::fig2_error_bands: detail::run_fig2(c, dir, r); break;
      case Experiment::fig3_max_im: detail::run_fig3(c, dir, threads, r); break;
      case Experiment::gaussian_slope:
      case Experiment::chirp_slope: detail::run_slope(c, dir, threads, r); break;
      case Experiment::regime_scan: detail::run_regime_scan(c, dir, threads, r); break;
    }
  } catch (const DomainError& e) {
    throw DomainError(std::string(to_string(c.experiment)) + ": " + e.what());
  }
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace wva

#endif  // WVA_EXPERIMENTS_HPP
