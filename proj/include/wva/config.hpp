#ifndef WVA_CONFIG_HPP
#define WVA_CONFIG_HPP

// Experiment configuration.
//
// Primary format: one `key = value` pair per line, `#` starts a comment.
// A file whose first non-blank character is `{` is read as a flat JSON
// object with the same keys instead.
//
// Fields labelled _hz are taken literally as angular frequencies in s^-1
// (omega0_hz = 1e10 means omega0 = 1e10 rad/s). Angles are read in degrees
// and stored in radians.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wva/error.hpp"
#include "wva/polarization.hpp"
#include "wva/waveform.hpp"

namespace wva {

enum class Experiment { fig1_spectrum, fig2_error_bands, fig3_max_im, gaussian_slope, chirp_slope, regime_scan };

inline constexpr std::pair<Experiment, std::string_view> kExperimentNames[] = {
    {Experiment::fig1_spectrum, "fig1_spectrum"}, {Experiment::fig2_error_bands, "fig2_error_bands"},
    {Experiment::fig3_max_im, "fig3_max_im"},     {Experiment::gaussian_slope, "gaussian_slope"},
    {Experiment::chirp_slope, "chirp_slope"},     {Experiment::regime_scan, "regime_scan"},
};

inline std::string_view to_string(Experiment e) {
  for (const auto& [k, v] : kExperimentNames)
    if (k == e) return v;
  return "?";
}

inline bool is_slope_experiment(Experiment e) {
  return e == Experiment::gaussian_slope || e == Experiment::chirp_slope || e == Experiment::regime_scan;
}

struct Range {
  double min;
  double max;
  std::size_t points;
};

/// Fully resolved configuration; SI units and radians throughout.
struct ExperimentConfig {
  Experiment experiment = Experiment::fig1_spectrum;

  double omega0 = 1e10;
  double tau = 1e-5;
  double chirp_rate = 1e13;

  SelectorConfig selector;
  /// Targets the selector was derived from, when given that way.
  std::optional<double> im_aw;
  std::optional<double> re_aw;

  std::optional<Range> eps_sweep;

  std::optional<std::size_t> grid_n;
  std::optional<double> grid_window_factor;

  Range beta_deg{0.05, 20.0, 400};
  Range dbeta_deg{1e-4, 1e-2, 41};
  /// Regime scan: largest regime margin of each sweep.
  Range margin{0.01, 100.0, 9};

  std::string output = "";

  ChirpPulse chirp() const { return ChirpPulse(omega0, tau, chirp_rate); }
  GaussianPulse gaussian() const { return GaussianPulse(omega0, tau); }
  Pulse pulse() const {
    if (experiment == Experiment::gaussian_slope) return gaussian();
    return chirp();
  }
  GridSpec grid() const {
    const Pulse p = pulse();
    GridSpec g = default_grid(p);
    // The figure needs the spectral shape only; 2^14 points resolve it.
    if (experiment == Experiment::fig1_spectrum) g.n = std::size_t{1} << 14;
    if (grid_n) g.n = *grid_n;
    if (grid_window_factor) g.window = *grid_window_factor * tau;
    return g;
  }
};

namespace detail {

struct RawEntry {
  std::string value;
  int line;
};

using RawConfig = std::map<std::string, RawEntry, std::less<>>;

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline RawConfig parse_key_value(std::string_view text) {
  RawConfig raw;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected `key = value`", line_no);
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (raw.contains(key)) throw ConfigError("duplicate field `" + std::string(key) + "`", line_no);
    raw.emplace(std::string(key), RawEntry{std::string(value), line_no});
  }
  return raw;
}

inline RawConfig parse_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto upto = text.substr(0, std::min<std::size_t>(e.byte, text.size()));
    const int line = 1 + static_cast<int>(std::count(upto.begin(), upto.end(), '\n'));
    throw ConfigError(std::string("malformed JSON: ") + e.what(), line);
  }
  if (!j.is_object()) throw ConfigError("JSON config must be an object");
  RawConfig raw;
  for (const auto& [key, v] : j.items()) {
    std::string s;
    if (v.is_string()) {
      s = v.get<std::string>();
    } else if (v.is_number()) {
      s = v.dump();
    } else {
      throw ConfigError("field `" + key + "` must be a number or a string");
    }
    raw.emplace(key, RawEntry{s, 0});
  }
  return raw;
}

inline double to_number(const std::string& key, const RawEntry& e) {
  double x = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  if (!e.value.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || !std::isfinite(x)) {
    throw ConfigError("field `" + key + "`: `" + e.value + "` is not a finite number", e.line);
  }
  return x;
}

inline std::size_t to_count(const std::string& key, const RawEntry& e) {
  const double x = to_number(key, e);
  if (x < 1.0 || x != std::floor(x) || x > 1e9) {
    throw ConfigError("field `" + key + "` must be a positive integer", e.line);
  }
  return static_cast<std::size_t>(x);
}

class Reader {
public:
  explicit Reader(RawConfig raw) : raw_(std::move(raw)) {}

  const RawEntry* find(std::string_view key) {
    used_.emplace_back(key);
    const auto it = raw_.find(key);
    return it == raw_.end() ? nullptr : &it->second;
  }

  std::optional<double> number(std::string_view key) {
    const auto* e = find(key);
    if (!e) return std::nullopt;
    return to_number(std::string(key), *e);
  }

  std::optional<std::size_t> count(std::string_view key) {
    const auto* e = find(key);
    if (!e) return std::nullopt;
    return to_count(std::string(key), *e);
  }

  int line(std::string_view key) const {
    const auto it = raw_.find(key);
    return it == raw_.end() ? 0 : it->second.line;
  }

  void reject_unknown() const {
    for (const auto& [key, e] : raw_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        throw ConfigError("unknown field `" + key + "`", e.line);
      }
    }
  }

private:
  RawConfig raw_;
  std::vector<std::string> used_;
};

inline void require_positive(Reader& r, std::string_view key, double v) {
  if (!(v > 0.0)) throw ConfigError("field `" + std::string(key) + "` must be positive", r.line(key));
}

inline Range read_range(Reader& r, std::string_view prefix, std::string_view unit, Range def, bool log_scale) {
  const std::string p(prefix);
  const std::string lo_key = p + "_min" + std::string(unit);
  const std::string hi_key = p + "_max" + std::string(unit);
  const std::string n_key = p + "_points";
  Range out = def;
  if (auto v = r.number(lo_key)) out.min = *v;
  if (auto v = r.number(hi_key)) out.max = *v;
  if (auto v = r.count(n_key)) out.points = *v;
  if (log_scale || out.min < 0.0) {
    if (!(out.min > 0.0)) throw ConfigError("field `" + lo_key + "` must be positive", r.line(lo_key));
  }
  if (!(out.max > out.min)) throw ConfigError("`" + hi_key + "` must exceed `" + lo_key + "`", r.line(hi_key));
  if (out.points < 2) throw ConfigError("`" + n_key + "` must be at least 2", r.line(n_key));
  return out;
}

}  // namespace detail

/// Resolves a parsed key/value table into a validated configuration.
inline ExperimentConfig resolve_config(detail::RawConfig raw) {
  detail::Reader r(std::move(raw));
  ExperimentConfig c;

  const auto* exp = r.find("experiment");
  if (!exp) throw ConfigError("missing required field `experiment`");
  bool known = false;
  for (const auto& [k, name] : kExperimentNames) {
    if (exp->value == name) {
      c.experiment = k;
      known = true;
    }
  }
  if (!known) throw ConfigError("unknown experiment `" + exp->value + "`", exp->line);

  if (auto v = r.number("omega0_hz")) c.omega0 = *v;
  if (auto v = r.number("tau_s")) c.tau = *v;
  detail::require_positive(r, "omega0_hz", c.omega0);
  detail::require_positive(r, "tau_s", c.tau);

  const auto rate = r.number("chirp_rate_hz_per_s");
  const auto bw = r.number("bandwidth_hz");
  if (rate && bw) {
    throw ConfigError("give either `chirp_rate_hz_per_s` or `bandwidth_hz`, not both", r.line("bandwidth_hz"));
  }
  if (rate) c.chirp_rate = *rate;
  if (bw) {
    detail::require_positive(r, "bandwidth_hz", *bw);
    c.chirp_rate = *bw / c.tau;
  }
  detail::require_positive(r, "chirp_rate_hz_per_s", c.chirp_rate);

  const auto alpha = r.number("alpha_deg");
  const auto beta = r.number("beta_deg");
  c.im_aw = r.number("im_aw");
  c.re_aw = r.number("re_aw");
  if (c.im_aw && c.re_aw) throw ConfigError("give either `im_aw` or `re_aw`, not both", r.line("re_aw"));
  if ((c.im_aw || c.re_aw) && (alpha || beta)) {
    throw ConfigError("a weak-value target (`im_aw`/`re_aw`) excludes `alpha_deg`/`beta_deg`",
                      r.line(c.im_aw ? "im_aw" : "re_aw"));
  }
  try {
    if (c.im_aw) {
      c.selector.alpha = 0.0;
      c.selector.beta = beta_for_im_weak_value(*c.im_aw);
    } else if (c.re_aw) {
      c.selector.alpha = alpha_for_real_weak_value(*c.re_aw);
      c.selector.beta = 0.0;
    } else {
      c.selector.alpha = deg_to_rad(alpha.value_or(0.0));
      c.selector.beta = deg_to_rad(beta.value_or(0.0));
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), r.line(c.im_aw ? "im_aw" : "re_aw"));
  }
  if (auto v = r.number("dalpha_deg")) c.selector.dalpha = deg_to_rad(*v);
  if (auto v = r.number("dbeta_deg")) c.selector.dbeta = deg_to_rad(*v);
  if (c.selector.dalpha < 0.0) throw ConfigError("`dalpha_deg` must be non-negative", r.line("dalpha_deg"));
  if (c.selector.dbeta < 0.0) throw ConfigError("`dbeta_deg` must be non-negative", r.line("dbeta_deg"));

  const bool any_sweep = r.find("eps_min_hz") || r.find("eps_max_hz") || r.find("eps_points");
  if (any_sweep) {
    const int line = std::max({r.line("eps_min_hz"), r.line("eps_max_hz"), r.line("eps_points")});
    if (c.experiment != Experiment::gaussian_slope && c.experiment != Experiment::chirp_slope) {
      throw ConfigError("an eps sweep applies only to gaussian_slope and chirp_slope", line);
    }
    if (!r.find("eps_min_hz") || !r.find("eps_max_hz")) {
      throw ConfigError("an eps sweep needs both `eps_min_hz` and `eps_max_hz`", line);
    }
    c.eps_sweep = detail::read_range(r, "eps", "_hz", {0.0, 0.0, 8}, true);
  }

  c.grid_n = r.count("grid_n");
  if (c.grid_n && (*c.grid_n < 16 || (*c.grid_n & (*c.grid_n - 1)) != 0)) {
    throw ConfigError("`grid_n` must be a power of two, at least 16", r.line("grid_n"));
  }
  c.grid_window_factor = r.number("grid_window_factor");
  if (c.grid_window_factor) detail::require_positive(r, "grid_window_factor", *c.grid_window_factor);

  c.beta_deg = detail::read_range(r, "beta", "_deg", c.beta_deg, false);
  c.dbeta_deg = detail::read_range(r, "dbeta", "_deg", c.dbeta_deg, true);
  c.margin = detail::read_range(r, "margin", "", c.margin, true);

  if (const auto* o = r.find("output")) c.output = o->value;

  r.reject_unknown();

  if (is_slope_experiment(c.experiment)) {
    if (postselection_overlap(c.selector) < detail::kSingularOverlap) {
      const int line = std::max(r.line("alpha_deg"), r.line("beta_deg"));
      throw ConfigError("alpha = beta = 0 makes the weak value singular; choose another selector", line);
    }
    if (c.eps_sweep && c.eps_sweep->points < 5) {
      throw ConfigError("a slope fit needs `eps_points` >= 5", r.line("eps_points"));
    }
  }
  return c;
}

inline ExperimentConfig parse_config(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return resolve_config(detail::parse_json(text));
  return resolve_config(detail::parse_key_value(text));
}

/// Reads and resolves a config file. IoError if unreadable, ConfigError if
/// invalid.
inline ExperimentConfig validate_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file `" + path + "`");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading `" + path + "`");
  return parse_config(ss.str());
}

inline nlohmann::json to_json(const Range& r) { return {{"min", r.min}, {"max", r.max}, {"points", r.points}}; }

/// Resolved configuration, SI units and radians.
inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["omega0"] = c.omega0;
  j["tau"] = c.tau;
  j["chirp_rate"] = c.chirp_rate;
  j["alpha_rad"] = c.selector.alpha;
  j["beta_rad"] = c.selector.beta;
  j["dalpha_rad"] = c.selector.dalpha;
  j["dbeta_rad"] = c.selector.dbeta;
  if (c.im_aw) j["im_aw"] = *c.im_aw;
  if (c.re_aw) j["re_aw"] = *c.re_aw;
  if (c.eps_sweep) j["eps_sweep"] = to_json(*c.eps_sweep);
  const auto g = c.grid();
  j["grid"] = {{"n", g.n}, {"window", g.window}};
  j["beta_deg"] = to_json(c.beta_deg);
  j["dbeta_deg"] = to_json(c.dbeta_deg);
  j["margin"] = to_json(c.margin);
  j["output"] = c.output;
  return j;
}

}  // namespace wva

#endif  // WVA_CONFIG_HPP
