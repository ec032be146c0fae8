#ifndef WVA_SERIALIZE_HPP
#define WVA_SERIALIZE_HPP

#include <complex>

#include "json.hpp"
#include "wva/measurement.hpp"
#include "wva/polarization.hpp"

namespace wva {

inline nlohmann::json to_json(const WeakValue& w) {
  return {{"re", w.value.real()}, {"im", w.value.imag()}, {"sigma_re", w.sigma_re}, {"sigma_im", w.sigma_im}};
}

inline nlohmann::json to_json(const SelectorConfig& c) {
  return {{"alpha_rad", c.alpha}, {"beta_rad", c.beta}, {"dalpha_rad", c.dalpha}, {"dbeta_rad", c.dbeta}};
}

/// Absent optionals become null. An infinite regime margin (real weak value
/// on a chirp) is written as null as well, since JSON has no infinity.
inline nlohmann::json to_json(const MeasurementOutcome& o) {
  nlohmann::json j;
  j["method"] = to_string(o.method);
  j["mean_frequency"] = o.mean_frequency;
  j["frequency_shift"] = o.frequency_shift;
  j["postselect_probability"] = o.postselect_probability ? nlohmann::json(*o.postselect_probability) : nullptr;
  j["norm_first_order"] = o.norm_first_order ? nlohmann::json(*o.norm_first_order) : nullptr;
  j["linear_regime_ok"] = o.linear_regime_ok;
  j["regime_margin"] = std::isfinite(o.regime_margin) ? nlohmann::json(o.regime_margin) : nullptr;
  j["mean_time"] = o.mean_time ? nlohmann::json(*o.mean_time) : nullptr;
  return j;
}

/// Outcome together with the inputs that produced it.
inline nlohmann::json to_json(const MeasurementOutcome& o, const SelectorConfig& cfg, double epsilon) {
  auto j = to_json(o);
  j["input"] = {{"selector", to_json(cfg)}, {"epsilon", epsilon}};
  return j;
}

}  // namespace wva

#endif  // WVA_SERIALIZE_HPP
