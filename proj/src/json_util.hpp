#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "aeroprint/instance.hpp"

namespace aeroprint::detail {

using ordered_json = nlohmann::ordered_json;

inline void require_keys(const ordered_json& obj, const std::string& where,
                         const std::vector<std::string>& required,
                         const std::vector<std::string>& optional = {}) {
  if (!obj.is_object()) throw SchemaError(where + " must be an object");
  for (const auto& key : required) {
    if (!obj.contains(key)) throw SchemaError(where + "." + key + " is missing");
  }
  for (const auto& item : obj.items()) {
    const std::string& k = item.key();
    if (std::find(required.begin(), required.end(), k) == required.end() &&
        std::find(optional.begin(), optional.end(), k) == optional.end()) {
      throw SchemaError(where + "." + k + " is not a known field");
    }
  }
}

inline double get_number(const ordered_json& obj, const std::string& where,
                         const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw SchemaError(where + "." + key + " must be a number");
  return v.get<double>();
}

inline int get_int(const ordered_json& obj, const std::string& where,
                   const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw SchemaError(where + "." + key + " must be an integer");
  }
  return v.get<int>();
}

inline ordered_json params_to_json(const MissionParams& p) {
  ordered_json j;
  j["tau_log_s"] = p.tau_log_s;
  j["tau_log_e"] = p.tau_log_e;
  j["v_ex"] = p.v_ex;
  j["r_c"] = p.r_c;
  j["beta"] = p.beta;
  j["g_ms"] = p.g_ms;
  j["g_im"] = p.g_im;
  j["g_ut"] = p.g_ut;
  j["delta"] = p.delta;
  return j;
}

inline MissionParams params_from_json(const ordered_json& j,
                                      const std::string& where) {
  require_keys(j, where,
               {"tau_log_s", "tau_log_e", "v_ex", "r_c", "beta", "g_ms", "g_im",
                "g_ut"},
               {"delta"});
  MissionParams p;
  p.tau_log_s = get_number(j, where, "tau_log_s");
  p.tau_log_e = get_number(j, where, "tau_log_e");
  p.v_ex = get_number(j, where, "v_ex");
  p.r_c = get_number(j, where, "r_c");
  p.beta = get_number(j, where, "beta");
  p.g_ms = get_number(j, where, "g_ms");
  p.g_im = get_number(j, where, "g_im");
  p.g_ut = get_number(j, where, "g_ut");
  if (j.contains("delta")) p.delta = get_number(j, where, "delta");
  return p;
}

}  // namespace aeroprint::detail
