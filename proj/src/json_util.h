#ifndef VNFCONS_SRC_JSON_UTIL_H_
#define VNFCONS_SRC_JSON_UTIL_H_

// Strict accessors over nlohmann::json used by every file loader.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "vnfcons/network.h"

namespace vnfcons::json_util {

inline std::string ReadFile(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline nlohmann::json ParseDocument(std::string_view text,
                                    const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

inline void RequireObject(const nlohmann::json& j, const std::string& what) {
  if (!j.is_object()) throw ParseError(what + ": expected an object");
}

inline void CheckKeys(const nlohmann::json& j,
                      std::initializer_list<std::string_view> allowed,
                      const std::string& what) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError(what + ": unknown key '" + key + "'");
  }
}

template <typename T>
T Get(const nlohmann::json& j, const std::string& key,
      const std::string& what) {
  if (!j.contains(key)) {
    throw ParseError(what + ": missing key '" + key + "'");
  }
  const nlohmann::json& v = j.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ParseError(what + ": '" + key + "' not bool");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) {
      throw ParseError(what + ": '" + key + "' not an integer");
    }
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ParseError(what + ": '" + key + "' not a number");
  } else {
    if (!v.is_string()) throw ParseError(what + ": '" + key + "' not a string");
  }
  return v.get<T>();
}

template <typename T>
T GetOr(const nlohmann::json& j, const std::string& key, T fallback,
        const std::string& what) {
  return j.contains(key) ? Get<T>(j, key, what) : fallback;
}

inline const nlohmann::json& GetArray(const nlohmann::json& j,
                                      const std::string& key,
                                      const std::string& what) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw ParseError(what + ": '" + key + "' must be an array");
  }
  return j.at(key);
}

// Names may be written as strings or integers.
inline std::string GetName(const nlohmann::json& j, const std::string& key,
                           const std::string& what) {
  if (!j.contains(key)) {
    throw ParseError(what + ": missing key '" + key + "'");
  }
  const nlohmann::json& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError(what + ": '" + key + "' must be a string or integer");
}

// A number or the string "inf".
inline double GetBandwidth(const nlohmann::json& j, const std::string& key) {
  const nlohmann::json& v = j.at(key);
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return kInfinity;
    throw ParseError("'" + key + "' must be a number or \"inf\"");
  }
  if (!v.is_number()) throw ParseError("'" + key + "' must be a number");
  return v.get<double>();
}

}  // namespace vnfcons::json_util

#endif  // VNFCONS_SRC_JSON_UTIL_H_
