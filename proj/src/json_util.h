#ifndef SLOWFAST_SRC_JSON_UTIL_H_
#define SLOWFAST_SRC_JSON_UTIL_H_

#include <initializer_list>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "slowfast/error.h"

namespace slowfast::detail {

using nlohmann::json;

inline void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw InvalidInputError(where + ": expected a JSON object");
}

// Rejects keys outside the allowed set.
inline void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
  require_object(j, where);
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || key == a;
    if (!ok) throw InvalidInputError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw InvalidInputError(where + ": " + e.what());
  }
}

template <typename T>
T get_required(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw InvalidInputError(where + ": missing " + key);
  return get_as<T>(*it, where + "." + key);
}

// Reads j[key] into out when present.
template <typename T>
void read_opt(const json& j, const char* key, T& out, const std::string& where) {
  if (auto it = j.find(key); it != j.end()) {
    out = get_as<T>(*it, where + "." + key);
  }
}

}  // namespace slowfast::detail

#endif  // SLOWFAST_SRC_JSON_UTIL_H_
