#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "softtile/error.hpp"

namespace softtile {

using Json = nlohmann::json;

namespace detail {

inline std::string json_child(const std::string& path, std::string_view key) { return path + "/" + std::string(key); }
inline std::string json_child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

[[noreturn]] inline void json_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Parse, "at \"" + (path.empty() ? std::string("/") : path) + "\": " + what);
}

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("malformed JSON: ") + e.what());
  }
}

inline const Json& json_object(const Json& j, const std::string& path) {
  if (!j.is_object()) json_fail(path, "expected an object");
  return j;
}

inline const Json& json_field(const Json& j, const std::string& path, std::string_view key) {
  json_object(j, path);
  const auto it = j.find(key);
  if (it == j.end()) json_fail(json_child(path, key), "missing required key");
  return *it;
}

inline const Json* json_optional(const Json& j, const std::string& path, std::string_view key) {
  json_object(j, path);
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double json_number(const Json& j, const std::string& path) {
  if (!j.is_number()) json_fail(path, "expected a number");
  return j.get<double>();
}

inline int json_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) json_fail(path, "expected an integer");
  return j.get<int>();
}

inline bool json_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) json_fail(path, "expected true or false");
  return j.get<bool>();
}

inline std::string json_string(const Json& j, const std::string& path) {
  if (!j.is_string()) json_fail(path, "expected a string");
  return j.get<std::string>();
}

inline const Json& json_array(const Json& j, const std::string& path) {
  if (!j.is_array()) json_fail(path, "expected an array");
  return j;
}

inline void json_reject_unknown(const Json& j, const std::string& path, std::initializer_list<std::string_view> known) {
  json_object(j, path);
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || k == key;
    if (!ok) json_fail(json_child(path, key), "unknown key");
  }
}

/// Runs `f` and rewrites enum-conversion failures so they carry `path`.
template <class F>
auto json_enum(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Parse) throw;
    json_fail(path, e.what());
  }
}

}  // namespace detail
}  // namespace softtile
