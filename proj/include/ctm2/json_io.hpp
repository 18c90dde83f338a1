#pragma once

// Strict JSON reading helpers shared by the catalog, assessment and report
// codecs. Every document is an ordered_json so serialized key order follows
// field declaration order.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ctm2/error.hpp"

namespace ctm2 {

using Json = nlohmann::ordered_json;

namespace json_io {

inline std::string line_column(std::string_view source, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < source.size() && i + 1 < byte; ++i) {
    if (source[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return std::to_string(line) + ":" + std::to_string(column);
}

inline Json parse_document(std::string_view source, std::string_view what) {
  try {
    return Json::parse(source.begin(), source.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string(what) + ": syntax error at " +
                                      line_column(source, e.byte) + ": " +
                                      e.what());
  }
}

// Canonical text form: two-space indent, trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

[[noreturn]] inline void type_mismatch(const std::string& path,
                                       std::string_view expected,
                                       const Json& got) {
  throw Error(ErrorCode::Parse, path + ": type mismatch, expected " +
                                    std::string(expected) + ", got " +
                                    got.type_name());
}

inline std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) type_mismatch(path, "string", j);
  return j.get<std::string>();
}

inline long long as_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) type_mismatch(path, "integer", j);
  return j.get<long long>();
}

inline const Json& as_array(const Json& j, const std::string& path) {
  if (!j.is_array()) type_mismatch(path, "array", j);
  return j;
}

inline const Json& as_object(const Json& j, const std::string& path) {
  if (!j.is_object()) type_mismatch(path, "object", j);
  return j;
}

// View over a JSON object that rejects keys outside `allowed`.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path,
               std::initializer_list<std::string_view> allowed)
      : json_(as_object(j, path.empty() ? "<root>" : path)),
        path_(std::move(path)) {
    for (const auto& item : json_.items()) {
      if (std::find(allowed.begin(), allowed.end(), item.key()) ==
          allowed.end()) {
        throw Error(ErrorCode::Parse,
                    join(path_, item.key()) + ": unknown field '" +
                        item.key() + "'");
      }
    }
  }

  bool has(std::string_view key) const {
    return json_.contains(std::string(key));
  }

  const Json& at(std::string_view key) const {
    auto it = json_.find(std::string(key));
    if (it == json_.end()) {
      throw Error(ErrorCode::Parse,
                  path(key) + ": missing required field '" +
                      std::string(key) + "'");
    }
    return *it;
  }

  std::string path(std::string_view key) const { return join(path_, key); }

  std::string string(std::string_view key) const {
    return as_string(at(key), path(key));
  }

  long long integer(std::string_view key) const {
    return as_int(at(key), path(key));
  }

  const Json& array(std::string_view key) const {
    return as_array(at(key), path(key));
  }

  const Json& object(std::string_view key) const {
    return as_object(at(key), path(key));
  }

  std::vector<std::string> strings(std::string_view key) const {
    std::vector<std::string> out;
    const auto& arr = array(key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(as_string(arr[i], index(path(key), i)));
    }
    return out;
  }

 private:
  const Json& json_;
  std::string path_;
};

}  // namespace json_io
}  // namespace ctm2
