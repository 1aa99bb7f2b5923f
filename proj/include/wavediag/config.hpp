// Plain-text `key = value` configuration files. '#' starts a comment.
#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wavediag/error.hpp"
#include "wavediag/signal.hpp"

namespace wavediag {

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t row = 0;
};

/// Entries in file order. Duplicate keys and lines without '=' are errors.
inline std::vector<ConfigEntry> parse_config(std::istream& in) {
  std::vector<ConfigEntry> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::string_view body = line;
    if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", row);
    std::string key(trim(body.substr(0, eq)));
    std::string value(trim(body.substr(eq + 1)));
    if (key.empty()) throw ParseError("empty key", row);
    if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", row);
    out.push_back({std::move(key), std::move(value), row});
  }
  return out;
}

inline std::vector<ConfigEntry> load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  try {
    return parse_config(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace wavediag
