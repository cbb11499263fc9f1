#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "disimpact/core.hpp"

namespace disimpact {

/// Settings shared by every command, read from a flat key=value file.
struct RunConfig {
  IndexConfig index;
  int max_lag{3};
  std::size_t min_group_size{1};

  /// Throws Error(InvalidConfig) with the offending key.
  void validate() const;

  /// Sets one key from its text form. Throws Error(InvalidConfig) for
  /// unknown keys and unparsable values.
  void set(std::string_view key, std::string_view value);

  /// Every key with its current value.
  std::map<std::string, std::string> snapshot() const;
};

/// key=value lines; blank lines and lines starting with '#' are ignored.
/// Throws Error(InvalidConfig) on a line without '='.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Defaults overlaid with the file at `path`. Throws Error(FileNotFound).
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace disimpact
