#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace disimpact {

/// Lowercase hex SHA-256 of a file's bytes. Throws Error(FileNotFound).
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

struct ManifestFile {
  /// As given on the command line for inputs; file name for outputs.
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string tool{"disimpact"};
  std::string version;
  std::string command;
  std::map<std::string, std::string> config;
  std::vector<ManifestFile> inputs;
  std::vector<ManifestFile> outputs;
};

/// Pretty-printed JSON with keys in a fixed order.
std::string manifest_json(const RunManifest& manifest);

}  // namespace disimpact
