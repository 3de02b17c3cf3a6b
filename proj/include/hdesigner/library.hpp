#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdesigner/pattern_json.hpp"
#include "hdesigner/presets.hpp"

namespace hdesigner {

inline constexpr int kLibraryVersion = 1;

class PresetConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PresetNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Library file is present but cannot be read back.
class LibraryFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {"version":1,"presets":[{"name":...,"spec":{...}}]}
json library_to_json(const std::vector<PresetEntry>& user_presets);
std::vector<PresetEntry> library_from_json(const json& j);

/// Writes `contents` to `path` through a temporary file and rename, so a
/// reader sees either the old or the new file, never a partial one.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// The palette: builtin catalog plus user presets persisted in one JSON file.
class PresetLibrary {
 public:
  explicit PresetLibrary(std::filesystem::path path);

  /// Builtins in catalog order, then user presets by name.
  std::vector<PresetEntry> list() const;
  std::optional<PresetEntry> get(const std::string& name) const;

  /// Returns true when a new preset was created, false on overwrite.
  /// Throws PresetConflict for builtin names.
  bool save(const std::string& name, const PatternSpec& spec);
  void remove(const std::string& name);

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  void persist() const;

  std::filesystem::path path_;
  mutable std::shared_mutex mutex_;
  std::vector<PresetEntry> user_;  // sorted by name
};

}  // namespace hdesigner
