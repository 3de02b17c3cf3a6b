#include "hdesigner/library.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <fstream>
#include <sstream>
#include <system_error>

namespace hdesigner {

namespace {

bool is_builtin(const std::string& name) {
  const auto& b = builtin_presets();
  return std::any_of(b.begin(), b.end(), [&](const PresetEntry& p) { return p.name == name; });
}

void write_all(int fd, const std::string& data, const std::filesystem::path& path) {
  std::size_t done = 0;
  while (done < data.size()) {
    const auto n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::system_error(errno, std::generic_category(), "write " + path.string());
    }
    done += static_cast<std::size_t>(n);
  }
}

}  // namespace

json library_to_json(const std::vector<PresetEntry>& user_presets) {
  json presets = json::array();
  for (const auto& p : user_presets) presets.push_back({{"name", p.name}, {"spec", to_json(p.spec)}});
  return {{"version", kLibraryVersion}, {"presets", std::move(presets)}};
}

std::vector<PresetEntry> library_from_json(const json& j) {
  if (!j.is_object() || !j.contains("version") || !j.contains("presets"))
    throw LibraryFileError("library file lacks version/presets");
  if (j.at("version") != kLibraryVersion)
    throw LibraryFileError("unsupported library version " + j.at("version").dump());
  std::vector<PresetEntry> out;
  for (const auto& item : j.at("presets")) {
    if (!item.is_object() || !item.contains("name") || !item.at("name").is_string())
      throw LibraryFileError("preset entry without a name");
    try {
      out.push_back({item.at("name").get<std::string>(), pattern_from_json(item.at("spec")), false});
    } catch (const std::exception& e) {
      throw LibraryFileError("preset '" + item.at("name").get<std::string>() + "': " + e.what());
    }
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);

  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw std::system_error(errno, std::generic_category(), "open " + tmp.string());
  try {
    write_all(fd, contents, tmp);
    if (::fsync(fd) != 0) throw std::system_error(errno, std::generic_category(), "fsync " + tmp.string());
  } catch (...) {
    ::close(fd);
    ::unlink(tmp.c_str());
    throw;
  }
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    const int err = errno;
    ::unlink(tmp.c_str());
    throw std::system_error(err, std::generic_category(), "rename " + tmp.string());
  }
  // Make the rename itself durable.
  auto dir = path.parent_path();
  if (dir.empty()) dir = ".";
  const int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (dfd >= 0) {
    ::fsync(dfd);
    ::close(dfd);
  }
}

PresetLibrary::PresetLibrary(std::filesystem::path path) : path_(std::move(path)) {
  // Temp files from writes that were killed before their rename.
  std::error_code ec;
  const auto dir = path_.parent_path().empty() ? std::filesystem::path(".") : path_.parent_path();
  const auto prefix = path_.filename().string() + ".tmp.";
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.path().filename().string().rfind(prefix, 0) == 0) std::filesystem::remove(entry.path(), ec);
  }

  if (!std::filesystem::exists(path_)) return;
  std::ifstream in(path_);
  std::stringstream buf;
  buf << in.rdbuf();
  auto j = json::parse(buf.str(), nullptr, false);
  if (j.is_discarded()) throw LibraryFileError(path_.string() + " is not valid JSON");
  user_ = library_from_json(j);
  std::sort(user_.begin(), user_.end(),
            [](const PresetEntry& a, const PresetEntry& b) { return a.name < b.name; });
}

std::vector<PresetEntry> PresetLibrary::list() const {
  std::shared_lock lock(mutex_);
  auto out = builtin_presets();
  out.insert(out.end(), user_.begin(), user_.end());
  return out;
}

std::optional<PresetEntry> PresetLibrary::get(const std::string& name) const {
  for (const auto& p : builtin_presets()) {
    if (p.name == name) return p;
  }
  std::shared_lock lock(mutex_);
  for (const auto& p : user_) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

bool PresetLibrary::save(const std::string& name, const PatternSpec& spec) {
  if (name.empty()) throw ValidationError("name", "must not be empty");
  if (is_builtin(name)) throw PresetConflict("'" + name + "' is a builtin preset");
  validate(spec);

  std::unique_lock lock(mutex_);
  auto previous = user_;
  auto it = std::lower_bound(user_.begin(), user_.end(), name,
                             [](const PresetEntry& p, const std::string& n) { return p.name < n; });
  const bool created = it == user_.end() || it->name != name;
  if (created) user_.insert(it, {name, spec, false});
  else it->spec = spec;
  try {
    persist();
  } catch (...) {
    user_ = std::move(previous);
    throw;
  }
  return created;
}

void PresetLibrary::remove(const std::string& name) {
  if (is_builtin(name)) throw PresetConflict("'" + name + "' is a builtin preset");
  std::unique_lock lock(mutex_);
  auto it = std::find_if(user_.begin(), user_.end(), [&](const PresetEntry& p) { return p.name == name; });
  if (it == user_.end()) throw PresetNotFound("no preset named '" + name + "'");
  auto previous = user_;
  user_.erase(it);
  try {
    persist();
  } catch (...) {
    user_ = std::move(previous);
    throw;
  }
}

void PresetLibrary::persist() const { write_file_atomic(path_, library_to_json(user_).dump(2) + "\n"); }

}  // namespace hdesigner
