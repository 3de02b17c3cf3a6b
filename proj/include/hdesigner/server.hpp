#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <thread>

#include "hdesigner/library.hpp"
#include "hdesigner/pattern_json.hpp"
#include "hdesigner/transport.hpp"

namespace httplib {
class Server;
}

namespace hdesigner {

struct ServerConfig {
  std::string host = "0.0.0.0";
  int http_port = 8080;  ///< 0 binds an ephemeral port
  std::filesystem::path library_path = "hdesigner-library.json";
  /// Directory with the built web UI, mounted at "/". Empty disables it.
  std::string static_dir;
  TransportConfig transport;
};

/// Handler result, independent of the HTTP layer.
struct ApiResponse {
  int status = 200;
  json body;
};

/// Preview JSON: rendered channels and segments plus the exact PATTERN
/// payload ("wire") that play would transmit for the same spec.
json preview_json(const PatternSpec& spec);

/// HTTP backend. Every route delegates to one of the public handlers, which
/// tests may also call directly.
///
///   GET    /api/devices
///   POST   /api/render
///   POST   /api/devices/{id}/play[?realtime=1]
///   POST   /api/devices/{id}/stop
///   GET    /api/presets
///   GET    /api/presets/{name}
///   PUT    /api/presets/{name}
///   DELETE /api/presets/{name}
class ApiServer {
 public:
  explicit ApiServer(ServerConfig config);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Starts the UDP transport and the HTTP listener in the background.
  void start();
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

  int http_port() const noexcept { return bound_port_; }
  Transport& transport() noexcept { return transport_; }
  PresetLibrary& library() noexcept { return library_; }

  ApiResponse render_preview(std::string_view body);
  ApiResponse play(const std::string& device_id, std::string_view body, bool realtime);
  ApiResponse stop_device(const std::string& device_id);
  ApiResponse devices();
  ApiResponse list_presets();
  ApiResponse get_preset(const std::string& name);
  ApiResponse save_preset(const std::string& name, std::string_view body);
  ApiResponse delete_preset(const std::string& name);

 private:
  void install_routes();

  ServerConfig config_;
  Transport transport_;
  PresetLibrary library_;
  std::unique_ptr<httplib::Server> http_;
  std::thread http_thread_;
  int bound_port_ = 0;
};

}  // namespace hdesigner
