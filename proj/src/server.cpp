#include "hdesigner/server.hpp"

#include <httplib.h>

#include "hdesigner/payload.hpp"

namespace hdesigner {

namespace {

ApiResponse error(int status, std::string code, std::string message, std::string field = {}) {
  json body = {{"error", std::move(code)}, {"message", std::move(message)}};
  if (!field.empty()) body["field"] = std::move(field);
  return {status, std::move(body)};
}

ApiResponse invalid(const ValidationError& e) {
  return error(400, "E_INVALID", e.what(), e.field());
}

json delivery_json(const std::string& device_id, const DeliveryResult& r) {
  json j = {{"device_id", device_id},
            {"status", std::string(to_string(r.status))},
            {"attempts", r.attempts},
            {"seq", r.seq}};
  if (r.status == DeliveryStatus::Delivered) j["rtt_ms"] = r.rtt_ms;
  if (r.socket_errors > 0) j["socket_errors"] = r.socket_errors;
  return j;
}

ApiResponse delivery_response(const std::string& device_id, const DeliveryResult& r) {
  auto body = delivery_json(device_id, r);
  if (r.status == DeliveryStatus::Failed) {
    body["error"] = "E_DELIVERY_FAILED";
    body["message"] = "no confirmation from " + device_id + " after " + std::to_string(r.attempts) +
                      " attempts";
    return {502, std::move(body)};
  }
  return {200, std::move(body)};
}

json payload_json(const wire::PatternBody& body) {
  json channels = json::object();
  for (const auto& [ch, samples] : body.channels) channels[std::to_string(ch)] = samples;
  return {{"delta_ms", body.delta_ms},
          {"repeat", body.repeat},
          {"delay_ms", body.delay_ms},
          {"channels", std::move(channels)}};
}

}  // namespace

json preview_json(const PatternSpec& spec) {
  const auto rendered = render_pattern(spec);
  auto j = to_json(rendered);
  j["wire"] = payload_json(cycle_payload(spec, rendered));
  return j;
}

ApiServer::ApiServer(ServerConfig config)
    : config_(std::move(config)),
      transport_(config_.transport),
      library_(config_.library_path),
      http_(std::make_unique<httplib::Server>()) {
  install_routes();
}

ApiServer::~ApiServer() { stop(); }

void ApiServer::start() {
  transport_.start();
  if (config_.http_port == 0) {
    bound_port_ = http_->bind_to_any_port(config_.host);
  } else {
    bound_port_ = http_->bind_to_port(config_.host, config_.http_port) ? config_.http_port : -1;
  }
  if (bound_port_ < 0) {
    transport_.stop();
    throw std::runtime_error("cannot bind HTTP port " + std::to_string(config_.http_port));
  }
  http_thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
}

void ApiServer::stop() {
  if (http_) http_->stop();
  if (http_thread_.joinable()) http_thread_.join();
  transport_.stop();
}

void ApiServer::wait() {
  if (http_thread_.joinable()) http_thread_.join();
}

ApiResponse ApiServer::render_preview(std::string_view body) {
  try {
    return {200, preview_json(pattern_from_json_text(body))};
  } catch (const ValidationError& e) {
    return invalid(e);
  } catch (const TooLongError& e) {
    return error(422, "REJECT_TOO_LONG", e.what());
  }
}

ApiResponse ApiServer::play(const std::string& device_id, std::string_view body, bool realtime) {
  const auto device = transport_.registry().find(device_id);
  if (!device) return error(404, "E_UNKNOWN_DEVICE", "no device '" + device_id + "'");

  wire::PatternBody payload;
  try {
    const auto spec = pattern_from_json_text(body);
    for (std::size_t i = 0; i < spec.assignments.size(); ++i) {
      if (spec.assignments[i].mask >> device->channel_count) {
        return error(400, "E_INVALID",
                     device_id + " has " + std::to_string(device->channel_count) + " channels",
                     "assignments[" + std::to_string(i) + "].mask");
      }
    }
    payload = cycle_payload(spec, render_pattern(spec));
    wire::encode(wire::WireMessage::make_pattern(0, payload));
  } catch (const ValidationError& e) {
    return invalid(e);
  } catch (const TooLongError& e) {
    return error(422, "REJECT_TOO_LONG", e.what());
  } catch (const wire::EncodeError& e) {
    return error(422, std::string(wire::to_string(e.code())), e.what());
  }

  try {
    return delivery_response(device_id, transport_.send_reliable(device_id, Outgoing::play(std::move(payload), realtime)));
  } catch (const UnknownDeviceError& e) {
    return error(404, "E_UNKNOWN_DEVICE", e.what());
  }
}

ApiResponse ApiServer::stop_device(const std::string& device_id) {
  try {
    return delivery_response(device_id, transport_.send_reliable(device_id, Outgoing::stop()));
  } catch (const UnknownDeviceError& e) {
    return error(404, "E_UNKNOWN_DEVICE", e.what());
  }
}

ApiResponse ApiServer::devices() {
  const auto now = Clock::now();
  const auto records = transport_.registry().snapshot();
  const auto online = device_liveness(records, now, transport_.config().hello_interval);
  json list = json::array();
  for (const auto& rec : records) {
    const auto it = std::find_if(online.begin(), online.end(),
                                 [&](const Liveness& l) { return l.device_id == rec.device_id; });
    list.push_back(
        {{"device_id", rec.device_id},
         {"address", rec.address.to_string()},
         {"channel_count", rec.channel_count},
         {"online", it != online.end() && it->online},
         {"last_seen_ms_ago",
          std::chrono::duration_cast<std::chrono::milliseconds>(now - rec.last_seen).count()}});
  }
  return {200, std::move(list)};
}

ApiResponse ApiServer::list_presets() {
  json list = json::array();
  for (const auto& p : library_.list()) list.push_back(to_json(p));
  return {200, std::move(list)};
}

ApiResponse ApiServer::get_preset(const std::string& name) {
  if (auto p = library_.get(name)) return {200, to_json(*p)};
  return error(404, "E_NOT_FOUND", "no preset named '" + name + "'");
}

ApiResponse ApiServer::save_preset(const std::string& name, std::string_view body) {
  try {
    const auto spec = pattern_from_json_text(body);
    const bool created = library_.save(name, spec);
    return {created ? 201 : 200, to_json(PresetEntry{name, spec, false})};
  } catch (const ValidationError& e) {
    return invalid(e);
  } catch (const PresetConflict& e) {
    return error(409, "E_BUILTIN", e.what());
  }
}

ApiResponse ApiServer::delete_preset(const std::string& name) {
  try {
    library_.remove(name);
    return {200, {{"deleted", name}}};
  } catch (const PresetConflict& e) {
    return error(409, "E_BUILTIN", e.what());
  } catch (const PresetNotFound& e) {
    return error(404, "E_NOT_FOUND", e.what());
  }
}

void ApiServer::install_routes() {
  auto reply = [](httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto& s = *http_;

  s.Get("/api/devices", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, devices());
  });
  s.Post("/api/render", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, render_preview(req.body));
  });
  s.Post(R"(/api/devices/([^/]+)/play)", [this, reply](const httplib::Request& req, httplib::Response& res) {
    const auto flag = req.get_param_value("realtime");
    reply(res, play(req.matches[1], req.body, flag == "1" || flag == "true"));
  });
  s.Post(R"(/api/devices/([^/]+)/stop)", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, stop_device(req.matches[1]));
  });
  s.Get("/api/presets", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, list_presets());
  });
  s.Get(R"(/api/presets/(.+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, get_preset(req.matches[1]));
  });
  s.Put(R"(/api/presets/(.+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, save_preset(req.matches[1], req.body));
  });
  s.Delete(R"(/api/presets/(.+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, delete_preset(req.matches[1]));
  });
  s.set_exception_handler([reply](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    reply(res, error(500, "E_INTERNAL", what));
  });

  if (!config_.static_dir.empty()) s.set_mount_point("/", config_.static_dir);
}

}  // namespace hdesigner
