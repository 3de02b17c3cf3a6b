#include "hdesigner/transport.hpp"

#include <algorithm>
#include <deque>

namespace hdesigner {

std::vector<Liveness> device_liveness(const std::vector<DeviceRecord>& records,
                                      Clock::time_point now,
                                      std::chrono::milliseconds hello_interval) {
  std::vector<Liveness> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.device_id, now - r.last_seen < 3 * hello_interval});
  std::sort(out.begin(), out.end(),
            [](const Liveness& a, const Liveness& b) { return a.device_id < b.device_id; });
  return out;
}

// ---------------------------------------------------------------------------
// DeviceRegistry

bool DeviceRegistry::upsert(const std::string& id, const Endpoint& address, int channel_count,
                            Clock::time_point now) {
  std::unique_lock lock(mutex_);
  auto [it, inserted] = devices_.try_emplace(id);
  auto& rec = it->second;
  rec.device_id = id;
  rec.address = address;
  rec.channel_count = channel_count;
  rec.last_seen = std::max(rec.last_seen, now);
  return inserted;
}

void DeviceRegistry::touch(const Endpoint& address, Clock::time_point now) {
  std::unique_lock lock(mutex_);
  for (auto& [id, rec] : devices_) {
    if (rec.address == address) rec.last_seen = std::max(rec.last_seen, now);
  }
}

std::optional<DeviceRecord> DeviceRegistry::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = devices_.find(id);
  if (it == devices_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> DeviceRegistry::id_at(const Endpoint& address) const {
  std::shared_lock lock(mutex_);
  for (const auto& [id, rec] : devices_) {
    if (rec.address == address) return id;
  }
  return std::nullopt;
}

std::vector<DeviceRecord> DeviceRegistry::snapshot() const {
  std::shared_lock lock(mutex_);
  std::vector<DeviceRecord> out;
  out.reserve(devices_.size());
  for (const auto& [id, rec] : devices_) out.push_back(rec);
  return out;
}

std::size_t DeviceRegistry::size() const {
  std::shared_lock lock(mutex_);
  return devices_.size();
}

std::optional<std::uint32_t> DeviceRegistry::take_seq(const std::string& id) {
  std::unique_lock lock(mutex_);
  auto it = devices_.find(id);
  if (it == devices_.end()) return std::nullopt;
  return it->second.next_seq++;
}

std::string_view to_string(DeliveryStatus s) noexcept {
  switch (s) {
    case DeliveryStatus::Delivered: return "DELIVERED";
    case DeliveryStatus::Failed: return "FAILED";
    case DeliveryStatus::Superseded: return "SUPERSEDED";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Per-device lanes

struct Transport::Ticket {
  const Outgoing* msg;
  bool superseded = false;
};

struct Transport::Lane {
  std::mutex mutex;
  std::condition_variable cv;
  bool busy = false;
  std::deque<Ticket*> queue;
};

Transport::Transport(TransportConfig config) : config_(std::move(config)), faults_(config_.faults) {}

Transport::~Transport() { stop(); }

void Transport::start() {
  if (running_) return;
  socket_ = UdpSocket::bind(config_.udp_port, config_.bind_host);
  running_ = true;
  receiver_ = std::thread([this] { receive_loop(); });
}

void Transport::stop() {
  running_ = false;
  if (receiver_.joinable()) receiver_.join();
}

std::uint16_t Transport::port() const { return socket_.local_port(); }

std::vector<Liveness> Transport::liveness() const {
  return device_liveness(registry_.snapshot(), Clock::now(), config_.hello_interval);
}

TransportStats Transport::stats() const {
  std::lock_guard lock(stats_mutex_);
  return stats_;
}

void Transport::set_faults(const FaultConfig& faults) {
  std::lock_guard lock(stats_mutex_);
  faults_ = faults;
}

Transport::Lane& Transport::lane_for(const std::string& device_id) {
  std::lock_guard lock(lanes_mutex_);
  auto& lane = lanes_[device_id];
  if (!lane) lane = std::make_unique<Lane>();
  return *lane;
}

DeliveryResult Transport::send_reliable(const std::string& device_id, Outgoing msg) {
  if (!registry_.find(device_id)) throw UnknownDeviceError(device_id);

  auto& lane = lane_for(device_id);
  Ticket ticket{&msg};
  {
    std::unique_lock lock(lane.mutex);
    if (msg.coalesce) {
      for (auto it = lane.queue.begin(); it != lane.queue.end();) {
        if ((*it)->msg->coalesce) {
          (*it)->superseded = true;
          it = lane.queue.erase(it);
        } else {
          ++it;
        }
      }
      lane.cv.notify_all();
    }
    if (msg.kind == wire::MsgKind::Stop) {
      auto pos = std::find_if(lane.queue.begin(), lane.queue.end(),
                              [](const Ticket* t) { return t->msg->kind != wire::MsgKind::Stop; });
      lane.queue.insert(pos, &ticket);
    } else {
      lane.queue.push_back(&ticket);
    }

    lane.cv.wait(lock, [&] {
      return ticket.superseded || (!lane.busy && lane.queue.front() == &ticket);
    });
    if (ticket.superseded) return {DeliveryStatus::Superseded, 0, 0.0, 0, 0};
    lane.queue.pop_front();
    lane.busy = true;
  }

  DeliveryResult result;
  try {
    result = transmit(device_id, msg);
  } catch (...) {
    std::lock_guard lock(lane.mutex);
    lane.busy = false;
    lane.cv.notify_all();
    throw;
  }
  std::lock_guard lock(lane.mutex);
  lane.busy = false;
  lane.cv.notify_all();
  return result;
}

DeliveryResult Transport::transmit(const std::string& device_id, const Outgoing& out) {
  auto seq = registry_.take_seq(device_id);
  if (!seq) throw UnknownDeviceError(device_id);

  wire::WireMessage msg;
  msg.kind = out.kind;
  msg.seq = *seq;
  msg.pattern = out.pattern;
  const auto bytes = wire::encode(msg);

  FaultConfig faults;
  {
    std::lock_guard lock(stats_mutex_);
    faults = faults_;
  }
  const auto key = std::make_pair(device_id, *seq);
  {
    std::lock_guard lock(pending_mutex_);
    pending_[key] = Pending{false, faults.drop_acks_first, {}};
  }

  DeliveryResult result;
  result.seq = *seq;
  for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    result.attempts = attempt;
    const auto sent_at = Clock::now();
    if (attempt > faults.drop_outbound_first) {
      // Re-read the address so a re-registration mid-delivery is honored.
      const auto device = registry_.find(device_id);
      if (!device) break;
      const int copies = faults.duplicate_outbound ? 2 : 1;
      for (int i = 0; i < copies; ++i) {
        if (!socket_.send_to(device->address, bytes)) ++result.socket_errors;
      }
    }
    {
      std::lock_guard lock(stats_mutex_);
      ++stats_.transmissions;
    }

    std::unique_lock lock(pending_mutex_);
    const bool acked = pending_cv_.wait_until(lock, sent_at + config_.ack_timeout,
                                              [&] { return pending_[key].acked; });
    if (acked) {
      const auto acked_at = pending_[key].acked_at;
      pending_.erase(key);
      result.status = DeliveryStatus::Delivered;
      result.rtt_ms = std::chrono::duration<double, std::milli>(acked_at - sent_at).count();
      return result;
    }
  }

  std::lock_guard lock(pending_mutex_);
  pending_.erase(key);
  result.status = DeliveryStatus::Failed;
  return result;
}

void Transport::receive_loop() {
  while (running_) {
    auto d = socket_.receive(50ms);
    if (d) handle(*d);
  }
}

void Transport::handle(const Datagram& d) {
  const auto now = Clock::now();
  {
    std::lock_guard lock(stats_mutex_);
    ++stats_.datagrams;
  }
  auto decoded = wire::decode(d.data);
  auto* msg = std::get_if<wire::WireMessage>(&decoded);
  if (!msg) {
    std::lock_guard lock(stats_mutex_);
    ++stats_.malformed;
    return;
  }

  switch (msg->kind) {
    case wire::MsgKind::Hello: {
      registry_.upsert(msg->hello->device_id, d.from, msg->hello->channel_count, now);
      {
        std::lock_guard lock(stats_mutex_);
        ++stats_.hellos;
      }
      socket_.send_to(d.from, wire::encode(wire::WireMessage::make_ack(msg->seq)));
      return;
    }
    case wire::MsgKind::Ack: {
      registry_.touch(d.from, now);
      const auto id = registry_.id_at(d.from);
      enum { Matched, Dropped, Stray } outcome = Stray;
      if (id) {
        std::lock_guard lock(pending_mutex_);
        auto it = pending_.find({*id, msg->seq});
        if (it != pending_.end() && !it->second.acked) {
          if (it->second.acks_to_ignore > 0) {
            --it->second.acks_to_ignore;
            outcome = Dropped;
          } else {
            it->second.acked = true;
            it->second.acked_at = now;
            outcome = Matched;
          }
        }
      }
      if (outcome == Matched) pending_cv_.notify_all();
      std::lock_guard lock(stats_mutex_);
      if (outcome == Matched) ++stats_.acks_matched;
      else if (outcome == Dropped) ++stats_.acks_dropped;
      else ++stats_.acks_stray;
      return;
    }
    case wire::MsgKind::Pattern:
    case wire::MsgKind::Stop:
      // Devices never send these to the server.
      registry_.touch(d.from, now);
      return;
  }
}

}  // namespace hdesigner
