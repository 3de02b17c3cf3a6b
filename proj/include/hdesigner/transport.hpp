#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hdesigner/udp.hpp"
#include "hdesigner/wire.hpp"

namespace hdesigner {

using Clock = std::chrono::steady_clock;
using namespace std::chrono_literals;

/// One initial transmission plus three retries.
inline constexpr int kMaxAttempts = 4;

struct DeviceRecord {
  std::string device_id;
  Endpoint address;
  int channel_count = 3;
  Clock::time_point last_seen{};
  std::uint32_t next_seq = 1;
};

struct Liveness {
  std::string device_id;
  bool online = false;

  friend bool operator==(const Liveness&, const Liveness&) = default;
};

/// online <=> now - last_seen < 3 * hello_interval. Sorted by device id.
std::vector<Liveness> device_liveness(const std::vector<DeviceRecord>& records,
                                      Clock::time_point now,
                                      std::chrono::milliseconds hello_interval = 2000ms);

class DeviceRegistry {
 public:
  /// Inserts or refreshes a device. Returns true when the id is new.
  bool upsert(const std::string& id, const Endpoint& address, int channel_count,
              Clock::time_point now);
  /// Refreshes last_seen of whichever device sits at `address`.
  void touch(const Endpoint& address, Clock::time_point now);

  std::optional<DeviceRecord> find(const std::string& id) const;
  std::optional<std::string> id_at(const Endpoint& address) const;
  std::vector<DeviceRecord> snapshot() const;
  std::size_t size() const;

  /// Hands out the next sequence number for `id` (1, 2, ...).
  std::optional<std::uint32_t> take_seq(const std::string& id);

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, DeviceRecord> devices_;
};

enum class DeliveryStatus { Delivered, Failed, Superseded };

std::string_view to_string(DeliveryStatus s) noexcept;

struct DeliveryResult {
  DeliveryStatus status = DeliveryStatus::Failed;
  int attempts = 0;     ///< transmissions made, 0 for superseded requests
  double rtt_ms = 0.0;  ///< last transmission to ACK, when delivered
  std::uint32_t seq = 0;
  int socket_errors = 0;
};

class UnknownDeviceError : public std::out_of_range {
 public:
  explicit UnknownDeviceError(const std::string& id)
      : std::out_of_range("E_UNKNOWN_DEVICE: " + id), id_(id) {}
  const std::string& device_id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// Scripted misbehavior for tests. Counts apply to every reliable message.
struct FaultConfig {
  int drop_outbound_first = 0;  ///< transmissions swallowed before reaching the socket
  int drop_acks_first = 0;      ///< matching ACKs ignored on arrival
  bool duplicate_outbound = false;
};

struct TransportConfig {
  std::uint16_t udp_port = 9750;
  std::string bind_host = "0.0.0.0";
  std::chrono::milliseconds ack_timeout = 200ms;
  std::chrono::milliseconds hello_interval = 2000ms;
  FaultConfig faults;
};

struct TransportStats {
  std::uint64_t datagrams = 0;
  std::uint64_t malformed = 0;
  std::uint64_t hellos = 0;
  std::uint64_t acks_matched = 0;
  std::uint64_t acks_stray = 0;
  std::uint64_t acks_dropped = 0;  ///< discarded by the fault layer
  std::uint64_t transmissions = 0;
};

/// A PATTERN or STOP waiting for its turn on a device lane.
struct Outgoing {
  wire::MsgKind kind = wire::MsgKind::Stop;
  std::optional<wire::PatternBody> pattern;
  /// A newer coalescing request replaces this one while it is still queued.
  bool coalesce = false;

  static Outgoing stop() { return {wire::MsgKind::Stop, std::nullopt, false}; }
  static Outgoing play(wire::PatternBody body, bool coalesce = false) {
    return {wire::MsgKind::Pattern, std::move(body), coalesce};
  }
};

/// Server side of the UDP link.
///
/// A receive thread registers devices from HELLO beacons and routes ACKs to
/// waiting senders. send_reliable() may be called from many threads; each
/// device has a lane that keeps at most one message in flight and hands
/// out turns in FIFO order, except that STOP jumps ahead of queued
/// PATTERNs.
class Transport {
 public:
  explicit Transport(TransportConfig config = {});
  ~Transport();
  Transport(const Transport&) = delete;
  Transport& operator=(const Transport&) = delete;

  /// Binds the socket and starts the receive loop.
  void start();
  void stop();

  std::uint16_t port() const;
  const TransportConfig& config() const noexcept { return config_; }

  DeviceRegistry& registry() noexcept { return registry_; }
  const DeviceRegistry& registry() const noexcept { return registry_; }

  /// Blocks until the message is acknowledged, fails after kMaxAttempts,
  /// or is superseded in the queue. Throws UnknownDeviceError.
  DeliveryResult send_reliable(const std::string& device_id, Outgoing msg);

  std::vector<Liveness> liveness() const;
  TransportStats stats() const;

  void set_faults(const FaultConfig& faults);

 private:
  struct Ticket;
  struct Lane;
  struct Pending {
    bool acked = false;
    int acks_to_ignore = 0;
    Clock::time_point acked_at{};
  };

  void receive_loop();
  void handle(const Datagram& d);
  DeliveryResult transmit(const std::string& device_id, const Outgoing& msg);
  Lane& lane_for(const std::string& device_id);

  TransportConfig config_;
  UdpSocket socket_;
  DeviceRegistry registry_;

  std::atomic<bool> running_{false};
  std::thread receiver_;

  mutable std::mutex pending_mutex_;
  std::condition_variable pending_cv_;
  std::map<std::pair<std::string, std::uint32_t>, Pending> pending_;

  std::mutex lanes_mutex_;
  std::map<std::string, std::unique_ptr<Lane>> lanes_;

  mutable std::mutex stats_mutex_;
  TransportStats stats_;
  FaultConfig faults_;
};

}  // namespace hdesigner
