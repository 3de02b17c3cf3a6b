#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "hdesigner/playback.hpp"
#include "hdesigner/udp.hpp"

namespace hdesigner {

using Clock = std::chrono::steady_clock;

struct SimConfig {
  Endpoint server;
  std::string device_id = "band-01";
  int channels = 3;
  std::uint16_t listen_port = 0;
  std::chrono::milliseconds hello_interval{2000};
  /// Receipts of each seq silently dropped before the first one is handled.
  int drop_inbound_first = 0;
  /// JSON-lines trace destination; empty keeps the trace in memory only.
  std::string trace_path;
  bool keep_trace = true;
  /// Render level bars on stderr at every tick.
  bool show_bars = false;
};

struct SimStats {
  std::uint64_t received = 0;
  std::uint64_t malformed = 0;
  std::uint64_t dropped = 0;
  std::uint64_t acks_sent = 0;
  std::uint64_t applied = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t hellos_sent = 0;
  std::uint64_t hello_acks = 0;
};

/// Software haptic band: beacons HELLO, acks and applies PATTERN/STOP, and
/// plays patterns on a monotonic tick clock while recording a trace.
class Simulator {
 public:
  explicit Simulator(SimConfig config);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  void start();
  void stop();

  std::uint16_t port() const;
  std::vector<TraceEvent> trace() const;
  SimStats stats() const;
  PlaybackState state() const;
  const SimConfig& config() const noexcept { return config_; }

 private:
  void receive_loop();
  void beacon_loop();
  void clock_loop();
  void handle(const Datagram& d);
  void record(std::vector<TraceEvent> events);
  void record(TraceEvent e);
  double now_ms() const;
  void send_ack(const Endpoint& to, std::uint32_t seq);

  SimConfig config_;
  UdpSocket socket_;
  Clock::time_point epoch_;

  std::atomic<bool> running_{false};
  std::thread receiver_, beacon_, clock_;

  mutable std::mutex mutex_;  // player, trace, stats
  std::condition_variable wake_;
  Player player_;
  std::vector<TraceEvent> trace_;
  std::ofstream trace_file_;
  SimStats stats_;
  std::map<Endpoint, std::uint32_t> last_applied_;
  std::map<std::pair<Endpoint, std::uint32_t>, int> receipts_;
  std::uint32_t hello_seq_ = 0;
};

}  // namespace hdesigner
