#include "hdesigner/simulator.hpp"

#include <iostream>
#include <stdexcept>

namespace hdesigner {

using namespace std::chrono_literals;

Simulator::Simulator(SimConfig config)
    : config_(std::move(config)), epoch_(Clock::now()), player_(config_.channels) {
  if (config_.channels < 1 || config_.channels > wire::kChannels)
    throw std::invalid_argument("channel count must be within [1, 8]");
  if (!wire::is_token_safe(config_.device_id) || config_.device_id.empty())
    throw std::invalid_argument("device id must be a non-empty CSV-safe token");
}

Simulator::~Simulator() { stop(); }

void Simulator::start() {
  if (running_) return;
  socket_ = UdpSocket::bind(config_.listen_port);
  if (!config_.trace_path.empty()) {
    trace_file_.open(config_.trace_path, std::ios::out | std::ios::trunc);
    if (!trace_file_) throw std::runtime_error("cannot open trace file " + config_.trace_path);
    trace_file_ << trace_header_jsonl(config_.device_id, config_.channels) << '\n' << std::flush;
  }
  running_ = true;
  receiver_ = std::thread([this] { receive_loop(); });
  clock_ = std::thread([this] { clock_loop(); });
  beacon_ = std::thread([this] { beacon_loop(); });
}

void Simulator::stop() {
  if (!running_.exchange(false)) return;
  wake_.notify_all();
  for (auto* t : {&receiver_, &clock_, &beacon_}) {
    if (t->joinable()) t->join();
  }
  std::lock_guard lock(mutex_);
  if (trace_file_.is_open()) trace_file_.close();
}

std::uint16_t Simulator::port() const { return socket_.local_port(); }

std::vector<TraceEvent> Simulator::trace() const {
  std::lock_guard lock(mutex_);
  return trace_;
}

SimStats Simulator::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

PlaybackState Simulator::state() const {
  std::lock_guard lock(mutex_);
  return player_.state();
}

double Simulator::now_ms() const {
  return std::chrono::duration<double, std::milli>(Clock::now() - epoch_).count();
}

// Callers hold mutex_.
void Simulator::record(TraceEvent e) {
  if (trace_file_.is_open()) trace_file_ << to_jsonl(e) << '\n' << std::flush;
  if (config_.show_bars && e.kind == TraceKind::Tick) {
    std::string line = "\r";
    for (int ch = 0; ch < config_.channels; ++ch) {
      const int width = e.levels[ch] * 20 / wire::kPwmMax;
      line += "[" + std::string(width, '#') + std::string(20 - width, ' ') + "] ";
    }
    std::cerr << line << std::flush;
  }
  if (config_.keep_trace) trace_.push_back(std::move(e));
}

void Simulator::record(std::vector<TraceEvent> events) {
  for (auto& e : events) record(std::move(e));
}

void Simulator::send_ack(const Endpoint& to, std::uint32_t seq) {
  socket_.send_to(to, wire::encode(wire::WireMessage::make_ack(seq)));
  ++stats_.acks_sent;
  record({now_ms(), TraceKind::AckTx, player_.state().levels, seq, "ACK"});
}

void Simulator::receive_loop() {
  while (running_) {
    auto d = socket_.receive(50ms);
    if (d) handle(*d);
  }
}

void Simulator::handle(const Datagram& d) {
  std::lock_guard lock(mutex_);
  ++stats_.received;
  auto decoded = wire::decode(d.data);
  auto* msg = std::get_if<wire::WireMessage>(&decoded);
  if (!msg) {
    ++stats_.malformed;
    return;
  }
  if (msg->kind == wire::MsgKind::Ack) {
    ++stats_.hello_acks;
    return;
  }
  if (config_.drop_inbound_first > 0 &&
      ++receipts_[{d.from, msg->seq}] <= config_.drop_inbound_first) {
    ++stats_.dropped;
    return;
  }

  record({now_ms(), TraceKind::MsgRx, player_.state().levels, msg->seq,
          std::string(wire::to_string(msg->kind))});
  // Ack first so the sender stops retransmitting even if applying is slow.
  send_ack(d.from, msg->seq);

  if (msg->kind == wire::MsgKind::Hello) return;

  auto& last = last_applied_[d.from];
  // seq restarts at 1 when the server restarts.
  const bool fresh = msg->seq > last || (msg->seq == 1 && last > 1);
  if (!fresh) {
    ++stats_.duplicates;
    return;
  }
  last = msg->seq;
  ++stats_.applied;
  player_.interrupt({msg->pattern, msg->seq});
  wake_.notify_all();
}

void Simulator::beacon_loop() {
  while (running_) {
    {
      std::lock_guard lock(mutex_);
      const auto hello = wire::WireMessage::make_hello(++hello_seq_, config_.device_id, config_.channels);
      socket_.send_to(config_.server, wire::encode(hello));
      ++stats_.hellos_sent;
    }
    const auto next = Clock::now() + config_.hello_interval;
    while (running_ && Clock::now() < next) std::this_thread::sleep_for(std::min<Clock::duration>(20ms, next - Clock::now()));
  }
}

void Simulator::clock_loop() {
  std::unique_lock lock(mutex_);
  auto next = Clock::now();
  while (running_) {
    if (player_.state().phase == Phase::Idle) {
      if (!player_.has_pending()) {
        wake_.wait_for(lock, 100ms);
        continue;
      }
      record(player_.apply_pending(now_ms()));
      if (player_.state().phase == Phase::Idle) continue;
      next = Clock::now();
    }

    while (running_ && Clock::now() < next) wake_.wait_until(lock, next);
    if (!running_) break;

    record(player_.step(now_ms()));
    const auto delta = std::chrono::milliseconds(player_.state().delta_ms);
    next += delta;
    // After a stall, resynchronize instead of bursting to catch up.
    if (Clock::now() > next + delta) next = Clock::now();
  }
}

}  // namespace hdesigner
