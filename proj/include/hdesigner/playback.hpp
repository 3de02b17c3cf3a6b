#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hdesigner/wire.hpp"

namespace hdesigner {

using Levels = std::array<std::uint16_t, wire::kChannels>;

enum class Phase { Idle, Playing };

/// Band-side playback position. Holds one cycle per channel and walks it
/// repeat times with delay_ticks of silence in between.
struct PlaybackState {
  Phase phase = Phase::Idle;
  std::uint32_t delta_ms = 10;
  std::uint32_t repeat = 1;
  std::size_t delay_ticks = 0;
  std::size_t cycle_length = 0;
  std::array<std::vector<std::uint16_t>, wire::kChannels> cycle{};
  std::uint32_t cycle_index = 0;
  std::size_t tick_index = 0;
  Levels levels{};
  std::uint32_t seq = 0;  ///< seq of the pattern being played
};

/// Loads a pattern at tick 0. Channels at or above `channel_count` are not
/// wired on the band and stay silent. Patterns with nothing to play leave
/// the state idle.
PlaybackState load_pattern(const wire::PatternBody& body, std::uint32_t seq,
                           int channel_count = wire::kChannels);

/// Emits the current levels and advances one delta step. Idle is a no-op
/// that returns nullopt.
std::optional<Levels> tick(PlaybackState& state);

enum class TraceKind { Tick, MsgRx, AckTx, Stopped, Replaced };

std::string_view to_string(TraceKind k) noexcept;

struct TraceEvent {
  double t_ms = 0.0;
  TraceKind kind = TraceKind::Tick;
  Levels levels{};
  std::optional<std::uint32_t> seq;
  std::string msg;  ///< message kind for MSG_RX / ACK_TX

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// A stop or replacement waiting for the next tick boundary.
struct Interrupt {
  std::optional<wire::PatternBody> pattern;  ///< empty means STOP
  std::uint32_t seq = 0;
};

/// Playback state plus interrupts that take effect at tick boundaries.
class Player {
 public:
  explicit Player(int channel_count = 3) : channel_count_(channel_count) {}

  void interrupt(Interrupt i) { pending_.push_back(std::move(i)); }
  bool has_pending() const noexcept { return !pending_.empty(); }

  /// One tick boundary at time `t_ms`: applies pending interrupts in
  /// arrival order (STOPPED / REPLACED), then emits a TICK if playing.
  std::vector<TraceEvent> step(double t_ms);

  /// Applies pending interrupts only. Used while idle, where there is no
  /// tick boundary to wait for.
  std::vector<TraceEvent> apply_pending(double t_ms);

  const PlaybackState& state() const noexcept { return state_; }

 private:
  int channel_count_;
  PlaybackState state_;
  std::deque<Interrupt> pending_;
};

std::string trace_header_jsonl(const std::string& device_id, int channel_count);
std::string to_jsonl(const TraceEvent& e);
std::optional<TraceEvent> trace_event_from_jsonl(const std::string& line);

/// Header line followed by one line per event.
void dump_trace(std::ostream& out, const std::string& device_id, int channel_count,
                const std::vector<TraceEvent>& events);

}  // namespace hdesigner
