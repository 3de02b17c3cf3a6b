#pragma once

// TLV-in-CSV message codec.
//
// Every message is one comma-separated line of ASCII tokens grouped into
// tag,length,value... triples. The first triple is always MSG and the second
// always SEQ. See docs/wire-format.md for byte-level examples.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hdesigner::wire {

/// Largest encoded message, one UDP datagram.
inline constexpr std::size_t kMaxDatagram = 8192;
/// Largest CH<k> block.
inline constexpr std::size_t kMaxChannelSamples = 512;
inline constexpr int kChannels = 8;
inline constexpr int kPwmMax = 1023;

enum class MsgKind { Pattern, Stop, Ack, Hello };

std::string_view to_string(MsgKind k) noexcept;

struct PatternBody {
  std::uint32_t delta_ms = 10;
  std::uint32_t repeat = 1;
  std::uint32_t delay_ms = 0;
  /// Channel index -> PWM samples for one cycle.
  std::map<int, std::vector<std::uint16_t>> channels;

  friend bool operator==(const PatternBody&, const PatternBody&) = default;
};

struct HelloBody {
  std::string device_id;
  int channel_count = 3;

  friend bool operator==(const HelloBody&, const HelloBody&) = default;
};

struct WireMessage {
  MsgKind kind = MsgKind::Stop;
  std::uint32_t seq = 0;
  std::optional<PatternBody> pattern;  // set iff kind == Pattern
  std::optional<HelloBody> hello;      // set iff kind == Hello

  static WireMessage make_stop(std::uint32_t seq) { return {MsgKind::Stop, seq, {}, {}}; }
  static WireMessage make_ack(std::uint32_t acked) { return {MsgKind::Ack, acked, {}, {}}; }
  static WireMessage make_hello(std::uint32_t seq, std::string id, int channels) {
    return {MsgKind::Hello, seq, {}, HelloBody{std::move(id), channels}};
  }
  static WireMessage make_pattern(std::uint32_t seq, PatternBody body) {
    return {MsgKind::Pattern, seq, std::move(body), {}};
  }

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

enum class Errc { Malformed, BadPrefix, Range, TooLarge };

std::string_view to_string(Errc e) noexcept;

struct WireError {
  Errc code;
  std::size_t token = 0;  ///< index of the offending token
  std::size_t byte = 0;   ///< byte offset where that token starts
  std::string detail;

  std::string message() const;
};

class EncodeError : public std::invalid_argument {
 public:
  EncodeError(Errc code, const std::string& what)
      : std::invalid_argument(std::string(to_string(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// A value token may not contain commas, control characters or non-ASCII.
bool is_token_safe(std::string_view value) noexcept;

/// Canonical encoding. Throws EncodeError with Errc::TooLarge when the
/// result exceeds kMaxDatagram, and Errc::Range/Malformed for messages that
/// break the field contracts.
std::string encode(const WireMessage& msg);

using DecodeResult = std::variant<WireMessage, WireError>;

/// Total over arbitrary input.
DecodeResult decode(std::string_view bytes) noexcept;

}  // namespace hdesigner::wire
