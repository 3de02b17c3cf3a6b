#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hdesigner {

/// Highest PWM duty value (10-bit resolution).
inline constexpr int kPwmMax = 1023;
/// Samples allowed per channel in one rendered pattern.
inline constexpr std::size_t kMaxSamplesPerChannel = 512;
/// Number of addressable output channels (PWM-capable GPIO pins).
inline constexpr int kMaxChannels = 8;

enum class CurveType { Linear, QuadEaseIn, QuadEaseOut, Square };

std::string_view to_string(CurveType c) noexcept;
std::optional<CurveType> parse_curve(std::string_view name) noexcept;

/// Which side of the envelope a ramp belongs to. Attack rises toward the
/// peak, release falls toward the floor.
enum class Role { Attack, Release };

struct SegmentSpec {
  std::int64_t duration_ms = 0;
  CurveType curve = CurveType::Linear;

  friend bool operator==(const SegmentSpec&, const SegmentSpec&) = default;
};

struct EnvelopeSpec {
  std::int64_t delta_ms = 10;
  double peak_pct = 100.0;
  double min_pct = 0.0;
  SegmentSpec attack;
  std::int64_t sustain_ms = 0;
  SegmentSpec release;

  friend bool operator==(const EnvelopeSpec&, const EnvelopeSpec&) = default;
};

struct Assignment {
  std::uint8_t mask = 0;
  EnvelopeSpec envelope;
  std::int64_t offset_ms = 0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct PatternSpec {
  std::vector<Assignment> assignments;
  std::int64_t delay_ms = 0;
  std::int64_t repeat = 1;

  /// Shared tick size. Only meaningful once the spec validates.
  std::int64_t delta_ms() const noexcept {
    return assignments.empty() ? 0 : assignments.front().envelope.delta_ms;
  }

  friend bool operator==(const PatternSpec&, const PatternSpec&) = default;
};

enum class SegmentLabel { Attack, Sustain, Release, Delay, Offset };

std::string_view to_string(SegmentLabel l) noexcept;

/// Half-open tick span [start_tick, end_tick).
struct SegmentSpan {
  SegmentLabel label;
  std::size_t start_tick;
  std::size_t end_tick;

  friend bool operator==(const SegmentSpan&, const SegmentSpan&) = default;
};

using Samples = std::vector<std::uint16_t>;

struct RenderedEnvelope {
  Samples samples;
  std::vector<SegmentSpan> segments;
};

struct RenderedPattern {
  std::int64_t delta_ms = 0;
  std::map<int, Samples> channels;
  std::map<int, std::vector<SegmentSpan>> segments;

  std::size_t length() const noexcept {
    return channels.empty() ? 0 : channels.begin()->second.size();
  }

  friend bool operator==(const RenderedPattern&, const RenderedPattern&) = default;
};

/// Raised when a spec breaks an invariant. `field` is a dotted path such
/// as "assignments[0].envelope.min_pct".
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A pattern whose rendered channels would not fit in one datagram.
class TooLongError : public std::length_error {
 public:
  TooLongError(std::size_t channel_length)
      : std::length_error("REJECT_TOO_LONG: channel needs " +
                          std::to_string(channel_length) + " samples, cap is " +
                          std::to_string(kMaxSamplesPerChannel)),
        channel_length_(channel_length) {}
  std::size_t channel_length() const noexcept { return channel_length_; }

 private:
  std::size_t channel_length_;
};

void validate(const EnvelopeSpec& env, const std::string& path = "envelope");
void validate(const PatternSpec& spec);

/// ceil(duration / delta) for non-negative duration and positive delta.
constexpr std::int64_t ticks_for(std::int64_t duration_ms, std::int64_t delta_ms) noexcept {
  return (duration_ms + delta_ms - 1) / delta_ms;
}

/// Percent of full scale to a PWM duty value, rounding half away from zero.
std::uint16_t pct_to_pwm(double pct) noexcept;

Samples render_segment(const SegmentSpec& seg, Role role, const EnvelopeSpec& env);
RenderedEnvelope render_envelope(const EnvelopeSpec& env);

/// Ticks one envelope occupies: attack + sustain + release.
std::int64_t envelope_ticks(const EnvelopeSpec& env) noexcept;

/// Unpadded length of a channel driven by `a` under `spec`'s repeat/delay.
std::int64_t channel_ticks(const PatternSpec& spec, const Assignment& a) noexcept;

/// Renders every assigned channel. Throws ValidationError for bad specs and
/// TooLongError when a channel exceeds kMaxSamplesPerChannel.
RenderedPattern render_pattern(const PatternSpec& spec);

}  // namespace hdesigner
