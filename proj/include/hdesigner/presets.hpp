#pragma once

#include <string>
#include <vector>

#include "hdesigner/envelope.hpp"

namespace hdesigner {

struct PresetEntry {
  std::string name;
  PatternSpec spec;
  bool builtin = false;

  friend bool operator==(const PresetEntry&, const PresetEntry&) = default;
};

/// The fixed palette shipped with the server. Same contents on every call.
const std::vector<PresetEntry>& builtin_presets();

/// A repeating pulse on `mask` whose onsets are 60000/bpm ms apart. The
/// pulse must be no longer than one beat; the remainder of the beat becomes
/// the inter-repetition delay.
PatternSpec pulse_train(double bpm, const EnvelopeSpec& pulse, std::uint8_t mask,
                        std::int64_t beats);

/// Distance between consecutive repetition onsets of one assignment.
std::int64_t cycle_period_ms(const PatternSpec& spec, const Assignment& a) noexcept;

}  // namespace hdesigner
