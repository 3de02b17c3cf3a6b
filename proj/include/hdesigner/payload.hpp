#pragma once

#include <map>

#include "hdesigner/envelope.hpp"
#include "hdesigner/wire.hpp"

namespace hdesigner {

/// Builds the PATTERN body for a rendered spec.
///
/// When every channel repeats the same-length cycle with no start offset,
/// only the first cycle is shipped and REP/DLY tell the device how to
/// expand it. Anything else (offsets, unequal envelope lengths) ships the
/// fully expanded stream with REP=1, DLY=0. In both cases
/// expand_payload(cycle_payload(s, render_pattern(s))) equals the rendered
/// channels exactly.
wire::PatternBody cycle_payload(const PatternSpec& spec, const RenderedPattern& rendered);

/// Device-side expansion of a PATTERN body into the full per-channel stream.
/// Short channel blocks are zero-padded to the longest block first.
std::map<int, Samples> expand_payload(const wire::PatternBody& body);

/// Ticks a PATTERN body plays for: repeat * cycle + (repeat - 1) * delay.
std::size_t expanded_length(const wire::PatternBody& body) noexcept;

}  // namespace hdesigner
