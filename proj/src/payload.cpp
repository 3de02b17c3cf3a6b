#include "hdesigner/payload.hpp"

#include <algorithm>

namespace hdesigner {

namespace {

std::size_t cycle_length(const wire::PatternBody& body) noexcept {
  std::size_t n = 0;
  for (const auto& [ch, s] : body.channels) n = std::max(n, s.size());
  return n;
}

std::size_t delay_ticks(const wire::PatternBody& body) noexcept {
  return static_cast<std::size_t>(ticks_for(body.delay_ms, body.delta_ms));
}

}  // namespace

wire::PatternBody cycle_payload(const PatternSpec& spec, const RenderedPattern& rendered) {
  wire::PatternBody body;
  body.delta_ms = static_cast<std::uint32_t>(rendered.delta_ms);

  bool compact = spec.repeat > 1;
  const auto cycle = envelope_ticks(spec.assignments.front().envelope);
  for (const auto& a : spec.assignments) {
    if (a.offset_ms != 0 || envelope_ticks(a.envelope) != cycle) compact = false;
  }

  if (compact) {
    body.repeat = static_cast<std::uint32_t>(spec.repeat);
    body.delay_ms = static_cast<std::uint32_t>(spec.delay_ms);
    for (const auto& [ch, samples] : rendered.channels)
      body.channels[ch].assign(samples.begin(), samples.begin() + cycle);
  } else {
    body.repeat = 1;
    body.delay_ms = 0;
    for (const auto& [ch, samples] : rendered.channels) body.channels[ch] = samples;
  }
  return body;
}

std::size_t expanded_length(const wire::PatternBody& body) noexcept {
  const auto r = static_cast<std::size_t>(std::max<std::uint32_t>(body.repeat, 1));
  return r * cycle_length(body) + (r - 1) * delay_ticks(body);
}

std::map<int, Samples> expand_payload(const wire::PatternBody& body) {
  std::map<int, Samples> out;
  const auto cycle = cycle_length(body);
  const auto gap = delay_ticks(body);
  const auto r = std::max<std::uint32_t>(body.repeat, 1);
  for (const auto& [ch, samples] : body.channels) {
    Samples stream;
    stream.reserve(expanded_length(body));
    for (std::uint32_t i = 0; i < r; ++i) {
      if (i > 0) stream.insert(stream.end(), gap, 0);
      stream.insert(stream.end(), samples.begin(), samples.end());
      stream.insert(stream.end(), cycle - samples.size(), 0);
    }
    out[ch] = std::move(stream);
  }
  return out;
}

}  // namespace hdesigner
