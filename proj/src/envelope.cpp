#include "hdesigner/envelope.hpp"

#include <algorithm>
#include <cmath>

namespace hdesigner {

namespace {

// Upper bounds that keep all tick arithmetic inside int64. Anything near
// them is rejected later as too long anyway.
constexpr std::int64_t kMaxDurationMs = 86'400'000;
constexpr std::int64_t kMaxRepeat = 1'000'000;

double shape(CurveType c, double u) noexcept {
  switch (c) {
    case CurveType::Linear: return u;
    case CurveType::QuadEaseIn: return u * u;
    case CurveType::QuadEaseOut: return 1.0 - (1.0 - u) * (1.0 - u);
    case CurveType::Square: return 1.0;
  }
  return 0.0;
}

void check_duration(std::int64_t v, const std::string& field) {
  if (v < 0) throw ValidationError(field, "must be >= 0");
  if (v > kMaxDurationMs) throw ValidationError(field, "must be <= 86400000");
}

void check_pct(double v, const std::string& field) {
  if (!std::isfinite(v) || v < 0.0 || v > 100.0)
    throw ValidationError(field, "must be within [0, 100]");
}

}  // namespace

std::string_view to_string(CurveType c) noexcept {
  switch (c) {
    case CurveType::Linear: return "LINEAR";
    case CurveType::QuadEaseIn: return "QUAD_EASE_IN";
    case CurveType::QuadEaseOut: return "QUAD_EASE_OUT";
    case CurveType::Square: return "SQUARE";
  }
  return "";
}

std::optional<CurveType> parse_curve(std::string_view name) noexcept {
  for (auto c : {CurveType::Linear, CurveType::QuadEaseIn, CurveType::QuadEaseOut,
                 CurveType::Square}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view to_string(SegmentLabel l) noexcept {
  switch (l) {
    case SegmentLabel::Attack: return "ATTACK";
    case SegmentLabel::Sustain: return "SUSTAIN";
    case SegmentLabel::Release: return "RELEASE";
    case SegmentLabel::Delay: return "DELAY";
    case SegmentLabel::Offset: return "OFFSET";
  }
  return "";
}

void validate(const EnvelopeSpec& env, const std::string& path) {
  if (env.delta_ms < 1) throw ValidationError(path + ".delta_ms", "must be >= 1");
  if (env.delta_ms > kMaxDurationMs)
    throw ValidationError(path + ".delta_ms", "must be <= 86400000");
  check_pct(env.peak_pct, path + ".peak_pct");
  check_pct(env.min_pct, path + ".min_pct");
  if (env.min_pct > env.peak_pct)
    throw ValidationError(path + ".min_pct", "must not exceed peak_pct");
  check_duration(env.attack.duration_ms, path + ".attack.duration_ms");
  check_duration(env.sustain_ms, path + ".sustain_ms");
  check_duration(env.release.duration_ms, path + ".release.duration_ms");
}

void validate(const PatternSpec& spec) {
  if (spec.repeat < 1) throw ValidationError("repeat", "must be >= 1");
  if (spec.repeat > kMaxRepeat) throw ValidationError("repeat", "must be <= 1000000");
  check_duration(spec.delay_ms, "delay_ms");
  if (spec.assignments.empty())
    throw ValidationError("assignments", "at least one assignment is required");

  const auto delta = spec.assignments.front().envelope.delta_ms;
  std::uint8_t used = 0;
  for (std::size_t i = 0; i < spec.assignments.size(); ++i) {
    const auto& a = spec.assignments[i];
    const auto path = "assignments[" + std::to_string(i) + "]";
    if (a.mask == 0) throw ValidationError(path + ".mask", "must select at least one channel");
    if (a.mask & used)
      throw ValidationError(path + ".mask", "overlaps the mask of an earlier assignment");
    used |= a.mask;
    validate(a.envelope, path + ".envelope");
    if (a.envelope.delta_ms != delta)
      throw ValidationError(path + ".envelope.delta_ms",
                            "all assignments must share one delta_ms");
    check_duration(a.offset_ms, path + ".offset_ms");
    if (a.offset_ms % delta != 0)
      throw ValidationError(path + ".offset_ms", "must be a multiple of delta_ms");
  }
}

std::uint16_t pct_to_pwm(double pct) noexcept {
  // std::round breaks ties away from zero.
  const double v = std::round(pct * kPwmMax / 100.0);
  return static_cast<std::uint16_t>(std::clamp(v, 0.0, double(kPwmMax)));
}

namespace {

// Exact curve value for whole-number percentages: u = k/n, result rounded
// half away from zero without floating point error at ties.
std::uint16_t exact_pwm(CurveType c, std::int64_t k, std::int64_t n, std::int64_t lo, std::int64_t hi) {
  using i128 = __int128;
  i128 num = 0, den = 1;
  switch (c) {
    case CurveType::Linear: num = k; den = n; break;
    case CurveType::QuadEaseIn: num = i128(k) * k; den = i128(n) * n; break;
    case CurveType::QuadEaseOut: num = i128(k) * (2 * n - k); den = i128(n) * n; break;
    case CurveType::Square: num = 1; den = 1; break;
  }
  const i128 top = (i128(lo) * den + i128(hi - lo) * num) * kPwmMax;
  const i128 bottom = den * 100;
  const auto v = static_cast<std::int64_t>((2 * top + bottom) / (2 * bottom));
  return static_cast<std::uint16_t>(std::clamp<std::int64_t>(v, 0, kPwmMax));
}

bool whole(double v) { return v == std::floor(v); }

}  // namespace

Samples render_segment(const SegmentSpec& seg, Role role, const EnvelopeSpec& env) {
  const auto n = ticks_for(seg.duration_ms, env.delta_ms);
  Samples out;
  out.reserve(static_cast<std::size_t>(n));
  const bool exact = whole(env.min_pct) && whole(env.peak_pct);
  const double span = env.peak_pct - env.min_pct;
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = role == Role::Attack ? i + 1 : n - (i + 1);
    if (exact) {
      out.push_back(exact_pwm(seg.curve, k, n, static_cast<std::int64_t>(env.min_pct),
                              static_cast<std::int64_t>(env.peak_pct)));
      continue;
    }
    out.push_back(pct_to_pwm(env.min_pct + span * shape(seg.curve, double(k) / double(n))));
  }
  return out;
}

RenderedEnvelope render_envelope(const EnvelopeSpec& env) {
  RenderedEnvelope out;
  auto append = [&out](SegmentLabel label, const Samples& s) {
    if (s.empty()) return;
    const auto start = out.samples.size();
    out.samples.insert(out.samples.end(), s.begin(), s.end());
    out.segments.push_back({label, start, out.samples.size()});
  };
  append(SegmentLabel::Attack, render_segment(env.attack, Role::Attack, env));
  append(SegmentLabel::Sustain,
         Samples(static_cast<std::size_t>(ticks_for(env.sustain_ms, env.delta_ms)),
                 pct_to_pwm(env.peak_pct)));
  append(SegmentLabel::Release, render_segment(env.release, Role::Release, env));
  return out;
}

std::int64_t envelope_ticks(const EnvelopeSpec& env) noexcept {
  return ticks_for(env.attack.duration_ms, env.delta_ms) +
         ticks_for(env.sustain_ms, env.delta_ms) +
         ticks_for(env.release.duration_ms, env.delta_ms);
}

std::int64_t channel_ticks(const PatternSpec& spec, const Assignment& a) noexcept {
  const auto delta = a.envelope.delta_ms;
  return spec.repeat * envelope_ticks(a.envelope) +
         (spec.repeat - 1) * ticks_for(spec.delay_ms, delta) + a.offset_ms / delta;
}

RenderedPattern render_pattern(const PatternSpec& spec) {
  validate(spec);

  std::int64_t longest = 0;
  for (const auto& a : spec.assignments) longest = std::max(longest, channel_ticks(spec, a));
  if (longest > static_cast<std::int64_t>(kMaxSamplesPerChannel))
    throw TooLongError(static_cast<std::size_t>(longest));

  RenderedPattern out;
  out.delta_ms = spec.delta_ms();
  const auto total = static_cast<std::size_t>(longest);
  const auto delay_ticks = static_cast<std::size_t>(ticks_for(spec.delay_ms, out.delta_ms));

  for (const auto& a : spec.assignments) {
    const auto env = render_envelope(a.envelope);
    Samples stream;
    std::vector<SegmentSpan> spans;
    stream.reserve(total);
    auto silence = [&](SegmentLabel label, std::size_t n) {
      if (n == 0) return;
      spans.push_back({label, stream.size(), stream.size() + n});
      stream.insert(stream.end(), n, 0);
    };

    silence(SegmentLabel::Offset, static_cast<std::size_t>(a.offset_ms / out.delta_ms));
    for (std::int64_t r = 0; r < spec.repeat; ++r) {
      if (r > 0) silence(SegmentLabel::Delay, delay_ticks);
      const auto base = stream.size();
      stream.insert(stream.end(), env.samples.begin(), env.samples.end());
      for (const auto& s : env.segments)
        spans.push_back({s.label, base + s.start_tick, base + s.end_tick});
    }
    // Channels that finish early sit idle until the longest one ends.
    silence(SegmentLabel::Delay, total - stream.size());

    for (int ch = 0; ch < kMaxChannels; ++ch) {
      if (a.mask & (1u << ch)) {
        out.channels[ch] = stream;
        out.segments[ch] = spans;
      }
    }
  }
  return out;
}

}  // namespace hdesigner
