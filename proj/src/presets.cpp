#include "hdesigner/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace hdesigner {

namespace {

constexpr std::int64_t kDelta = 10;
constexpr std::uint8_t kAllMotors = 0b111;

EnvelopeSpec make_env(double peak, CurveType attack, std::int64_t attack_ms,
                      std::int64_t sustain_ms, CurveType release, std::int64_t release_ms,
                      double floor = 0.0) {
  EnvelopeSpec e;
  e.delta_ms = kDelta;
  e.peak_pct = peak;
  e.min_pct = floor;
  e.attack = {attack_ms, attack};
  e.sustain_ms = sustain_ms;
  e.release = {release_ms, release};
  return e;
}

PatternSpec single(const EnvelopeSpec& env, std::int64_t repeat = 1, std::int64_t delay_ms = 0) {
  PatternSpec p;
  p.assignments.push_back({kAllMotors, env, 0});
  p.repeat = repeat;
  p.delay_ms = delay_ms;
  return p;
}

// Three motors fired in turn, `step_ms` apart. With step < pulse length the
// pulses overlap and the sensation slides instead of hopping.
PatternSpec staggered(const EnvelopeSpec& pulse, std::int64_t step_ms, std::int64_t repeat,
                      std::int64_t delay_ms) {
  PatternSpec p;
  for (int i = 0; i < 3; ++i)
    p.assignments.push_back({static_cast<std::uint8_t>(1u << i), pulse, i * step_ms});
  p.repeat = repeat;
  p.delay_ms = delay_ms;
  return p;
}

std::vector<PresetEntry> build_catalog() {
  using C = CurveType;
  std::vector<PresetEntry> out;
  auto add = [&out](std::string name, PatternSpec spec) {
    validate(spec);
    out.push_back({std::move(name), std::move(spec), true});
  };

  for (std::int64_t ramp : {100, 300, 600})
    add("linear-" + std::to_string(ramp), single(make_env(100, C::Linear, ramp, 200, C::Linear, ramp)));
  add("ease-in-300", single(make_env(100, C::QuadEaseIn, 300, 200, C::QuadEaseIn, 300)));
  add("ease-out-300", single(make_env(100, C::QuadEaseOut, 300, 200, C::QuadEaseOut, 300)));
  add("ease-in-out-300", single(make_env(100, C::QuadEaseIn, 300, 200, C::QuadEaseOut, 300)));
  add("square-pulse", single(make_env(100, C::Square, 50, 250, C::Linear, 0)));

  // Lub on the outer motors, a softer dub 200 ms later in the middle one.
  {
    const auto lub = make_env(100, C::QuadEaseOut, 50, 40, C::QuadEaseIn, 110);
    auto beat = pulse_train(60, lub, 0b101, 4);
    auto dub = lub;
    dub.peak_pct = 70;
    beat.assignments.push_back({0b010, dub, 200});
    add("heartbeat-60", std::move(beat));
  }
  for (double bpm : {60.0, 120.0, 150.0}) {
    add("beat-" + std::to_string(static_cast<int>(bpm)),
        pulse_train(bpm, make_env(100, C::Square, 30, 70, C::Linear, 0), kAllMotors, 6));
  }

  add("rotation", staggered(make_env(100, C::Linear, 100, 0, C::Linear, 100), 200, 3, 400));
  add("sliding", staggered(make_env(90, C::QuadEaseOut, 100, 100, C::QuadEaseIn, 100), 100, 2, 300));
  add("tapping", single(make_env(100, C::Square, 30, 0, C::Linear, 0), 8, 170));
  return out;
}

}  // namespace

const std::vector<PresetEntry>& builtin_presets() {
  static const std::vector<PresetEntry> catalog = build_catalog();
  return catalog;
}

PatternSpec pulse_train(double bpm, const EnvelopeSpec& pulse, std::uint8_t mask,
                        std::int64_t beats) {
  if (!(bpm > 0.0) || !std::isfinite(bpm)) throw ValidationError("bpm", "must be > 0");
  const auto period = static_cast<std::int64_t>(std::llround(60000.0 / bpm));
  const auto pulse_ms = envelope_ticks(pulse) * pulse.delta_ms;
  if (pulse_ms > period) throw ValidationError("bpm", "pulse is longer than one beat");

  PatternSpec p;
  p.assignments.push_back({mask, pulse, 0});
  p.repeat = beats;
  p.delay_ms = period - pulse_ms;
  validate(p);
  return p;
}

std::int64_t cycle_period_ms(const PatternSpec& spec, const Assignment& a) noexcept {
  const auto delta = a.envelope.delta_ms;
  return (envelope_ticks(a.envelope) + ticks_for(spec.delay_ms, delta)) * delta;
}

}  // namespace hdesigner
