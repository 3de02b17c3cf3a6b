#include "hdesigner/pattern_json.hpp"

#include <cmath>

namespace hdesigner {

namespace {

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path, "must be an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path.empty() ? key : path + "." + key, "is required");
  return *it;
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

std::int64_t get_int(const json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  const auto field = join(path, key);
  if (v.is_number_integer()) {
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > std::uint64_t(INT64_MAX))
      throw ValidationError(field, "is out of range");
    return v.get<std::int64_t>();
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && std::trunc(d) == d && std::fabs(d) < 9.0e15)
      return static_cast<std::int64_t>(d);
  }
  throw ValidationError(field, "must be an integer");
}

double get_num(const json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number()) throw ValidationError(join(path, key), "must be a number");
  return v.get<double>();
}

SegmentSpec segment_from(const json& obj, const char* key, const std::string& path) {
  const auto& s = require(obj, key, path);
  const auto here = join(path, key);
  SegmentSpec seg;
  seg.duration_ms = get_int(s, "duration_ms", here);
  const auto& curve = require(s, "curve", here);
  if (!curve.is_string()) throw ValidationError(here + ".curve", "must be a string");
  auto parsed = parse_curve(curve.get<std::string>());
  if (!parsed)
    throw ValidationError(here + ".curve",
                          "unknown curve '" + curve.get<std::string>() +
                              "' (expected LINEAR, QUAD_EASE_IN, QUAD_EASE_OUT or SQUARE)");
  seg.curve = *parsed;
  return seg;
}

json segment_json(const SegmentSpec& s) {
  return {{"duration_ms", s.duration_ms}, {"curve", std::string(to_string(s.curve))}};
}

}  // namespace

json to_json(const EnvelopeSpec& env) {
  return {{"peak_pct", env.peak_pct},
          {"min_pct", env.min_pct},
          {"attack", segment_json(env.attack)},
          {"sustain_ms", env.sustain_ms},
          {"release", segment_json(env.release)}};
}

json to_json(const PatternSpec& spec) {
  json assignments = json::array();
  for (const auto& a : spec.assignments)
    assignments.push_back(
        {{"mask", a.mask}, {"offset_ms", a.offset_ms}, {"envelope", to_json(a.envelope)}});
  return {{"delta_ms", spec.delta_ms()},
          {"repeat", spec.repeat},
          {"delay_ms", spec.delay_ms},
          {"assignments", std::move(assignments)}};
}

json to_json(const RenderedPattern& r) {
  json channels = json::object();
  json segments = json::object();
  for (const auto& [ch, samples] : r.channels) channels[std::to_string(ch)] = samples;
  for (const auto& [ch, spans] : r.segments) {
    json list = json::array();
    for (const auto& s : spans)
      list.push_back({{"label", std::string(to_string(s.label))},
                      {"start_tick", s.start_tick},
                      {"end_tick", s.end_tick}});
    segments[std::to_string(ch)] = std::move(list);
  }
  return {{"delta_ms", r.delta_ms},
          {"length", r.length()},
          {"channels", std::move(channels)},
          {"segments", std::move(segments)}};
}

json to_json(const PresetEntry& p) {
  return {{"name", p.name}, {"builtin", p.builtin}, {"spec", to_json(p.spec)}};
}

PatternSpec pattern_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("body", "must be a JSON object");
  PatternSpec spec;
  const auto delta = get_int(j, "delta_ms", "");
  spec.repeat = get_int(j, "repeat", "");
  spec.delay_ms = get_int(j, "delay_ms", "");

  const auto& list = require(j, "assignments", "");
  if (!list.is_array()) throw ValidationError("assignments", "must be an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto path = "assignments[" + std::to_string(i) + "]";
    const auto& item = list[i];
    Assignment a;
    const auto mask = get_int(item, "mask", path);
    if (mask < 1 || mask > 255) throw ValidationError(path + ".mask", "must be within [1, 255]");
    a.mask = static_cast<std::uint8_t>(mask);
    a.offset_ms = item.is_object() && item.contains("offset_ms") ? get_int(item, "offset_ms", path) : 0;

    const auto& e = require(item, "envelope", path);
    const auto epath = path + ".envelope";
    a.envelope.delta_ms = delta;
    a.envelope.peak_pct = get_num(e, "peak_pct", epath);
    a.envelope.min_pct = get_num(e, "min_pct", epath);
    a.envelope.attack = segment_from(e, "attack", epath);
    a.envelope.sustain_ms = get_int(e, "sustain_ms", epath);
    a.envelope.release = segment_from(e, "release", epath);
    spec.assignments.push_back(a);
  }
  if (delta < 1) throw ValidationError("delta_ms", "must be >= 1");
  validate(spec);
  return spec;
}

PatternSpec pattern_from_json_text(std::string_view text) {
  auto j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("body", "is not valid JSON");
  return pattern_from_json(j);
}

}  // namespace hdesigner
