#include "hdesigner/playback.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace hdesigner {

namespace {

bool finished(const PlaybackState& s) noexcept {
  const bool last = s.cycle_index + 1 >= s.repeat;
  return last && s.tick_index >= s.cycle_length;
}

void go_idle(PlaybackState& s) noexcept {
  s.phase = Phase::Idle;
  s.levels.fill(0);
}

}  // namespace

PlaybackState load_pattern(const wire::PatternBody& body, std::uint32_t seq, int channel_count) {
  PlaybackState s;
  s.seq = seq;
  s.delta_ms = std::max<std::uint32_t>(body.delta_ms, 1);
  s.repeat = std::max<std::uint32_t>(body.repeat, 1);
  s.delay_ticks = (std::size_t(body.delay_ms) + s.delta_ms - 1) / s.delta_ms;
  for (const auto& [ch, samples] : body.channels) {
    s.cycle_length = std::max(s.cycle_length, samples.size());
    if (ch >= 0 && ch < channel_count && ch < wire::kChannels) s.cycle[ch] = samples;
  }
  for (auto& c : s.cycle) c.resize(s.cycle_length, 0);

  s.phase = Phase::Playing;
  // Empty cycles still play their delay gaps when repeated.
  while (s.phase == Phase::Playing && s.tick_index >= s.cycle_length + s.delay_ticks) {
    if (finished(s)) go_idle(s);
    else ++s.cycle_index;
  }
  if (finished(s)) go_idle(s);
  return s;
}

std::optional<Levels> tick(PlaybackState& s) {
  if (s.phase != Phase::Playing) return std::nullopt;

  for (std::size_t ch = 0; ch < s.cycle.size(); ++ch)
    s.levels[ch] = s.tick_index < s.cycle_length ? s.cycle[ch][s.tick_index] : 0;
  const Levels emitted = s.levels;

  ++s.tick_index;
  if (s.tick_index >= s.cycle_length + s.delay_ticks && !finished(s)) {
    ++s.cycle_index;
    s.tick_index = 0;
  }
  if (finished(s)) go_idle(s);
  return emitted;
}

std::string_view to_string(TraceKind k) noexcept {
  switch (k) {
    case TraceKind::Tick: return "TICK";
    case TraceKind::MsgRx: return "MSG_RX";
    case TraceKind::AckTx: return "ACK_TX";
    case TraceKind::Stopped: return "STOPPED";
    case TraceKind::Replaced: return "REPLACED";
  }
  return "";
}

std::vector<TraceEvent> Player::apply_pending(double t_ms) {
  std::vector<TraceEvent> events;
  while (!pending_.empty()) {
    auto i = std::move(pending_.front());
    pending_.pop_front();
    if (i.pattern) {
      state_ = load_pattern(*i.pattern, i.seq, channel_count_);
      events.push_back({t_ms, TraceKind::Replaced, state_.levels, i.seq, "PATTERN"});
    } else {
      state_ = PlaybackState{};
      events.push_back({t_ms, TraceKind::Stopped, state_.levels, i.seq, "STOP"});
    }
  }
  return events;
}

std::vector<TraceEvent> Player::step(double t_ms) {
  auto events = apply_pending(t_ms);
  if (auto levels = tick(state_))
    events.push_back({t_ms, TraceKind::Tick, *levels, std::nullopt, {}});
  return events;
}

std::string trace_header_jsonl(const std::string& device_id, int channel_count) {
  nlohmann::json h = {{"trace", "hband-sim"},
                      {"version", 1},
                      {"device_id", device_id},
                      {"channels", channel_count}};
  return h.dump();
}

std::string to_jsonl(const TraceEvent& e) {
  nlohmann::json j = {{"t_ms", e.t_ms}, {"kind", std::string(to_string(e.kind))}, {"levels", e.levels}};
  if (e.seq) j["seq"] = *e.seq;
  if (!e.msg.empty()) j["msg"] = e.msg;
  return j.dump();
}

std::optional<TraceEvent> trace_event_from_jsonl(const std::string& line) {
  auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("kind") || !j.contains("t_ms")) return std::nullopt;
  TraceEvent e;
  try {
    e.t_ms = j.at("t_ms").get<double>();
    const auto kind = j.at("kind").get<std::string>();
    bool known = false;
    for (auto k : {TraceKind::Tick, TraceKind::MsgRx, TraceKind::AckTx, TraceKind::Stopped,
                   TraceKind::Replaced}) {
      if (to_string(k) == kind) {
        e.kind = k;
        known = true;
      }
    }
    if (!known) return std::nullopt;
    if (j.contains("levels")) e.levels = j.at("levels").get<Levels>();
    if (j.contains("seq")) e.seq = j.at("seq").get<std::uint32_t>();
    if (j.contains("msg")) e.msg = j.at("msg").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  return e;
}

void dump_trace(std::ostream& out, const std::string& device_id, int channel_count,
                const std::vector<TraceEvent>& events) {
  out << trace_header_jsonl(device_id, channel_count) << '\n';
  for (const auto& e : events) out << to_jsonl(e) << '\n';
}

}  // namespace hdesigner
