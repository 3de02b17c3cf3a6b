// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <httplib.h>

#include <algorithm>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "hdesigner/library.hpp"
#include "hdesigner/payload.hpp"
#include "hdesigner/playback.hpp"
#include "hdesigner/server.hpp"
#include "support/fake_band.hpp"
#include "support/generators.hpp"

using namespace hdesigner;
namespace fs = std::filesystem;
using Seconds = std::chrono::duration<double>;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define EXPECT(cond, what)                                                   \
  do {                                                                       \
    if (!(cond)) {                                                           \
      std::ostringstream os_;                                                \
      os_ << what;                                                           \
      throw Failure(os_.str());                                              \
    }                                                                        \
  } while (0)

int failures = 0;

void criterion(const std::string& name, const std::function<std::string()>& body) {
  const auto t0 = Clock::now();
  std::string detail;
  bool ok = false;
  try {
    detail = body();
    ok = true;
  } catch (const std::exception& e) {
    detail = e.what();
  }
  const double s = Seconds(Clock::now() - t0).count();
  std::printf("%s  %-28s %6.2fs  %s\n", ok ? "PASS" : "FAIL", name.c_str(), s, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

struct TempDir {
  fs::path path;
  TempDir() {
    char tmpl[] = "/tmp/hdesigner-acc-XXXXXX";
    path = mkdtemp(tmpl);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Child process with stdout on a pipe.
class Child {
 public:
  explicit Child(std::vector<std::string> argv) {
    int fds[2];
    if (pipe(fds) != 0) throw std::runtime_error("pipe");
    pid_ = fork();
    if (pid_ < 0) throw std::runtime_error("fork");
    if (pid_ == 0) {
      dup2(fds[1], STDOUT_FILENO);
      close(fds[0]);
      close(fds[1]);
      const int devnull = open("/dev/null", O_WRONLY);
      if (devnull >= 0) dup2(devnull, STDERR_FILENO);
      std::vector<char*> args;
      for (auto& a : argv) args.push_back(a.data());
      args.push_back(nullptr);
      execv(args[0], args.data());
      _exit(127);
    }
    close(fds[1]);
    out_ = fds[0];
  }
  Child(const Child&) = delete;
  ~Child() {
    kill(SIGKILL);
    if (out_ >= 0) close(out_);
  }

  std::string read_line(std::chrono::milliseconds timeout = 5000ms) {
    const auto deadline = Clock::now() + timeout;
    while (true) {
      if (auto nl = buf_.find('\n'); nl != std::string::npos) {
        auto line = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      if (left.count() <= 0) throw std::runtime_error("child produced no output");
      pollfd p{out_, POLLIN, 0};
      if (poll(&p, 1, static_cast<int>(left.count())) <= 0) continue;
      char tmp[512];
      const auto n = read(out_, tmp, sizeof tmp);
      if (n <= 0) throw std::runtime_error("child exited early");
      buf_.append(tmp, static_cast<std::size_t>(n));
    }
  }

  void kill(int sig) {
    if (pid_ <= 0) return;
    ::kill(pid_, sig);
    waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }

 private:
  pid_t pid_ = -1;
  int out_ = -1;
  std::string buf_;
};

struct ServerProcess {
  std::unique_ptr<Child> child;
  int http_port = 0;
  int udp_port = 0;

  explicit ServerProcess(const fs::path& library, std::vector<std::string> extra = {}) {
    std::vector<std::string> argv{HDESIGNER_SERVER_BIN, "--host", "127.0.0.1", "--http-port", "0",
                                  "--udp-port", "0", "--library-path", library.string()};
    argv.insert(argv.end(), extra.begin(), extra.end());
    child = std::make_unique<Child>(argv);
    // "hdesigner-server: http 127.0.0.1:PORT, udp PORT, library PATH"
    const auto line = child->read_line();
    if (std::sscanf(line.c_str(), "hdesigner-server: http 127.0.0.1:%d, udp %d", &http_port, &udp_port) != 2)
      throw std::runtime_error("unexpected server banner: " + line);
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", http_port);
    c.set_read_timeout(10, 0);
    return c;
  }
};

json parse_body(const httplib::Result& r, int want_status) {
  EXPECT(r, "HTTP request failed: " << httplib::to_string(r.error()));
  EXPECT(r->status == want_status, "HTTP " << r->status << " (wanted " << want_status << "): " << r->body);
  return json::parse(r->body);
}

// ---------------------------------------------------------------------------
// Exact-rational envelope oracle, independent of the renderer.

struct Rational {
  long long num, den;
};

std::vector<int> oracle_attack(CurveType curve, long long duration, long long delta, long long min_pct,
                               long long peak_pct, bool release) {
  const long long n = (duration + delta - 1) / delta;
  std::vector<int> out;
  for (long long i = 0; i < n; ++i) {
    Rational u{i + 1, n};
    if (release) u = {n - (i + 1), n};
    Rational f{};
    switch (curve) {
      case CurveType::Linear: f = u; break;
      case CurveType::QuadEaseIn: f = {u.num * u.num, u.den * u.den}; break;
      case CurveType::QuadEaseOut: f = {u.num * (2 * u.den - u.num), u.den * u.den}; break;
      case CurveType::Square: f = {1, 1}; break;
    }
    // pct = min + (peak-min) * f ; pwm = round(pct * 1023 / 100), halves away from zero
    const long long num = (min_pct * f.den + (peak_pct - min_pct) * f.num) * 1023;
    const long long den = f.den * 100;
    out.push_back(static_cast<int>((2 * num + den) / (2 * den)));
  }
  return out;
}

std::vector<int> as_ints(const Samples& s) { return {s.begin(), s.end()}; }

Samples segment(SegmentSpec seg, Role role, std::int64_t delta, std::int64_t lo, std::int64_t hi) {
  EnvelopeSpec env;
  env.delta_ms = delta;
  env.min_pct = lo;
  env.peak_pct = hi;
  return render_segment(seg, role, env);
}

// ---------------------------------------------------------------------------

std::string retry_contract() {
  TransportConfig c;
  c.udp_port = 0;
  c.bind_host = "127.0.0.1";
  c.ack_timeout = 200ms;
  Transport t(c);
  t.start();
  testing::FakeBand band("band-retry");
  EXPECT(band.hello(t.port()), "band did not register");
  band.start();

  const auto t0 = Clock::now();
  std::string summary;
  for (int drops = 0; drops <= 4; ++drops) {
    band.drop_first(drops);
    const auto before = t.stats().transmissions;
    const auto r = t.send_reliable("band-retry", Outgoing::play({10, 1, 0, {{0, {512}}}}));
    const auto sent = t.stats().transmissions - before;
    if (drops < 4) {
      EXPECT(r.status == DeliveryStatus::Delivered && r.attempts == drops + 1,
             drops << " drops: " << to_string(r.status) << " after " << r.attempts);
    } else {
      EXPECT(r.status == DeliveryStatus::Failed && r.attempts == 4 && sent == 4 && band.receipts(r.seq) == 4,
             "4 drops: " << to_string(r.status) << " after " << r.attempts << ", " << sent << " transmissions");
    }
    summary += std::to_string(drops) + "->" + std::to_string(r.attempts) + " ";
  }
  const double s = Seconds(Clock::now() - t0).count();
  EXPECT(s < 5.0, "took " << s << " s");
  return "attempts " + summary + "(4 = FAILED)";
}

std::string codec() {
  const auto t0 = Clock::now();
  testing::Rng rng(20240611);
  for (int i = 0; i < 10000; ++i) {
    const auto m = testing::random_message(rng);
    const auto bytes = wire::encode(m);
    const auto back = wire::decode(bytes);
    EXPECT(std::holds_alternative<wire::WireMessage>(back) && std::get<wire::WireMessage>(back) == m,
           "round trip failed for " << bytes.substr(0, 80));
  }
  std::mt19937_64 bytes_rng(7);
  std::size_t accepted = 0;
  double worst_ms = 0;
  for (int i = 0; i < 100000; ++i) {
    std::string junk(bytes_rng() % 4097, '\0');
    for (auto& ch : junk) ch = static_cast<char>(bytes_rng());
    const auto s0 = Clock::now();
    const auto r = wire::decode(junk);
    worst_ms = std::max(worst_ms, std::chrono::duration<double, std::milli>(Clock::now() - s0).count());
    accepted += std::holds_alternative<wire::WireMessage>(r);
  }
  const double s = Seconds(Clock::now() - t0).count();
  EXPECT(s < 60.0, "took " << s << " s");
  return "10000 round trips, 100000 fuzz inputs (" + std::to_string(accepted) + " decoded), slowest " +
         std::to_string(worst_ms).substr(0, 5) + " ms";
}

std::string golden_values() {
  const std::vector<int> linear{205, 409, 614, 818, 1023};
  const std::vector<int> ease_in{41, 164, 368, 655, 1023};
  EXPECT(oracle_attack(CurveType::Linear, 50, 10, 0, 100, false) == linear, "oracle disagrees on LINEAR");
  EXPECT(oracle_attack(CurveType::QuadEaseIn, 50, 10, 0, 100, false) == ease_in, "oracle disagrees on QUAD_EASE_IN");
  EXPECT(as_ints(segment({50, CurveType::Linear}, Role::Attack, 10, 0, 100)) == linear, "LINEAR mismatch");
  EXPECT(as_ints(segment({50, CurveType::QuadEaseIn}, Role::Attack, 10, 0, 100)) == ease_in,
         "QUAD_EASE_IN mismatch");

  // The oracle also agrees with the renderer well beyond the two vectors.
  testing::Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const auto curve = testing::random_curve(rng);
    const auto delta = testing::uniform(rng, 1, 20);
    const auto duration = testing::uniform(rng, 0, 300);
    const auto lo = testing::uniform(rng, 0, 100);
    const auto hi = testing::uniform(rng, lo, 100);
    for (bool release : {false, true}) {
      if (release && curve == CurveType::Square) continue;
      const auto got = segment({duration, curve}, release ? Role::Release : Role::Attack, delta, lo, hi);
      EXPECT(as_ints(got) == oracle_attack(curve, duration, delta, lo, hi, release),
             "oracle mismatch at curve " << static_cast<int>(curve) << " d=" << duration << " delta=" << delta);
    }
  }

#ifdef HDESIGNER_ORACLE_SCRIPT
  const std::string cmd = std::string("python3 ") + HDESIGNER_ORACLE_SCRIPT + " --check > /dev/null 2>&1";
  EXPECT(std::system(cmd.c_str()) == 0, "python oracle --check failed");
  return "exact; C++ rational oracle + python oracle agree";
#else
  return "exact; C++ rational oracle agrees";
#endif
}

std::string length_laws() {
  testing::Rng rng(1000);
  int checked = 0;
  while (checked < 1000) {
    const auto spec = testing::random_pattern(rng);
    RenderedPattern r;
    try {
      r = render_pattern(spec);
    } catch (const TooLongError&) {
      continue;
    }
    ++checked;
    const auto delta = spec.delta_ms();
    const auto delay_ticks = (spec.delay_ms + delta - 1) / delta;
    std::size_t longest = 0;
    for (const auto& a : spec.assignments) {
      const auto law = static_cast<std::size_t>(spec.repeat * envelope_ticks(a.envelope) +
                                                (spec.repeat - 1) * delay_ticks + a.offset_ms / delta);
      longest = std::max(longest, law);
      for (int ch = 0; ch < kMaxChannels; ++ch) {
        if (!(a.mask & (1u << ch))) continue;
        const auto& samples = r.channels.at(ch);
        const auto& spans = r.segments.at(ch);
        // The channel's own content ends at the law; anything after is trailing idle.
        const bool ends_at_law = law == samples.size() ||
                                 std::any_of(spans.begin(), spans.end(), [&](const SegmentSpan& s) {
                                   return s.start_tick == law && s.end_tick == samples.size() && s.label == SegmentLabel::Delay;
                                 });
        EXPECT(ends_at_law, "channel " << ch << " content does not end at tick " << law);
        for (auto v : samples) EXPECT(v <= kPwmMax, "sample " << v << " out of range");
      }

      const auto& env = a.envelope;
      const auto attack = render_segment(env.attack, Role::Attack, env);
      const auto release = render_segment(env.release, Role::Release, env);
      EXPECT(std::is_sorted(attack.begin(), attack.end()), "attack not monotonic");
      EXPECT(std::is_sorted(release.rbegin(), release.rend()), "release not monotonic");

      for (auto role : {Role::Attack, Role::Release}) {
        const auto& seg = role == Role::Attack ? env.attack : env.release;
        auto curve = [&](CurveType c) {
          return render_segment({seg.duration_ms, c}, role, env);
        };
        const auto in = curve(CurveType::QuadEaseIn), lin = curve(CurveType::Linear),
                   out = curve(CurveType::QuadEaseOut);
        for (std::size_t i = 0; i + 1 < lin.size(); ++i)
          EXPECT(in[i] <= lin[i] && lin[i] <= out[i], "curve ordering broken at tick " << i);
      }
    }
    EXPECT(r.length() == longest, "length " << r.length() << " != " << longest);
  }
  return "1000 specs";
}

// Trace events from a hband-sim JSONL file.
std::vector<TraceEvent> read_trace(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);  // header
  std::vector<TraceEvent> out;
  while (std::getline(in, line))
    if (auto e = trace_event_from_jsonl(line)) out.push_back(*e);
  return out;
}

std::string end_to_end() {
  const auto t0 = Clock::now();
  TempDir dir;
  const auto trace_path = dir.path / "trace.jsonl";
  // Ignoring the first ACK of every message forces one real retransmission.
  ServerProcess server(dir.path / "lib.json", {"--fault-drop-acks-n", "1"});
  Child sim({HDESIGNER_SIM_BIN, "--server", "127.0.0.1:" + std::to_string(server.udp_port), "--id", "band-e2e",
             "--channels", "3", "--hello-interval-ms", "500", "--trace", trace_path.string()});
  auto http = server.client();

  bool online = false;
  for (int i = 0; i < 100 && !online; ++i) {
    auto r = http.Get("/api/devices");
    online = r && r->body.find("band-e2e") != std::string::npos;
    if (!online) std::this_thread::sleep_for(50ms);
  }
  EXPECT(online, "simulator never registered");

  auto spec = parse_body(http.Get("/api/presets/heartbeat-60"), 200)["spec"];
  spec["repeat"] = 3;
  const auto first = parse_body(http.Post("/api/devices/band-e2e/play", spec.dump(), "application/json"), 200);
  EXPECT(first["status"] == "DELIVERED", "play: " << first.dump());
  const auto play_seq = first["seq"].get<std::uint32_t>();
  std::this_thread::sleep_for(3000ms);  // 3 cycles of 1 s

  const auto second = parse_body(http.Post("/api/devices/band-e2e/play", spec.dump(), "application/json"), 200);
  std::this_thread::sleep_for(1500ms);
  const auto stop = parse_body(http.Post("/api/devices/band-e2e/stop", "", "application/json"), 200);
  const auto stop_seq = stop["seq"].get<std::uint32_t>();
  std::this_thread::sleep_for(200ms);
  sim.kill(SIGTERM);
  const auto trace = read_trace(trace_path);
  EXPECT(!trace.empty(), "empty trace");

  // Onsets of channel 0 during the first pattern.
  std::vector<double> onsets;
  bool in_first = false;
  std::uint16_t prev = 0;
  for (const auto& e : trace) {
    if (e.kind == TraceKind::Replaced) {
      in_first = e.seq == play_seq;
      prev = 0;
    }
    if (!in_first || e.kind != TraceKind::Tick) continue;
    if (e.levels[0] != 0 && prev == 0) onsets.push_back(e.t_ms);
    prev = e.levels[0];
  }
  EXPECT(onsets.size() == 3, "expected 3 onsets, saw " << onsets.size());
  std::string spacing;
  for (std::size_t i = 1; i < onsets.size(); ++i) {
    const double gap = onsets[i] - onsets[i - 1];
    EXPECT(std::abs(gap - 1000.0) <= 100.0, "onset spacing " << gap << " ms");
    spacing += std::to_string(static_cast<int>(gap)) + (i + 1 < onsets.size() ? "/" : "");
  }

  // STOP mid-cycle.
  auto rx = std::find_if(trace.begin(), trace.end(),
                         [&](const TraceEvent& e) { return e.kind == TraceKind::MsgRx && e.seq == stop_seq; });
  EXPECT(rx != trace.end(), "STOP never reached the band");
  auto stopped = std::find_if(rx, trace.end(), [](const TraceEvent& e) { return e.kind == TraceKind::Stopped; });
  EXPECT(stopped != trace.end(), "no STOPPED event");
  EXPECT(std::all_of(stopped->levels.begin(), stopped->levels.end(), [](auto v) { return v == 0; }),
         "levels not zero after STOP");
  const double stop_latency = stopped->t_ms - rx->t_ms;
  EXPECT(stop_latency <= 10.0 + 20.0, "STOP took " << stop_latency << " ms");
  bool ticked_before_stop = false;
  for (auto it = trace.begin(); it != rx; ++it)
    if (it->kind == TraceKind::Tick && it->t_ms > trace.front().t_ms) ticked_before_stop = true;
  EXPECT(ticked_before_stop, "pattern was not playing when STOP arrived");
  EXPECT(std::none_of(stopped, trace.end(), [](const TraceEvent& e) { return e.kind == TraceKind::Tick; }),
         "ticks after STOP");

  // Duplicate retransmission applied exactly once.
  const auto count = [&](TraceKind k, std::uint32_t seq) {
    return std::count_if(trace.begin(), trace.end(), [&](const TraceEvent& e) { return e.kind == k && e.seq == seq; });
  };
  EXPECT(first["attempts"] == 2, "expected a retransmission, attempts=" << first["attempts"]);
  EXPECT(count(TraceKind::MsgRx, play_seq) == 2, "band saw " << count(TraceKind::MsgRx, play_seq) << " copies");
  EXPECT(count(TraceKind::Replaced, play_seq) == 1, "pattern applied " << count(TraceKind::Replaced, play_seq) << " times");
  EXPECT(second["status"] == "DELIVERED", "second play: " << second.dump());

  const double s = Seconds(Clock::now() - t0).count();
  EXPECT(s < 15.0, "took " << s << " s");
  std::ostringstream os;
  os << "onsets " << spacing << " ms, stop " << stop_latency << " ms, duplicate applied once";
  return os.str();
}

std::string csv_channels_from_wire(const json& wire_json) {
  std::vector<std::pair<int, json>> blocks;
  for (const auto& [k, v] : wire_json["channels"].items()) blocks.emplace_back(std::stoi(k), v);
  std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out;
  for (const auto& [ch, samples] : blocks) {
    if (!out.empty()) out += ',';
    out += "CH" + std::to_string(ch) + "," + std::to_string(samples.size());
    for (const auto& v : samples) out += "," + std::to_string(v.get<int>());
  }
  return out;
}

std::string tokens_from(const std::string& datagram, const std::string& first_prefix) {
  auto pos = datagram.find("," + first_prefix);
  return pos == std::string::npos ? std::string() : datagram.substr(pos + 1);
}

std::string preview_play_consistency() {
  TempDir dir;
  ServerConfig c;
  c.host = "127.0.0.1";
  c.http_port = 0;
  c.library_path = dir.path / "lib.json";
  c.transport.udp_port = 0;
  c.transport.bind_host = "127.0.0.1";
  ApiServer server(c);
  server.start();
  testing::FakeBand band("band-wire", 8);
  EXPECT(band.hello(server.transport().port()), "band did not register");
  band.start();
  httplib::Client http("127.0.0.1", server.http_port());

  testing::Rng rng(95);
  int compact = 0;
  for (int done = 0; done < 100;) {
    const auto spec = to_json(testing::random_pattern(rng)).dump();
    auto preview = http.Post("/api/render", spec, "application/json");
    EXPECT(preview, "render request failed");
    if (preview->status == 422) continue;
    const auto p = parse_body(preview, 200);
    const auto before = band.raw().size();
    const auto play = parse_body(http.Post("/api/devices/band-wire/play", spec, "application/json"), 200);
    EXPECT(play["status"] == "DELIVERED", "play: " << play.dump());
    const auto raw = band.raw();
    EXPECT(raw.size() == before + 1, "expected one datagram");
    const auto& datagram = raw.back();

    EXPECT(tokens_from(datagram, "CH") == csv_channels_from_wire(p["wire"]),
           "CH bytes differ from preview\n  wire:    " << tokens_from(datagram, "CH").substr(0, 120));
    const auto decoded = std::get<wire::WireMessage>(wire::decode(datagram));
    EXPECT(decoded.pattern->repeat == p["wire"]["repeat"] && decoded.pattern->delay_ms == p["wire"]["delay_ms"],
           "REP/DLY differ from preview");
    // What the band plays back is exactly the preview.
    for (const auto& [ch, samples] : expand_payload(*decoded.pattern))
      EXPECT(json(samples) == p["channels"][std::to_string(ch)], "expanded channel " << ch << " differs");
    compact += decoded.pattern->repeat > 1;
    ++done;
  }
  return "100 specs (" + std::to_string(compact) + " sent as one cycle)";
}

std::string library_persistence() {
  TempDir dir;
  const auto lib = dir.path / "lib.json";
  testing::Rng rng(50);
  std::map<std::string, json> saved;
  {
    ServerProcess server(lib);
    auto http = server.client();
    while (saved.size() < 50) {
      auto spec = testing::random_pattern(rng);
      try {
        render_pattern(spec);
      } catch (const TooLongError&) {
      }
      const auto name = "user-" + std::to_string(saved.size());
      const auto j = to_json(spec);
      parse_body(http.Put(("/api/presets/" + name).c_str(), j.dump(), "application/json"), 201);
      saved[name] = j;
    }
    server.child->kill(SIGKILL);
  }
  {
    ServerProcess server(lib);
    auto http = server.client();
    const auto list = parse_body(http.Get("/api/presets"), 200);
    std::size_t users = 0;
    for (const auto& p : list) {
      if (p["builtin"] == true) continue;
      ++users;
      const auto it = saved.find(p["name"]);
      EXPECT(it != saved.end(), "unexpected preset " << p["name"]);
      EXPECT(p["spec"] == it->second, "preset " << it->first << " changed across restart");
    }
    EXPECT(users == 50, "restart lists " << users << " user presets");
    server.child->kill(SIGKILL);
  }

  // Kill the server at random points while it is saving.
  std::mt19937_64 kill_rng(100);
  int mid_write = 0;
  for (int trial = 0; trial < 100; ++trial) {
    ServerProcess server(lib);
    std::atomic<bool> go{true};
    std::thread writer([&] {
      auto http = server.client();
      http.set_connection_timeout(0, 200000);
      int n = 0;
      while (go) {
        auto j = saved.begin()->second;
        j["repeat"] = 1 + (n++ % 5);
        http.Put(("/api/presets/churn-" + std::to_string(n % 7)).c_str(), j.dump(), "application/json");
      }
    });
    std::this_thread::sleep_for(std::chrono::microseconds(2000 + kill_rng() % 30000));
    server.child->kill(SIGKILL);
    go = false;
    writer.join();

    std::ifstream in(lib);
    std::stringstream text;
    text << in.rdbuf();
    const auto j = json::parse(text.str(), nullptr, false);
    EXPECT(!j.is_discarded(), "trial " << trial << ": library is not valid JSON");
    try {
      library_from_json(j);
    } catch (const std::exception& e) {
      throw Failure("trial " + std::to_string(trial) + ": " + e.what());
    }
    bool torn = false;
    for (const auto& entry : fs::directory_iterator(dir.path))
      torn |= entry.path().filename().string().find(".tmp.") != std::string::npos;
    mid_write += torn;
  }
  return "50 presets survive SIGKILL + restart; 100 kills during save, file always parses (" +
         std::to_string(mid_write) + " killed mid-write)";
}

}  // namespace

int main() {
  std::signal(SIGPIPE, SIG_IGN);
  criterion("retry contract", retry_contract);
  criterion("codec round trip + fuzz", codec);
  criterion("envelope golden values", golden_values);
  criterion("length laws", length_laws);
  criterion("end to end over loopback", end_to_end);
  criterion("preview/play consistency", preview_play_consistency);
  criterion("library persistence", library_persistence);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
