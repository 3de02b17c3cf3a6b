#include "hdesigner/wire.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

namespace hdesigner::wire {

namespace {

struct Token {
  std::string_view text;
  std::size_t byte;
};

bool is_tag(std::string_view t) noexcept {
  if (t.empty() || t.size() > 8) return false;
  for (char c : t) {
    if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))) return false;
  }
  return true;
}

template <class Int>
std::optional<Int> parse_uint(std::string_view s) noexcept {
  if (s.empty()) return std::nullopt;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

bool all_digits(std::string_view s) noexcept {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

/// Parses TLV triples out of a token list, tracking position for errors.
class Reader {
 public:
  explicit Reader(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool done() const noexcept { return pos_ >= tokens_.size(); }

  struct Field {
    std::string_view tag;
    std::size_t tag_index;
    std::size_t first_value;
    std::size_t count;
  };

  /// Reads one TLV triple header and skips over its values.
  std::variant<Field, WireError> next() {
    const auto tag_index = pos_;
    const auto& tag = tokens_[pos_];
    if (!is_tag(tag.text)) return error(Errc::Malformed, tag_index, "invalid tag");
    if (pos_ + 1 >= tokens_.size()) return error(Errc::Malformed, tag_index, "truncated triple");
    const auto& len_tok = tokens_[pos_ + 1];
    auto len = parse_uint<std::size_t>(len_tok.text);
    if (!len) return error(Errc::Malformed, pos_ + 1, "length is not a non-negative integer");
    const auto remaining = tokens_.size() - (pos_ + 2);
    if (*len > remaining) return error(Errc::Malformed, pos_ + 1, "length exceeds remaining tokens");
    Field f{tag.text, tag_index, pos_ + 2, *len};
    pos_ += 2 + *len;
    return f;
  }

  std::string_view value(std::size_t i) const { return tokens_[i].text; }

  WireError error(Errc code, std::size_t token, std::string detail) const {
    const auto byte = token < tokens_.size() ? tokens_[token].byte
                                             : (tokens_.empty() ? 0 : tokens_.back().byte);
    return WireError{code, token, byte, std::move(detail)};
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void put_field(std::string& out, std::string_view tag, std::string_view value) {
  if (!out.empty()) out += ',';
  out += tag;
  out += ",1,";
  out += value;
}

}  // namespace

std::string_view to_string(MsgKind k) noexcept {
  switch (k) {
    case MsgKind::Pattern: return "PATTERN";
    case MsgKind::Stop: return "STOP";
    case MsgKind::Ack: return "ACK";
    case MsgKind::Hello: return "HELLO";
  }
  return "";
}

std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::Malformed: return "E_MALFORMED";
    case Errc::BadPrefix: return "E_BAD_PREFIX";
    case Errc::Range: return "E_RANGE";
    case Errc::TooLarge: return "E_TOO_LARGE";
  }
  return "";
}

std::string WireError::message() const {
  return std::string(to_string(code)) + " at token " + std::to_string(token) + " (byte " +
         std::to_string(byte) + "): " + detail;
}

bool is_token_safe(std::string_view value) noexcept {
  for (unsigned char c : value) {
    if (c == ',' || c < 0x20 || c >= 0x7f) return false;
  }
  return true;
}

std::string encode(const WireMessage& msg) {
  std::string out;
  put_field(out, "MSG", to_string(msg.kind));
  put_field(out, "SEQ", std::to_string(msg.seq));

  switch (msg.kind) {
    case MsgKind::Stop:
    case MsgKind::Ack:
      break;
    case MsgKind::Hello: {
      if (!msg.hello) throw EncodeError(Errc::Malformed, "HELLO without body");
      const auto& h = *msg.hello;
      if (h.device_id.empty() || !is_token_safe(h.device_id))
        throw EncodeError(Errc::Malformed, "device id is not a CSV-safe token");
      if (h.channel_count < 1 || h.channel_count > kChannels)
        throw EncodeError(Errc::Range, "channel count must be within [1, 8]");
      put_field(out, "ID", h.device_id);
      put_field(out, "NCH", std::to_string(h.channel_count));
      break;
    }
    case MsgKind::Pattern: {
      if (!msg.pattern) throw EncodeError(Errc::Malformed, "PATTERN without body");
      const auto& p = *msg.pattern;
      if (p.delta_ms < 1) throw EncodeError(Errc::Range, "DELTA must be >= 1");
      if (p.repeat < 1) throw EncodeError(Errc::Range, "REP must be >= 1");
      put_field(out, "DELTA", std::to_string(p.delta_ms));
      put_field(out, "REP", std::to_string(p.repeat));
      put_field(out, "DLY", std::to_string(p.delay_ms));
      for (const auto& [ch, samples] : p.channels) {
        if (ch < 0 || ch >= kChannels) throw EncodeError(Errc::Range, "channel index out of range");
        if (samples.size() > kMaxChannelSamples)
          throw EncodeError(Errc::TooLarge, "channel exceeds 512 samples");
        out += ",CH";
        out += std::to_string(ch);
        out += ',';
        out += std::to_string(samples.size());
        for (auto v : samples) {
          if (v > kPwmMax) throw EncodeError(Errc::Range, "PWM value above 1023");
          out += ',';
          out += std::to_string(v);
        }
        if (out.size() > kMaxDatagram) break;
      }
      break;
    }
  }
  if (out.size() > kMaxDatagram)
    throw EncodeError(Errc::TooLarge, "encoded message exceeds " + std::to_string(kMaxDatagram) + " bytes");
  return out;
}

DecodeResult decode(std::string_view bytes) noexcept {
  try {
    if (bytes.empty()) return WireError{Errc::Malformed, 0, 0, "empty message"};
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      const auto c = static_cast<unsigned char>(bytes[i]);
      if (c < 0x20 || c >= 0x7f) {
        const auto token = static_cast<std::size_t>(std::count(bytes.begin(), bytes.begin() + i, ','));
        return WireError{Errc::Malformed, token, i, "control or non-ASCII byte"};
      }
    }

    std::vector<Token> tokens;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= bytes.size(); ++i) {
      if (i == bytes.size() || bytes[i] == ',') {
        tokens.push_back({bytes.substr(start, i - start), start});
        start = i + 1;
      }
    }
    if (tokens.front().text != "MSG") return WireError{Errc::BadPrefix, 0, 0, "first field must be MSG"};
    if (tokens.size() > 3 && tokens[3].text != "SEQ")
      return WireError{Errc::BadPrefix, 3, tokens[3].byte, "second field must be SEQ"};
    Reader rd(std::move(tokens));

    auto first = rd.next();
    if (auto* e = std::get_if<WireError>(&first)) return *e;
    const auto msg_field = std::get<Reader::Field>(first);
    if (msg_field.tag != "MSG") return rd.error(Errc::BadPrefix, 0, "first field must be MSG");
    if (msg_field.count != 1) return rd.error(Errc::Malformed, 1, "MSG length must be 1");

    WireMessage msg;
    const auto kind = rd.value(msg_field.first_value);
    if (kind == "PATTERN") msg.kind = MsgKind::Pattern;
    else if (kind == "STOP") msg.kind = MsgKind::Stop;
    else if (kind == "ACK") msg.kind = MsgKind::Ack;
    else if (kind == "HELLO") msg.kind = MsgKind::Hello;
    else return rd.error(Errc::Malformed, msg_field.first_value, "unknown message kind");

    if (rd.done()) return rd.error(Errc::BadPrefix, 3, "second field must be SEQ");
    auto second = rd.next();
    if (auto* e = std::get_if<WireError>(&second)) return *e;
    const auto seq_field = std::get<Reader::Field>(second);
    if (seq_field.tag != "SEQ") return rd.error(Errc::BadPrefix, seq_field.tag_index, "second field must be SEQ");
    if (seq_field.count != 1) return rd.error(Errc::Malformed, seq_field.tag_index + 1, "SEQ length must be 1");
    {
      const auto text = rd.value(seq_field.first_value);
      auto seq = parse_uint<std::uint32_t>(text);
      if (!seq) {
        return rd.error(all_digits(text) ? Errc::Range : Errc::Malformed, seq_field.first_value,
                        "SEQ must be an unsigned 32-bit integer");
      }
      msg.seq = *seq;
    }

    PatternBody pattern;
    HelloBody hello;
    bool have_delta = false, have_rep = false, have_dly = false, have_id = false, have_nch = false;

    auto scalar = [&](const Reader::Field& f, bool& seen) -> std::optional<WireError> {
      if (seen) return rd.error(Errc::Malformed, f.tag_index, "duplicate field");
      if (f.count != 1) return rd.error(Errc::Malformed, f.tag_index + 1, "length must be 1");
      seen = true;
      return std::nullopt;
    };
    auto u32 = [&](const Reader::Field& f, std::uint32_t min,
                   std::uint32_t& dst) -> std::optional<WireError> {
      const auto text = rd.value(f.first_value);
      auto v = parse_uint<std::uint32_t>(text);
      if (!v) {
        return rd.error(all_digits(text) ? Errc::Range : Errc::Malformed, f.first_value,
                        "value must be an unsigned integer");
      }
      if (*v < min) return rd.error(Errc::Range, f.first_value, "value below minimum");
      dst = *v;
      return std::nullopt;
    };

    while (!rd.done()) {
      auto next = rd.next();
      if (auto* e = std::get_if<WireError>(&next)) return *e;
      const auto f = std::get<Reader::Field>(next);

      if (msg.kind == MsgKind::Pattern) {
        if (f.tag == "DELTA") {
          if (auto e = scalar(f, have_delta)) return *e;
          if (auto e = u32(f, 1, pattern.delta_ms)) return *e;
          continue;
        }
        if (f.tag == "REP") {
          if (auto e = scalar(f, have_rep)) return *e;
          if (auto e = u32(f, 1, pattern.repeat)) return *e;
          continue;
        }
        if (f.tag == "DLY") {
          if (auto e = scalar(f, have_dly)) return *e;
          if (auto e = u32(f, 0, pattern.delay_ms)) return *e;
          continue;
        }
        if (f.tag.size() >= 3 && f.tag.substr(0, 2) == "CH" && all_digits(f.tag.substr(2))) {
          auto idx = parse_uint<int>(f.tag.substr(2));
          if (!idx || *idx >= kChannels)
            return rd.error(Errc::Range, f.tag_index, "channel index out of range");
          if (pattern.channels.count(*idx))
            return rd.error(Errc::Malformed, f.tag_index, "duplicate channel block");
          if (f.count > kMaxChannelSamples)
            return rd.error(Errc::Range, f.tag_index + 1, "channel exceeds 512 samples");
          std::vector<std::uint16_t> samples;
          samples.reserve(f.count);
          for (std::size_t i = 0; i < f.count; ++i) {
            const auto text = rd.value(f.first_value + i);
            auto v = parse_uint<std::uint32_t>(text);
            if (!v) {
              return rd.error(all_digits(text) ? Errc::Range : Errc::Malformed,
                              f.first_value + i, "PWM value must be an integer");
            }
            if (*v > kPwmMax) return rd.error(Errc::Range, f.first_value + i, "PWM value above 1023");
            samples.push_back(static_cast<std::uint16_t>(*v));
          }
          pattern.channels.emplace(*idx, std::move(samples));
          continue;
        }
      } else if (msg.kind == MsgKind::Hello) {
        if (f.tag == "ID") {
          if (auto e = scalar(f, have_id)) return *e;
          hello.device_id = std::string(rd.value(f.first_value));
          if (hello.device_id.empty())
            return rd.error(Errc::Malformed, f.first_value, "device id is empty");
          continue;
        }
        if (f.tag == "NCH") {
          if (auto e = scalar(f, have_nch)) return *e;
          std::uint32_t n = 0;
          if (auto e = u32(f, 1, n)) return *e;
          if (n > kChannels) return rd.error(Errc::Range, f.first_value, "channel count above 8");
          hello.channel_count = static_cast<int>(n);
          continue;
        }
      }
      // Unknown tags are skipped for forward compatibility.
    }

    if (msg.kind == MsgKind::Pattern) {
      if (!have_delta || !have_rep || !have_dly)
        return rd.error(Errc::Malformed, 0, "PATTERN requires DELTA, REP and DLY");
      msg.pattern = std::move(pattern);
    } else if (msg.kind == MsgKind::Hello) {
      if (!have_id || !have_nch) return rd.error(Errc::Malformed, 0, "HELLO requires ID and NCH");
      msg.hello = std::move(hello);
    }
    return msg;
  } catch (const std::exception& e) {
    // Allocation failure is the only way here; still report instead of dying.
    return WireError{Errc::Malformed, 0, 0, e.what()};
  }
}

}  // namespace hdesigner::wire
