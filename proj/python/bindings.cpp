#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hdesigner/envelope.hpp"
#include "hdesigner/pattern_json.hpp"
#include "hdesigner/presets.hpp"
#include "hdesigner/server.hpp"
#include "hdesigner/wire.hpp"

namespace py = pybind11;
namespace hd = hdesigner;

namespace {

py::bytes to_bytes(const hd::wire::WireMessage& m) { return py::bytes(hd::wire::encode(m)); }

py::dict message_dict(const hd::wire::WireMessage& m) {
  py::dict d;
  d["kind"] = std::string(hd::wire::to_string(m.kind));
  d["seq"] = m.seq;
  if (m.pattern) {
    d["delta_ms"] = m.pattern->delta_ms;
    d["repeat"] = m.pattern->repeat;
    d["delay_ms"] = m.pattern->delay_ms;
    d["channels"] = m.pattern->channels;
  }
  if (m.hello) {
    d["device_id"] = m.hello->device_id;
    d["channel_count"] = m.hello->channel_count;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Envelope rendering and wire codec for haptic band patterns";

  py::register_exception<hd::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<hd::TooLongError>(m, "TooLongError", PyExc_ValueError);
  static auto& wire_error = py::register_exception<hd::wire::EncodeError>(m, "WireError", PyExc_ValueError);

  m.def("render_segment",
        [](const std::string& curve, const std::string& role, std::int64_t duration_ms,
           std::int64_t delta_ms, double min_pct, double peak_pct) {
          auto c = hd::parse_curve(curve);
          if (!c) throw hd::ValidationError("curve", "unknown curve '" + curve + "'");
          if (role != "ATTACK" && role != "RELEASE")
            throw hd::ValidationError("role", "must be ATTACK or RELEASE");
          hd::EnvelopeSpec env;
          env.delta_ms = delta_ms;
          env.min_pct = min_pct;
          env.peak_pct = peak_pct;
          const hd::SegmentSpec seg{duration_ms, *c};
          (role == "ATTACK" ? env.attack : env.release) = seg;
          hd::validate(env);
          return hd::render_segment(seg, role == "ATTACK" ? hd::Role::Attack : hd::Role::Release, env);
        },
        py::arg("curve"), py::arg("role"), py::arg("duration_ms"), py::arg("delta_ms"),
        py::arg("min_pct"), py::arg("peak_pct"));

  m.def("render_json", [](const std::string& spec) {
    return hd::preview_json(hd::pattern_from_json_text(spec)).dump();
  }, "Preview JSON for a PatternSpec JSON document");

  m.def("validate_json", [](const std::string& spec) { hd::pattern_from_json_text(spec); });

  m.def("builtin_presets_json", [] {
    auto list = hd::json::array();
    for (const auto& p : hd::builtin_presets()) list.push_back(hd::to_json(p));
    return list.dump();
  });

  m.def("encode_stop", [](std::uint32_t seq) { return to_bytes(hd::wire::WireMessage::make_stop(seq)); });
  m.def("encode_ack", [](std::uint32_t seq) { return to_bytes(hd::wire::WireMessage::make_ack(seq)); });
  m.def("encode_hello", [](std::uint32_t seq, std::string id, int channels) {
    return to_bytes(hd::wire::WireMessage::make_hello(seq, std::move(id), channels));
  });
  m.def("encode_pattern",
        [](std::uint32_t seq, std::uint32_t delta_ms, std::uint32_t repeat, std::uint32_t delay_ms,
           std::map<int, std::vector<std::uint16_t>> channels) {
          return to_bytes(hd::wire::WireMessage::make_pattern(
              seq, {delta_ms, repeat, delay_ms, std::move(channels)}));
        },
        py::arg("seq"), py::arg("delta_ms"), py::arg("repeat"), py::arg("delay_ms"), py::arg("channels"));

  m.def("decode", [](py::bytes data) {
    const std::string raw = data;
    auto result = hd::wire::decode(raw);
    if (auto* e = std::get_if<hd::wire::WireError>(&result)) {
      PyErr_SetString(wire_error.ptr(), e->message().c_str());
      throw py::error_already_set();
    }
    return message_dict(std::get<hd::wire::WireMessage>(result));
  });

  m.attr("PWM_MAX") = hd::kPwmMax;
  m.attr("MAX_SAMPLES_PER_CHANNEL") = hd::kMaxSamplesPerChannel;
  m.attr("MAX_DATAGRAM") = hd::wire::kMaxDatagram;
}
