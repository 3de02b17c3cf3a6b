#pragma once

#include <nlohmann/json.hpp>

#include "hdesigner/envelope.hpp"
#include "hdesigner/presets.hpp"

namespace hdesigner {

using json = nlohmann::json;

json to_json(const EnvelopeSpec& env);
json to_json(const PatternSpec& spec);
json to_json(const RenderedPattern& rendered);
json to_json(const PresetEntry& preset);

/// Parses the PatternSpec schema and validates the result. Schema and
/// invariant violations both surface as ValidationError naming the field.
PatternSpec pattern_from_json(const json& j);

/// Same, for a raw request body. Syntax errors report field "body".
PatternSpec pattern_from_json_text(std::string_view text);

}  // namespace hdesigner
