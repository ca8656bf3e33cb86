#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pentestxx {

/// Validates a document against the subset of JSON Schema (draft-07) used by
/// the shipped schemas: type, required, properties, additionalProperties,
/// items, enum, const, minItems, maxItems, minLength, pattern, minimum,
/// maximum. Returns one message per violation; empty means valid.
std::vector<std::string> validate_json(const nlohmann::json& doc, const nlohmann::json& schema);

}  // namespace pentestxx
