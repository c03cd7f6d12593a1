#pragma once

#include <json.hpp>

#include "cip/value.hpp"

namespace cip {

/// JSON numbers without a fraction or exponent become integers.
/// Objects are rejected with MalformedInput.
Value value_from_json(const nlohmann::json& j);

/// Floats that are integral keep a ".0" so the type survives a round trip.
nlohmann::json value_to_json(const Value& v);

}  // namespace cip
