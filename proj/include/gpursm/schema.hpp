// SPDX-License-Identifier: Apache-2.0
//
// Minimal JSON Schema checker covering the keywords the report schema uses:
// type, properties, required, additionalProperties, items, minItems, enum,
// minimum, maximum, anyOf and local $ref.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace gpursm {

/// Returns one message per violation, each prefixed by a JSON pointer.
/// Empty means the instance is valid.
std::vector<std::string> validate_json(const nlohmann::json& instance,
                                       const nlohmann::json& schema);

}  // namespace gpursm
