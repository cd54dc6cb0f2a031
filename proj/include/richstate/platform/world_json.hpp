#pragma once

#include <nlohmann/json.hpp>

#include "richstate/platform/world.hpp"

namespace richstate {

nlohmann::json to_json(const ContentBlob& content);
ContentBlob content_from_json(const nlohmann::json& doc);

/// Full world dump including the generator state; world_from_json(to_json(w)) == w.
nlohmann::json to_json(const WorldState& world);
WorldState world_from_json(const nlohmann::json& doc);

}  // namespace richstate
