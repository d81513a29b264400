#pragma once

#include <nlohmann/json.hpp>

#include "campus/engine.hpp"

namespace campus::snapshot {

// Client-facing view of a session. Barrier signs appear only in their
// rendered form.
nlohmann::ordered_json make_snapshot(const engine::SessionState& state);

// Static campus geometry for rendering: graphs, real building footprints and
// entrances. Sign texts are not included.
nlohmann::ordered_json world_layout(const world::WorldDef& world);

// Where a locator appears on the campus plane; interior nodes map to their
// building's entrance.
world::Vec2 campus_projection(const world::WorldDef& world, world::Locator at);

}  // namespace campus::snapshot
