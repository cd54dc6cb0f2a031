#pragma once

#include <optional>
#include <span>
#include <vector>

#include "richstate/platform/coverage.hpp"
#include "richstate/platform/faults.hpp"
#include "richstate/platform/instrumentation.hpp"
#include "richstate/platform/screens.hpp"
#include "richstate/platform/world.hpp"

namespace richstate {

struct ActionOutcome {
    Screen next_screen;
    EndpointId endpoint_hit;
    std::vector<ProbeId> probes_fired;
    std::optional<CrashEvent> crash;
};

/// Complete action set for `user` on `screen`. Content-targeting actions
/// appear once per eligible visible entity.
/// Throws Error(invalid_reference) for an unknown user, or for a detail
/// screen whose context is missing.
std::vector<ActionDescriptor> enumerate_actions(const WorldState& world, UserId user,
                                                const Screen& screen);

/// Applies the action to `world`. If a live fault attached to the endpoint
/// fires, the world is left untouched and the outcome carries the crash with
/// Login as the next screen.
/// Throws Error(stale_action) when the target no longer exists or is no
/// longer eligible.
ActionOutcome execute_action(WorldState& world, UserId user, const ActionDescriptor& action,
                             std::span<const FaultSpec> live_faults = {},
                             const Instrumentation& instrumentation =
                                 Instrumentation::canonical());

// Builders for actions issued outside exploration (population evolution,
// the universe service). They carry the same endpoint and probes the
// corresponding screen action would.
ActionDescriptor make_like(const WorldState& world, PostId post);
ActionDescriptor make_comment(PostId post, ContentBlob content);
ActionDescriptor make_create_post(ContentBlob content, std::optional<GroupId> group = {});
ActionDescriptor make_post_story(ContentBlob content);
ActionDescriptor make_start_thread(UserId recipient, ContentBlob content);
ActionDescriptor make_send_message(ThreadId thread, ContentBlob content);
ActionDescriptor make_create_group(ContentBlob content);
ActionDescriptor make_join_group(GroupId group);
ActionDescriptor make_create_listing(ContentBlob content);
ActionDescriptor make_add_friend(UserId other);
ActionDescriptor make_view_story(StoryId story);

}  // namespace richstate
