#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "richstate/core/ids.hpp"
#include "richstate/platform/content.hpp"
#include "richstate/platform/instrumentation.hpp"

namespace richstate {

/// Screen graph:
///   Login -> Feed (Onboarding reachable from Feed for empty-state users)
///   Feed <-> Composer, Inbox, Groups, Marketplace, Stories, Notifications,
///            Profile, SettingsL1
///   SettingsL1 -> SettingsL2 -> SettingsL3
/// plus detail screens (Comments, Thread, GroupPage, ListingPage) that carry
/// the entity they show as context.
enum class ScreenKind {
    login,
    onboarding,
    feed,
    comments,
    composer,
    inbox,
    thread,
    groups,
    group_page,
    marketplace,
    listing_page,
    stories,
    notifications,
    profile,
    settings_l1,
    settings_l2,
    settings_l3,
};

std::string_view to_string(ScreenKind kind);
std::optional<ScreenKind> parse_screen_kind(std::string_view text);

struct Screen {
    ScreenKind kind = ScreenKind::login;
    std::optional<EntityRef> context;

    friend bool operator==(const Screen&, const Screen&) = default;
};

std::string to_string(const Screen& screen);

enum class ActionKind {
    login,
    onboarding_step,
    navigate,
    open_settings_level,
    toggle_setting,
    like,
    open_comments,
    share_post,
    comment,
    reply_comment,
    create_post,
    post_story,
    open_thread,
    start_thread,
    send_message,
    react_message,
    create_group,
    open_group,
    join_group,
    create_listing,
    open_listing,
    message_seller,
    save_listing,
    mark_sold,
    view_story,
    reply_story,
    open_notification,
    mark_all_read,
    edit_bio,
    open_friends,
    add_friend,
};

std::string_view to_string(ActionKind kind);

struct ActionDescriptor {
    ActionKind kind = ActionKind::navigate;
    /// Short name shown to testers: "open_composer", "like", "toggle_privacy".
    std::string label;
    std::optional<EntityRef> target;
    /// Payload for content-creating actions.
    std::optional<ContentBlob> content;
    EndpointId endpoint;
    /// Probes fired unconditionally on success.
    std::vector<ProbeId> probes;
    Screen next_screen;

    friend bool operator==(const ActionDescriptor&, const ActionDescriptor&) = default;
};

/// "like(p12)", "open_composer", ...
std::string describe(const ActionDescriptor& action);

}  // namespace richstate
