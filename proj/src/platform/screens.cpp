#include "richstate/platform/screens.hpp"

#include <array>
#include <utility>

namespace richstate {

namespace {

constexpr std::array<std::pair<ScreenKind, std::string_view>, 17> kScreenNames{{
    {ScreenKind::login, "login"},
    {ScreenKind::onboarding, "onboarding"},
    {ScreenKind::feed, "feed"},
    {ScreenKind::comments, "comments"},
    {ScreenKind::composer, "composer"},
    {ScreenKind::inbox, "inbox"},
    {ScreenKind::thread, "thread"},
    {ScreenKind::groups, "groups"},
    {ScreenKind::group_page, "group_page"},
    {ScreenKind::marketplace, "marketplace"},
    {ScreenKind::listing_page, "listing_page"},
    {ScreenKind::stories, "stories"},
    {ScreenKind::notifications, "notifications"},
    {ScreenKind::profile, "profile"},
    {ScreenKind::settings_l1, "settings_l1"},
    {ScreenKind::settings_l2, "settings_l2"},
    {ScreenKind::settings_l3, "settings_l3"},
}};

}  // namespace

std::string_view to_string(ScreenKind kind) {
    for (const auto& [k, name] : kScreenNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<ScreenKind> parse_screen_kind(std::string_view text) {
    for (const auto& [k, name] : kScreenNames) {
        if (name == text) return k;
    }
    return std::nullopt;
}

std::string to_string(const Screen& screen) {
    std::string out(to_string(screen.kind));
    if (screen.context) out += "(" + to_string(*screen.context) + ")";
    return out;
}

std::string_view to_string(ActionKind kind) {
    switch (kind) {
    case ActionKind::login: return "login";
    case ActionKind::onboarding_step: return "onboarding_step";
    case ActionKind::navigate: return "navigate";
    case ActionKind::open_settings_level: return "open_settings_level";
    case ActionKind::toggle_setting: return "toggle_setting";
    case ActionKind::like: return "like";
    case ActionKind::open_comments: return "open_comments";
    case ActionKind::comment: return "comment";
    case ActionKind::share_post: return "share_post";
    case ActionKind::reply_comment: return "reply_comment";
    case ActionKind::react_message: return "react_message";
    case ActionKind::reply_story: return "reply_story";
    case ActionKind::create_post: return "create_post";
    case ActionKind::post_story: return "post_story";
    case ActionKind::open_thread: return "open_thread";
    case ActionKind::start_thread: return "start_thread";
    case ActionKind::send_message: return "send_message";
    case ActionKind::create_group: return "create_group";
    case ActionKind::open_group: return "open_group";
    case ActionKind::join_group: return "join_group";
    case ActionKind::create_listing: return "create_listing";
    case ActionKind::open_listing: return "open_listing";
    case ActionKind::message_seller: return "message_seller";
    case ActionKind::save_listing: return "save_listing";
    case ActionKind::mark_sold: return "mark_sold";
    case ActionKind::view_story: return "view_story";
    case ActionKind::open_notification: return "open_notification";
    case ActionKind::mark_all_read: return "mark_all_read";
    case ActionKind::edit_bio: return "edit_bio";
    case ActionKind::open_friends: return "open_friends";
    case ActionKind::add_friend: return "add_friend";
    }
    return "unknown";
}

std::string describe(const ActionDescriptor& action) {
    if (!action.target) return action.label;
    return action.label + "(" + to_string(*action.target) + ")";
}

}  // namespace richstate
