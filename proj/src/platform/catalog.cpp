#include "richstate/platform/catalog.hpp"

#include <array>

namespace richstate::ep {

namespace {

constexpr std::array kEndpoints{
    login,
    onboarding_start, onboarding_find_friends, onboarding_add_photo,
    onboarding_choose_interests, onboarding_finish,
    feed_load, feed_like_post, feed_open_comments, feed_share_post, comments_add, comments_reply,
    composer_open, composer_create_post, composer_create_story,
    inbox_load, inbox_open_thread, inbox_new_message, thread_send_message, thread_react,
    groups_load, groups_create, groups_open, groups_join, group_create_post, group_like_post,
    marketplace_load, marketplace_create_listing, marketplace_open_listing,
    listing_message_seller, listing_save, listing_mark_sold,
    stories_load, stories_view, stories_reply,
    notifications_load, notifications_open, notifications_mark_all_read,
    profile_load, profile_edit_bio, profile_open_friends, people_add_friend,
    settings_l1_open, settings_l2_open, settings_l3_open,
    settings_l1_toggles[0], settings_l1_toggles[1],
    settings_l2_toggles[0], settings_l2_toggles[1],
    settings_l3_toggles[0], settings_l3_toggles[1],
};

}  // namespace

std::span<const std::string_view> all() { return kEndpoints; }

bool is_onboarding(std::string_view endpoint) { return endpoint.starts_with("onboarding."); }

}  // namespace richstate::ep

namespace richstate::pl {

namespace {

constexpr std::array kConditional{
    auth_first_session, auth_restore_session,
    feed_render_text, feed_render_image, feed_render_video, feed_render_reactions,
    feed_render_comment_preview, feed_render_empty, feed_like_image_post,
    comments_render_list, comments_render_long_list, comments_reply_in_thread,
    composer_attach_image,
    inbox_render_thread_list, inbox_render_unread, thread_render_history,
    thread_render_long_history, thread_render_media, thread_send_in_conversation,
    groups_render_memberships, groups_render_discover, group_render_feed, group_render_large,
    group_render_admin_tools, group_like_image_post,
    marketplace_render_grid, marketplace_render_own, listing_render_gallery,
    listing_render_seller_card, listing_render_owner_tools, listing_continue_conversation,
    stories_render_tray, stories_render_image, stories_render_video, stories_render_own,
    notifications_render_like, notifications_render_comment, notifications_render_message,
    notifications_render_friend, notifications_render_unread,
    profile_render_timeline, profile_render_friend_grid, profile_render_group_badges,
    profile_render_listings, profile_render_mutual_friends,
};

}  // namespace

std::span<const std::string_view> conditional() { return kConditional; }

}  // namespace richstate::pl
