#pragma once

#include <span>
#include <string_view>

// Instrumentation points compiled into the simulated platform. The registry
// file shipped in data/instrumentation.json lists exactly these names.

namespace richstate::ep {

inline constexpr std::string_view login = "auth.login";

inline constexpr std::string_view onboarding_start = "onboarding.start";
inline constexpr std::string_view onboarding_find_friends = "onboarding.find_friends";
inline constexpr std::string_view onboarding_add_photo = "onboarding.add_profile_photo";
inline constexpr std::string_view onboarding_choose_interests = "onboarding.choose_interests";
inline constexpr std::string_view onboarding_finish = "onboarding.finish";

inline constexpr std::string_view feed_load = "feed.load";
inline constexpr std::string_view feed_like_post = "feed.like_post";
inline constexpr std::string_view feed_open_comments = "feed.open_comments";
inline constexpr std::string_view feed_share_post = "feed.share_post";
inline constexpr std::string_view comments_add = "comments.add_comment";
inline constexpr std::string_view comments_reply = "comments.reply";

inline constexpr std::string_view composer_open = "composer.open";
inline constexpr std::string_view composer_create_post = "composer.create_post";
inline constexpr std::string_view composer_create_story = "composer.create_story";

inline constexpr std::string_view inbox_load = "inbox.load";
inline constexpr std::string_view inbox_open_thread = "inbox.open_thread";
inline constexpr std::string_view inbox_new_message = "inbox.new_message";
inline constexpr std::string_view thread_send_message = "thread.send_message";
inline constexpr std::string_view thread_react = "thread.react_to_message";

inline constexpr std::string_view groups_load = "groups.load";
inline constexpr std::string_view groups_create = "groups.create_group";
inline constexpr std::string_view groups_open = "groups.open_group";
inline constexpr std::string_view groups_join = "groups.join_group";
inline constexpr std::string_view group_create_post = "group.create_post";
inline constexpr std::string_view group_like_post = "group.like_post";

inline constexpr std::string_view marketplace_load = "marketplace.load";
inline constexpr std::string_view marketplace_create_listing = "marketplace.create_listing";
inline constexpr std::string_view marketplace_open_listing = "marketplace.open_listing";
inline constexpr std::string_view listing_message_seller = "listing.message_seller";
inline constexpr std::string_view listing_save = "listing.save";
inline constexpr std::string_view listing_mark_sold = "listing.mark_sold";

inline constexpr std::string_view stories_load = "stories.load";
inline constexpr std::string_view stories_view = "stories.view_story";
inline constexpr std::string_view stories_reply = "stories.reply";

inline constexpr std::string_view notifications_load = "notifications.load";
inline constexpr std::string_view notifications_open = "notifications.open";
inline constexpr std::string_view notifications_mark_all_read = "notifications.mark_all_read";

inline constexpr std::string_view profile_load = "profile.load";
inline constexpr std::string_view profile_edit_bio = "profile.edit_bio";
inline constexpr std::string_view profile_open_friends = "profile.open_friends";
inline constexpr std::string_view people_add_friend = "people.add_friend";

inline constexpr std::string_view settings_l1_open = "settings.l1.open";
inline constexpr std::string_view settings_l2_open = "settings.l2.open";
inline constexpr std::string_view settings_l3_open = "settings.l3.open";

/// Toggle endpoints are "settings.l<level>.toggle_<name>".
inline constexpr std::string_view settings_l1_toggles[] = {"settings.l1.toggle_notifications",
                                                           "settings.l1.toggle_privacy"};
inline constexpr std::string_view settings_l2_toggles[] = {"settings.l2.toggle_data_saver",
                                                           "settings.l2.toggle_location"};
inline constexpr std::string_view settings_l3_toggles[] = {"settings.l3.toggle_two_factor",
                                                           "settings.l3.toggle_download_data"};

std::span<const std::string_view> all();
/// Endpoints only reachable by users whose state is empty.
bool is_onboarding(std::string_view endpoint);

}  // namespace richstate::ep

namespace richstate::pl {

/// Every endpoint has a base probe "pl.<endpoint>" fired on success.
inline constexpr std::string_view base_prefix = "pl.";

// Content-conditional probes: fire only when the rendered or targeted
// content has the stated property.
inline constexpr std::string_view auth_first_session = "pl.auth.first_session";
inline constexpr std::string_view auth_restore_session = "pl.auth.restore_session";

inline constexpr std::string_view feed_render_text = "pl.feed.render_post_text";
inline constexpr std::string_view feed_render_image = "pl.feed.render_post_image";
inline constexpr std::string_view feed_render_video = "pl.feed.render_post_video";
inline constexpr std::string_view feed_render_reactions = "pl.feed.render_reactions";
inline constexpr std::string_view feed_render_comment_preview = "pl.feed.render_comment_preview";
inline constexpr std::string_view feed_render_empty = "pl.feed.render_empty_state";
inline constexpr std::string_view feed_like_image_post = "pl.feed.like_image_post";

inline constexpr std::string_view comments_render_list = "pl.comments.render_list";
inline constexpr std::string_view comments_render_long_list = "pl.comments.render_long_list";
inline constexpr std::string_view comments_reply_in_thread = "pl.comments.reply_in_thread";

inline constexpr std::string_view composer_attach_image = "pl.composer.attach_image";

inline constexpr std::string_view inbox_render_thread_list = "pl.inbox.render_thread_list";
inline constexpr std::string_view inbox_render_unread = "pl.inbox.render_unread_badge";
inline constexpr std::string_view thread_render_history = "pl.thread.render_history";
inline constexpr std::string_view thread_render_long_history = "pl.thread.render_long_history";
inline constexpr std::string_view thread_render_media = "pl.thread.render_media";
inline constexpr std::string_view thread_send_in_conversation = "pl.thread.send_in_conversation";

inline constexpr std::string_view groups_render_memberships = "pl.groups.render_memberships";
inline constexpr std::string_view groups_render_discover = "pl.groups.render_discover";
inline constexpr std::string_view group_render_feed = "pl.group.render_feed";
inline constexpr std::string_view group_render_large = "pl.group.render_large_group";
inline constexpr std::string_view group_render_admin_tools = "pl.group.render_admin_tools";
inline constexpr std::string_view group_like_image_post = "pl.group.like_image_post";

inline constexpr std::string_view marketplace_render_grid = "pl.marketplace.render_grid";
inline constexpr std::string_view marketplace_render_own = "pl.marketplace.render_own_listings";
inline constexpr std::string_view listing_render_gallery = "pl.listing.render_gallery";
inline constexpr std::string_view listing_render_seller_card = "pl.listing.render_seller_card";
inline constexpr std::string_view listing_render_owner_tools = "pl.listing.render_owner_tools";
inline constexpr std::string_view listing_continue_conversation =
    "pl.listing.continue_conversation";

inline constexpr std::string_view stories_render_tray = "pl.stories.render_tray";
inline constexpr std::string_view stories_render_image = "pl.stories.render_image";
inline constexpr std::string_view stories_render_video = "pl.stories.render_video";
inline constexpr std::string_view stories_render_own = "pl.stories.render_own";

inline constexpr std::string_view notifications_render_like = "pl.notifications.render_like";
inline constexpr std::string_view notifications_render_comment = "pl.notifications.render_comment";
inline constexpr std::string_view notifications_render_message = "pl.notifications.render_message";
inline constexpr std::string_view notifications_render_friend = "pl.notifications.render_friend";
inline constexpr std::string_view notifications_render_unread = "pl.notifications.render_unread";

inline constexpr std::string_view profile_render_timeline = "pl.profile.render_timeline";
inline constexpr std::string_view profile_render_friend_grid = "pl.profile.render_friend_grid";
inline constexpr std::string_view profile_render_group_badges = "pl.profile.render_group_badges";
inline constexpr std::string_view profile_render_listings = "pl.profile.render_listings";
inline constexpr std::string_view profile_render_mutual_friends = "pl.profile.render_mutual_friends";

std::span<const std::string_view> conditional();

}  // namespace richstate::pl
