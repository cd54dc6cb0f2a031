#include "richstate/platform/actions.hpp"

#include <algorithm>

#include "richstate/core/error.hpp"
#include "richstate/platform/catalog.hpp"

namespace richstate {

namespace {

constexpr std::size_t kInboxPage = 4;
constexpr std::size_t kNewMessageSuggestions = 3;
constexpr std::size_t kMemberGroupsPage = 3;
constexpr std::size_t kDiscoverGroupsPage = 3;
constexpr std::size_t kGroupPostsPage = 3;
constexpr std::size_t kListingsPage = 4;
constexpr std::size_t kStoriesPage = 4;
constexpr std::size_t kNotificationsPage = 4;
constexpr std::size_t kCommentsPage = 3;

Screen at(ScreenKind kind) { return Screen{kind, std::nullopt}; }
Screen at(ScreenKind kind, EntityRef context) { return Screen{kind, context}; }

ActionDescriptor make(ActionKind kind, std::string label, std::string_view endpoint, Screen next,
                      std::optional<EntityRef> target = {},
                      std::optional<ContentBlob> content = {}) {
    ActionDescriptor a;
    a.kind = kind;
    a.label = std::move(label);
    a.target = target;
    a.content = std::move(content);
    a.endpoint = EndpointId(endpoint);
    a.probes = {base_probe(endpoint)};
    a.next_screen = next;
    return a;
}

ActionDescriptor nav(std::string label, ScreenKind dest, std::string_view endpoint) {
    return make(ActionKind::navigate, std::move(label), endpoint, at(dest));
}

std::string toggle_label(std::string_view endpoint) {
    return std::string(endpoint.substr(endpoint.rfind('.') + 1));
}

ContentBlob explorer_content(std::string text, std::optional<MediaKind> media = {}) {
    return ContentBlob{std::move(text), "general", media};
}

bool authored_anything(const WorldState& world, UserId user) {
    for (const auto& [id, post] : world.posts) {
        if (post.author == user) return true;
    }
    for (const auto& [id, listing] : world.listings) {
        if (listing.seller == user) return true;
    }
    for (const auto& [id, story] : world.stories) {
        if (story.author == user) return true;
    }
    for (const auto& [id, group] : world.groups) {
        if (group.owner == user) return true;
    }
    for (const auto& [id, comment] : world.comments) {
        if (comment.author == user) return true;
    }
    return false;
}

bool has_notifications(const WorldState& world, UserId user) {
    for (const auto& [id, n] : world.notifications) {
        if (n.recipient == user) return true;
    }
    return false;
}

bool has_unread_notifications(const WorldState& world, UserId user) {
    for (const auto& [id, n] : world.notifications) {
        if (n.recipient == user && !n.read) return true;
    }
    return false;
}

const Post& require_post(const WorldState& world, PostId id) {
    auto it = world.posts.find(id);
    if (it == world.posts.end()) {
        throw Error(ErrorKind::stale_action, "post " + to_string(EntityRef::of(id)) + " is gone");
    }
    return it->second;
}

template <class Map, class IdType>
auto& require(Map& map, IdType id, const char* what) {
    auto it = map.find(id);
    if (it == map.end()) {
        throw Error(ErrorKind::stale_action,
                    std::string(what) + " " + to_string(EntityRef::of(id)) + " is gone");
    }
    return it->second;
}

EntityRef require_context(const Screen& screen, EntityKind kind) {
    if (!screen.context || screen.context->kind != kind) {
        throw Error(ErrorKind::invalid_reference,
                    "screen " + to_string(screen) + " lacks its entity context");
    }
    return *screen.context;
}

// ---------------------------------------------------------------- enumeration

void feed_actions(const WorldState& world, UserId user, std::vector<ActionDescriptor>& out) {
    out.push_back(nav("open_composer", ScreenKind::composer, ep::composer_open));
    out.push_back(nav("open_settings", ScreenKind::settings_l1, ep::settings_l1_open));
    out.push_back(nav("open_marketplace", ScreenKind::marketplace, ep::marketplace_load));
    out.push_back(nav("open_groups", ScreenKind::groups, ep::groups_load));
    out.push_back(nav("open_inbox", ScreenKind::inbox, ep::inbox_load));
    if (has_empty_state(world, user)) {
        out.push_back(nav("open_onboarding", ScreenKind::onboarding, ep::onboarding_start));
    }
    if (!visible_stories(world, user, 1).empty()) {
        out.push_back(nav("open_stories", ScreenKind::stories, ep::stories_load));
    }
    if (has_notifications(world, user)) {
        out.push_back(nav("open_notifications", ScreenKind::notifications, ep::notifications_load));
    }
    if (authored_anything(world, user)) {
        out.push_back(nav("open_profile", ScreenKind::profile, ep::profile_load));
    }
    for (PostId id : visible_feed_posts(world, user)) {
        const Post& post = world.posts.at(id);
        const auto ref = EntityRef::of(id);
        if (!post.likers.contains(user)) {
            out.push_back(make(ActionKind::like, "like", ep::feed_like_post, at(ScreenKind::feed),
                               ref));
        }
        out.push_back(make(ActionKind::open_comments, "open_comments", ep::feed_open_comments,
                           at(ScreenKind::comments, ref), ref));
        if (post.author != user && !post.sharers.contains(user)) {
            out.push_back(make(ActionKind::share_post, "share", ep::feed_share_post,
                               at(ScreenKind::feed), ref));
        }
    }
}

void settings_actions(ScreenKind level, std::vector<ActionDescriptor>& out) {
    std::span<const std::string_view> toggles;
    switch (level) {
    case ScreenKind::settings_l1:
        out.push_back(nav("back", ScreenKind::feed, ep::feed_load));
        out.push_back(make(ActionKind::open_settings_level, "open_settings_l2",
                           ep::settings_l2_open, at(ScreenKind::settings_l2)));
        toggles = ep::settings_l1_toggles;
        break;
    case ScreenKind::settings_l2:
        out.push_back(make(ActionKind::open_settings_level, "back", ep::settings_l1_open,
                           at(ScreenKind::settings_l1)));
        out.push_back(make(ActionKind::open_settings_level, "open_settings_l3",
                           ep::settings_l3_open, at(ScreenKind::settings_l3)));
        toggles = ep::settings_l2_toggles;
        break;
    default:
        out.push_back(make(ActionKind::open_settings_level, "back", ep::settings_l2_open,
                           at(ScreenKind::settings_l2)));
        toggles = ep::settings_l3_toggles;
        break;
    }
    for (auto endpoint : toggles) {
        out.push_back(make(ActionKind::toggle_setting, toggle_label(endpoint), endpoint, at(level)));
    }
}

// ---------------------------------------------------------------- rendering

void fire(const Instrumentation& inst, std::string_view probe, std::vector<ProbeId>& out) {
    inst.emit(probe, out);
}

void render_screen(const WorldState& world, UserId user, const Screen& screen,
                   const Instrumentation& inst, std::vector<ProbeId>& out) {
    switch (screen.kind) {
    case ScreenKind::feed: {
        const auto posts = visible_feed_posts(world, user);
        if (posts.empty()) {
            fire(inst, pl::feed_render_empty, out);
            return;
        }
        fire(inst, pl::feed_render_text, out);
        bool image = false, video = false, reactions = false, comments = false;
        for (PostId id : posts) {
            const Post& p = world.posts.at(id);
            image |= p.content.has_image();
            video |= p.content.has_video();
            reactions |= !p.likers.empty();
            comments |= !p.comments.empty();
        }
        if (image) fire(inst, pl::feed_render_image, out);
        if (video) fire(inst, pl::feed_render_video, out);
        if (reactions) fire(inst, pl::feed_render_reactions, out);
        if (comments) fire(inst, pl::feed_render_comment_preview, out);
        return;
    }
    case ScreenKind::comments: {
        const Post& p = require_post(world, require_context(screen, EntityKind::post).as<PostId>());
        if (!p.comments.empty()) fire(inst, pl::comments_render_list, out);
        if (p.comments.size() >= 5) fire(inst, pl::comments_render_long_list, out);
        return;
    }
    case ScreenKind::inbox: {
        const auto threads = user_threads(world, user, SIZE_MAX);
        if (!threads.empty()) fire(inst, pl::inbox_render_thread_list, out);
        for (ThreadId id : threads) {
            const Thread& t = world.threads.at(id);
            if (!t.messages.empty() && t.messages.back().sender != user) {
                fire(inst, pl::inbox_render_unread, out);
                break;
            }
        }
        return;
    }
    case ScreenKind::thread: {
        const Thread& t = require(world.threads,
                                  require_context(screen, EntityKind::thread).as<ThreadId>(),
                                  "thread");
        if (!t.messages.empty()) fire(inst, pl::thread_render_history, out);
        if (t.messages.size() >= 10) fire(inst, pl::thread_render_long_history, out);
        const bool media = std::any_of(t.messages.begin(), t.messages.end(),
                                       [](const Message& m) { return m.content.media.has_value(); });
        if (media) fire(inst, pl::thread_render_media, out);
        return;
    }
    case ScreenKind::groups:
        if (!member_groups(world, user, 1).empty()) fire(inst, pl::groups_render_memberships, out);
        if (!discoverable_groups(world, user, 1).empty()) {
            fire(inst, pl::groups_render_discover, out);
        }
        return;
    case ScreenKind::group_page: {
        const auto gid = require_context(screen, EntityKind::group).as<GroupId>();
        const Group& g = require(world.groups, gid, "group");
        if (!group_posts(world, gid, 1).empty()) fire(inst, pl::group_render_feed, out);
        if (g.members.size() >= 5) fire(inst, pl::group_render_large, out);
        if (g.owner == user) fire(inst, pl::group_render_admin_tools, out);
        return;
    }
    case ScreenKind::marketplace: {
        if (!marketplace_eligible(world, user)) return;
        const auto listings = active_listings(world, SIZE_MAX);
        if (!listings.empty()) fire(inst, pl::marketplace_render_grid, out);
        for (ListingId id : listings) {
            if (world.listings.at(id).seller == user) {
                fire(inst, pl::marketplace_render_own, out);
                break;
            }
        }
        return;
    }
    case ScreenKind::listing_page: {
        const Listing& l = require(world.listings,
                                   require_context(screen, EntityKind::listing).as<ListingId>(),
                                   "listing");
        if (l.content.has_image()) fire(inst, pl::listing_render_gallery, out);
        fire(inst, l.seller == user ? pl::listing_render_owner_tools : pl::listing_render_seller_card,
             out);
        return;
    }
    case ScreenKind::stories:
        if (!visible_stories(world, user, 1).empty()) fire(inst, pl::stories_render_tray, out);
        return;
    case ScreenKind::notifications: {
        bool kinds[4] = {false, false, false, false};
        bool unread = false;
        for (const auto& [id, n] : world.notifications) {
            if (n.recipient != user) continue;
            kinds[static_cast<int>(n.kind)] = true;
            unread |= !n.read;
        }
        if (kinds[static_cast<int>(NotificationKind::like)]) {
            fire(inst, pl::notifications_render_like, out);
        }
        if (kinds[static_cast<int>(NotificationKind::comment)]) {
            fire(inst, pl::notifications_render_comment, out);
        }
        if (kinds[static_cast<int>(NotificationKind::message)]) {
            fire(inst, pl::notifications_render_message, out);
        }
        if (kinds[static_cast<int>(NotificationKind::friend_added)]) {
            fire(inst, pl::notifications_render_friend, out);
        }
        if (unread) fire(inst, pl::notifications_render_unread, out);
        return;
    }
    case ScreenKind::profile: {
        const UserFacts f = user_facts(world, user);
        if (f.post_count > 0) fire(inst, pl::profile_render_timeline, out);
        if (f.friend_count > 0) fire(inst, pl::profile_render_friend_grid, out);
        if (f.group_count > 0) fire(inst, pl::profile_render_group_badges, out);
        if (f.listing_count > 0) fire(inst, pl::profile_render_listings, out);
        return;
    }
    default:
        return;
    }
}

// ---------------------------------------------------------------- transitions

void notify(WorldState& world, UserId recipient, UserId actor, NotificationKind kind,
            EntityRef subject) {
    if (recipient == actor) return;
    Notification n;
    n.id = world.allocate<NotificationId>();
    n.recipient = recipient;
    n.actor = actor;
    n.kind = kind;
    n.subject = subject;
    world.notifications.emplace(n.id, n);
}

ThreadId append_message(WorldState& world, UserId from, UserId to, ContentBlob content) {
    if (from == to) throw Error(ErrorKind::stale_action, "cannot message yourself");
    world.user(to);
    ThreadId tid;
    if (auto existing = thread_between(world, from, to)) {
        tid = *existing;
    } else {
        tid = world.allocate<ThreadId>();
        Thread t;
        t.id = tid;
        t.first = std::min(from, to);
        t.second = std::max(from, to);
        world.threads.emplace(tid, t);
    }
    world.threads.at(tid).messages.push_back({from, std::move(content), world.generation});
    notify(world, to, from, NotificationKind::message, EntityRef::of(tid));
    return tid;
}

const ContentBlob& require_content(const ActionDescriptor& action) {
    if (!action.content) {
        throw Error(ErrorKind::invalid_reference, describe(action) + " carries no content");
    }
    return *action.content;
}

template <class IdType>
IdType target_of(const ActionDescriptor& action, EntityKind kind) {
    if (!action.target || action.target->kind != kind) {
        throw Error(ErrorKind::invalid_reference, describe(action) + " has no valid target");
    }
    return action.target->as<IdType>();
}

/// Rejects actions that can no longer be performed. Pure; runs before fault
/// evaluation so a stale action never crashes.
void check_fresh(const WorldState& world, UserId user, const ActionDescriptor& a) {
    switch (a.kind) {
    case ActionKind::like: {
        const Post& p = require_post(world, target_of<PostId>(a, EntityKind::post));
        if (p.likers.contains(user)) throw Error(ErrorKind::stale_action, "post already liked");
        if (p.group && !world.groups.at(*p.group).members.contains(user)) {
            throw Error(ErrorKind::stale_action, "group post not visible");
        }
        return;
    }
    case ActionKind::open_comments:
    case ActionKind::comment:
        require_post(world, target_of<PostId>(a, EntityKind::post));
        return;
    case ActionKind::share_post: {
        const Post& p = require_post(world, target_of<PostId>(a, EntityKind::post));
        if (p.author == user) throw Error(ErrorKind::stale_action, "cannot share your own post");
        if (p.sharers.contains(user)) throw Error(ErrorKind::stale_action, "post already shared");
        if (p.group) throw Error(ErrorKind::stale_action, "group posts cannot be shared");
        return;
    }
    case ActionKind::reply_comment: {
        const Comment& c =
            require(world.comments, target_of<CommentId>(a, EntityKind::comment), "comment");
        if (c.author == user) throw Error(ErrorKind::stale_action, "cannot reply to yourself");
        return;
    }
    case ActionKind::react_message: {
        const Thread& t = require(world.threads, target_of<ThreadId>(a, EntityKind::thread), "thread");
        if (!t.involves(user)) throw Error(ErrorKind::stale_action, "not a participant");
        if (t.messages.empty() || t.messages.back().sender == user || t.messages.back().reacted) {
            throw Error(ErrorKind::stale_action, "nothing to react to");
        }
        return;
    }
    case ActionKind::create_post:
        if (a.target) {
            const Group& g = require(world.groups, target_of<GroupId>(a, EntityKind::group), "group");
            if (!g.members.contains(user)) throw Error(ErrorKind::stale_action, "not a member");
        }
        return;
    case ActionKind::open_thread:
    case ActionKind::send_message: {
        const Thread& t = require(world.threads, target_of<ThreadId>(a, EntityKind::thread), "thread");
        if (!t.involves(user)) throw Error(ErrorKind::stale_action, "not a participant");
        return;
    }
    case ActionKind::start_thread:
    case ActionKind::add_friend: {
        const auto other = target_of<UserId>(a, EntityKind::user);
        if (!world.has_user(other)) throw Error(ErrorKind::stale_action, "user is gone");
        if (other == user) throw Error(ErrorKind::stale_action, "target is the acting user");
        if (a.kind == ActionKind::add_friend && world.are_friends(user, other)) {
            throw Error(ErrorKind::stale_action, "already friends");
        }
        return;
    }
    case ActionKind::open_group: {
        const Group& g = require(world.groups, target_of<GroupId>(a, EntityKind::group), "group");
        if (!g.members.contains(user)) throw Error(ErrorKind::stale_action, "not a member");
        return;
    }
    case ActionKind::join_group: {
        const Group& g = require(world.groups, target_of<GroupId>(a, EntityKind::group), "group");
        if (g.members.contains(user)) throw Error(ErrorKind::stale_action, "already a member");
        return;
    }
    case ActionKind::create_listing:
        if (!marketplace_eligible(world, user)) {
            throw Error(ErrorKind::stale_action, "marketplace is not available to this account");
        }
        return;
    case ActionKind::open_listing:
    case ActionKind::message_seller:
    case ActionKind::save_listing:
    case ActionKind::mark_sold: {
        if (!marketplace_eligible(world, user)) {
            throw Error(ErrorKind::stale_action, "marketplace is not available to this account");
        }
        const Listing& l =
            require(world.listings, target_of<ListingId>(a, EntityKind::listing), "listing");
        if (l.sold) throw Error(ErrorKind::stale_action, "listing sold");
        if (a.kind == ActionKind::message_seller && l.seller == user) {
            throw Error(ErrorKind::stale_action, "cannot message yourself");
        }
        if (a.kind == ActionKind::save_listing && l.saved_by.contains(user)) {
            throw Error(ErrorKind::stale_action, "already saved");
        }
        if (a.kind == ActionKind::mark_sold && l.seller != user) {
            throw Error(ErrorKind::stale_action, "not the seller");
        }
        return;
    }
    case ActionKind::view_story:
    case ActionKind::reply_story: {
        const Story& s = require(world.stories, target_of<StoryId>(a, EntityKind::story), "story");
        if (!s.live_at(world.generation)) throw Error(ErrorKind::stale_action, "story expired");
        if (a.kind == ActionKind::reply_story && s.author == user) {
            throw Error(ErrorKind::stale_action, "cannot reply to your own story");
        }
        if (s.author != user && !world.are_friends(user, s.author)) {
            throw Error(ErrorKind::stale_action, "story not visible");
        }
        return;
    }
    case ActionKind::open_notification: {
        const Notification& n = require(
            world.notifications, target_of<NotificationId>(a, EntityKind::notification),
            "notification");
        if (n.recipient != user) throw Error(ErrorKind::stale_action, "not your notification");
        return;
    }
    default:
        return;
    }
}

Screen notification_destination(const Notification& n) {
    switch (n.subject.kind) {
    case EntityKind::post: return at(ScreenKind::comments, n.subject);
    case EntityKind::thread: return at(ScreenKind::thread, n.subject);
    case EntityKind::user: return at(ScreenKind::profile);
    default: return at(ScreenKind::notifications);
    }
}

int listing_price(const ContentBlob& content) {
    return static_cast<int>(5 * (1 + stable_hash(content.text) % 40));
}

/// Applies the transition and returns the screen the user lands on.
Screen apply(WorldState& world, UserId user, const ActionDescriptor& a,
             const Instrumentation& inst, std::vector<ProbeId>& probes) {
    switch (a.kind) {
    case ActionKind::login:
        fire(inst, has_empty_state(world, user) ? pl::auth_first_session : pl::auth_restore_session,
             probes);
        return at(ScreenKind::feed);
    case ActionKind::onboarding_step:
        world.user(user).onboarding_done.insert(a.label);
        return at(ScreenKind::onboarding);
    case ActionKind::navigate:
    case ActionKind::open_settings_level:
        render_screen(world, user, a.next_screen, inst, probes);
        return a.next_screen;
    case ActionKind::toggle_setting: {
        auto& enabled = world.user(user).settings_enabled;
        if (!enabled.erase(a.label)) enabled.insert(a.label);
        return a.next_screen;
    }
    case ActionKind::like: {
        const auto pid = target_of<PostId>(a, EntityKind::post);
        Post& p = world.posts.at(pid);
        if (p.content.has_image()) {
            fire(inst, p.group ? pl::group_like_image_post : pl::feed_like_image_post, probes);
        }
        p.likers.insert(user);
        notify(world, p.author, user, NotificationKind::like, EntityRef::of(pid));
        return a.next_screen;
    }
    case ActionKind::open_comments: {
        const Screen dest = at(ScreenKind::comments, *a.target);
        render_screen(world, user, dest, inst, probes);
        return dest;
    }
    case ActionKind::comment: {
        const auto pid = target_of<PostId>(a, EntityKind::post);
        Post& p = world.posts.at(pid);
        if (!p.comments.empty()) fire(inst, pl::comments_reply_in_thread, probes);
        Comment c;
        c.id = world.allocate<CommentId>();
        c.post = pid;
        c.author = user;
        c.text = require_content(a).text;
        c.created_at = world.generation;
        p.comments.push_back(c.id);
        world.comments.emplace(c.id, c);
        notify(world, p.author, user, NotificationKind::comment, EntityRef::of(pid));
        return at(ScreenKind::comments, EntityRef::of(pid));
    }
    case ActionKind::share_post: {
        Post& original = world.posts.at(target_of<PostId>(a, EntityKind::post));
        original.sharers.insert(user);
        Post p;
        p.id = world.allocate<PostId>();
        p.author = user;
        p.content = original.content;
        p.created_at = world.generation;
        world.posts.emplace(p.id, p);
        return a.next_screen;
    }
    case ActionKind::reply_comment: {
        const Comment& parent = world.comments.at(target_of<CommentId>(a, EntityKind::comment));
        const PostId pid = parent.post;
        const UserId parent_author = parent.author;
        Comment c;
        c.id = world.allocate<CommentId>();
        c.post = pid;
        c.author = user;
        c.text = require_content(a).text;
        c.created_at = world.generation;
        world.posts.at(pid).comments.push_back(c.id);
        world.comments.emplace(c.id, c);
        notify(world, parent_author, user, NotificationKind::comment, EntityRef::of(pid));
        return at(ScreenKind::comments, EntityRef::of(pid));
    }
    case ActionKind::react_message:
        world.threads.at(target_of<ThreadId>(a, EntityKind::thread)).messages.back().reacted = true;
        return a.next_screen;
    case ActionKind::reply_story: {
        const Story& s = world.stories.at(target_of<StoryId>(a, EntityKind::story));
        const ThreadId tid = append_message(world, user, s.author, require_content(a));
        return at(ScreenKind::thread, EntityRef::of(tid));
    }
    case ActionKind::create_post: {
        const ContentBlob& content = require_content(a);
        if (content.has_image() && !a.target) fire(inst, pl::composer_attach_image, probes);
        Post p;
        p.id = world.allocate<PostId>();
        p.author = user;
        if (a.target) p.group = a.target->as<GroupId>();
        p.content = content;
        p.created_at = world.generation;
        world.posts.emplace(p.id, p);
        if (p.group) return at(ScreenKind::group_page, EntityRef::of(*p.group));
        return at(ScreenKind::feed);
    }
    case ActionKind::post_story: {
        Story s;
        s.id = world.allocate<StoryId>();
        s.author = user;
        s.content = require_content(a);
        s.created_at = world.generation;
        s.ttl = 1;
        world.stories.emplace(s.id, s);
        return at(ScreenKind::feed);
    }
    case ActionKind::open_thread: {
        const Screen dest = at(ScreenKind::thread, *a.target);
        render_screen(world, user, dest, inst, probes);
        return dest;
    }
    case ActionKind::start_thread: {
        const ThreadId tid =
            append_message(world, user, a.target->as<UserId>(), require_content(a));
        return at(ScreenKind::thread, EntityRef::of(tid));
    }
    case ActionKind::send_message: {
        const auto tid = target_of<ThreadId>(a, EntityKind::thread);
        const Thread& t = world.threads.at(tid);
        bool mine = false, theirs = false;
        for (const auto& m : t.messages) {
            (m.sender == user ? mine : theirs) = true;
        }
        if (mine && theirs) fire(inst, pl::thread_send_in_conversation, probes);
        append_message(world, user, t.other(user), require_content(a));
        return at(ScreenKind::thread, EntityRef::of(tid));
    }
    case ActionKind::create_group: {
        const ContentBlob& content = require_content(a);
        Group g;
        g.id = world.allocate<GroupId>();
        g.owner = user;
        g.name = content.text;
        g.topic = content.topic_tag;
        g.members.insert(user);
        world.groups.emplace(g.id, g);
        return at(ScreenKind::group_page, EntityRef::of(g.id));
    }
    case ActionKind::open_group:
    case ActionKind::join_group: {
        const auto gid = target_of<GroupId>(a, EntityKind::group);
        if (a.kind == ActionKind::join_group) world.groups.at(gid).members.insert(user);
        const Screen dest = at(ScreenKind::group_page, EntityRef::of(gid));
        if (a.kind == ActionKind::open_group) render_screen(world, user, dest, inst, probes);
        return dest;
    }
    case ActionKind::create_listing: {
        Listing l;
        l.id = world.allocate<ListingId>();
        l.seller = user;
        l.content = require_content(a);
        l.price = listing_price(l.content);
        l.created_at = world.generation;
        world.listings.emplace(l.id, l);
        return at(ScreenKind::marketplace);
    }
    case ActionKind::open_listing: {
        const Screen dest = at(ScreenKind::listing_page, *a.target);
        render_screen(world, user, dest, inst, probes);
        return dest;
    }
    case ActionKind::message_seller: {
        const Listing& l = world.listings.at(target_of<ListingId>(a, EntityKind::listing));
        if (thread_between(world, user, l.seller)) {
            fire(inst, pl::listing_continue_conversation, probes);
        }
        ContentBlob content = a.content.value_or(explorer_content("Is this still available?"));
        const ThreadId tid = append_message(world, user, l.seller, std::move(content));
        return at(ScreenKind::thread, EntityRef::of(tid));
    }
    case ActionKind::save_listing:
        world.listings.at(target_of<ListingId>(a, EntityKind::listing)).saved_by.insert(user);
        return a.next_screen;
    case ActionKind::mark_sold:
        world.listings.at(target_of<ListingId>(a, EntityKind::listing)).sold = true;
        return at(ScreenKind::marketplace);
    case ActionKind::view_story: {
        Story& s = world.stories.at(target_of<StoryId>(a, EntityKind::story));
        if (s.content.has_image()) fire(inst, pl::stories_render_image, probes);
        if (s.content.has_video()) fire(inst, pl::stories_render_video, probes);
        if (s.author == user) fire(inst, pl::stories_render_own, probes);
        s.viewers.insert(user);
        return a.next_screen;
    }
    case ActionKind::open_notification: {
        Notification& n =
            world.notifications.at(target_of<NotificationId>(a, EntityKind::notification));
        n.read = true;
        const Screen dest = notification_destination(n);
        // the subject may be a destination we can no longer render
        if (dest.kind == ScreenKind::comments && !world.posts.contains(dest.context->as<PostId>())) {
            return at(ScreenKind::notifications);
        }
        return dest;
    }
    case ActionKind::mark_all_read:
        for (auto& [id, n] : world.notifications) {
            if (n.recipient == user) n.read = true;
        }
        return a.next_screen;
    case ActionKind::edit_bio: {
        auto& record = world.user(user);
        record.bio = a.content ? a.content->text : "Updated bio";
        return a.next_screen;
    }
    case ActionKind::open_friends: {
        const auto& friends = world.user(user).friends;
        for (UserId f : friends) {
            const auto& theirs = world.user(f).friends;
            const bool mutual = std::any_of(theirs.begin(), theirs.end(),
                                            [&](UserId x) { return friends.contains(x); });
            if (mutual) {
                fire(inst, pl::profile_render_mutual_friends, probes);
                break;
            }
        }
        return a.next_screen;
    }
    case ActionKind::add_friend: {
        const auto other = a.target->as<UserId>();
        world.add_friendship(user, other);
        notify(world, other, user, NotificationKind::friend_added, EntityRef::of(user));
        return a.next_screen;
    }
    }
    return a.next_screen;
}

}  // namespace

std::vector<ActionDescriptor> enumerate_actions(const WorldState& world, UserId user,
                                                const Screen& screen) {
    world.user(user);
    std::vector<ActionDescriptor> out;
    switch (screen.kind) {
    case ScreenKind::login:
        out.push_back(make(ActionKind::login, "login", ep::login, at(ScreenKind::feed)));
        break;
    case ScreenKind::onboarding:
        out.push_back(make(ActionKind::onboarding_step, "find_friends", ep::onboarding_find_friends,
                           at(ScreenKind::onboarding)));
        out.push_back(make(ActionKind::onboarding_step, "add_profile_photo",
                           ep::onboarding_add_photo, at(ScreenKind::onboarding)));
        out.push_back(make(ActionKind::onboarding_step, "choose_interests",
                           ep::onboarding_choose_interests, at(ScreenKind::onboarding)));
        out.push_back(nav("finish_onboarding", ScreenKind::feed, ep::onboarding_finish));
        break;
    case ScreenKind::feed:
        feed_actions(world, user, out);
        break;
    case ScreenKind::comments: {
        const auto ref = require_context(screen, EntityKind::post);
        if (!world.posts.contains(ref.as<PostId>())) {
            throw Error(ErrorKind::invalid_reference, "unknown post " + to_string(ref));
        }
        out.push_back(nav("back", ScreenKind::feed, ep::feed_load));
        out.push_back(make(ActionKind::comment, "comment", ep::comments_add, screen, ref,
                           explorer_content("Nice!")));
        const auto& comments = world.posts.at(ref.as<PostId>()).comments;
        std::size_t offered = 0;
        for (auto it = comments.rbegin(); it != comments.rend() && offered < kCommentsPage; ++it) {
            if (world.comments.at(*it).author == user) continue;
            out.push_back(make(ActionKind::reply_comment, "reply", ep::comments_reply, screen,
                               EntityRef::of(*it), explorer_content("Agreed")));
            ++offered;
        }
        break;
    }
    case ScreenKind::composer:
        out.push_back(nav("back", ScreenKind::feed, ep::feed_load));
        out.push_back(make(ActionKind::create_post, "create_post", ep::composer_create_post,
                           at(ScreenKind::feed), std::nullopt, explorer_content("Hello world")));
        out.push_back(make(ActionKind::create_post, "create_photo_post", ep::composer_create_post,
                           at(ScreenKind::feed), std::nullopt,
                           explorer_content("Look at this", MediaKind::image)));
        out.push_back(make(ActionKind::post_story, "post_story", ep::composer_create_story,
                           at(ScreenKind::feed), std::nullopt,
                           explorer_content("Today", MediaKind::image)));
        break;
    case ScreenKind::inbox: {
        out.push_back(nav("back", ScreenKind::feed, ep::feed_load));
        for (ThreadId id : user_threads(world, user, kInboxPage)) {
            const auto ref = EntityRef::of(id);
            out.push_back(make(ActionKind::open_thread, "open_thread", ep::inbox_open_thread,
                               at(ScreenKind::thread, ref), ref));
        }
        std::size_t suggested = 0;
        for (UserId f : world.user(user).friends) {
            if (suggested >= kNewMessageSuggestions) break;
            if (thread_between(world, user, f)) continue;
            out.push_back(make(ActionKind::start_thread, "new_message", ep::inbox_new_message,
                               at(ScreenKind::thread), EntityRef::of(f),
                               explorer_content("Hey!")));
            ++suggested;
        }
        break;
    }
    case ScreenKind::thread: {
        const auto ref = require_context(screen, EntityKind::thread);
        auto it = world.threads.find(ref.as<ThreadId>());
        if (it == world.threads.end() || !it->second.involves(user)) {
            throw Error(ErrorKind::invalid_reference, "unknown thread " + to_string(ref));
        }
        out.push_back(nav("back", ScreenKind::inbox, ep::inbox_load));
        out.push_back(make(ActionKind::send_message, "send_message", ep::thread_send_message,
                           screen, ref, explorer_content("ok")));
        const auto& messages = it->second.messages;
        if (!messages.empty() && messages.back().sender != user && !messages.back().reacted) {
            out.push_back(make(ActionKind::react_message, "react", ep::thread_react, screen, ref));
        }
        break;
    }
    case ScreenKind::groups:
        out.push_back(nav("back", ScreenKind::feed, ep::feed_load));
        out.push_back(make(ActionKind::create_group, "create_group", ep::groups_create,
                           at(ScreenKind::group_page), std::nullopt,
                           explorer_content("Explorer group")));
        for (GroupId id : member_groups(world, user, kMemberGroupsPage)) {
            const auto ref = EntityRef::of(id);
            out.push_back(make(ActionKind::open_group, "open_group", ep::groups_open,
                               at(ScreenKind::group_page, ref), ref));
        }
        for (GroupId id : discoverable_groups(world, user, kDiscoverGroupsPage)) {
            const auto ref = EntityRef::of(id);
            out.push_back(make(ActionKind::join_group, "join_group", ep::groups_join,
                               at(ScreenKind::group_page, ref), ref));
        }
        break;
    case ScreenKind::group_page: {
        const auto ref = require_context(screen, EntityKind::group);
        auto it = world.groups.find(ref.as<GroupId>());
        if (it == world.groups.end()) {
            throw Error(ErrorKind::invalid_reference, "unknown group " + to_string(ref));
        }
        out.push_back(nav("back", ScreenKind::groups, ep::groups_load));
        if (!it->second.members.contains(user)) {
            out.push_back(make(ActionKind::join_group, "join_group", ep::groups_join, screen, ref));
            break;
        }
        out.push_back(make(ActionKind::create_post, "post_in_group", ep::group_create_post, screen,
                           ref, explorer_content("Group update")));
        for (PostId id : group_posts(world, ref.as<GroupId>(), kGroupPostsPage)) {
            if (world.posts.at(id).likers.contains(user)) continue;
            out.push_back(make(ActionKind::like, "like", ep::group_like_post, screen,
                               EntityRef::of(id)));
        }
        break;
    }
    case ScreenKind::marketplace:
        out.push_back(nav("back", ScreenKind::feed, ep::feed_load));
        if (!marketplace_eligible(world, user)) break;
        out.push_back(make(ActionKind::create_listing, "create_listing",
                           ep::marketplace_create_listing, at(ScreenKind::marketplace),
                           std::nullopt, explorer_content("Bike for sale", MediaKind::image)));
        for (ListingId id : active_listings(world, kListingsPage)) {
            const auto ref = EntityRef::of(id);
            out.push_back(make(ActionKind::open_listing, "open_listing",
                               ep::marketplace_open_listing, at(ScreenKind::listing_page, ref),
                               ref));
        }
        break;
    case ScreenKind::listing_page: {
        const auto ref = require_context(screen, EntityKind::listing);
        auto it = world.listings.find(ref.as<ListingId>());
        if (it == world.listings.end()) {
            throw Error(ErrorKind::invalid_reference, "unknown listing " + to_string(ref));
        }
        const Listing& l = it->second;
        out.push_back(nav("back", ScreenKind::marketplace, ep::marketplace_load));
        if (l.sold || !marketplace_eligible(world, user)) break;
        if (l.seller != user) {
            out.push_back(make(ActionKind::message_seller, "message_seller",
                               ep::listing_message_seller, at(ScreenKind::thread), ref,
                               explorer_content("Is this still available?")));
            if (!l.saved_by.contains(user)) {
                out.push_back(make(ActionKind::save_listing, "save_listing", ep::listing_save,
                                   screen, ref));
            }
        } else {
            out.push_back(make(ActionKind::mark_sold, "mark_sold", ep::listing_mark_sold,
                               at(ScreenKind::marketplace), ref));
        }
        break;
    }
    case ScreenKind::stories:
        out.push_back(nav("back", ScreenKind::feed, ep::feed_load));
        for (StoryId id : visible_stories(world, user, kStoriesPage)) {
            out.push_back(make(ActionKind::view_story, "view_story", ep::stories_view,
                               at(ScreenKind::stories), EntityRef::of(id)));
            if (world.stories.at(id).author != user) {
                out.push_back(make(ActionKind::reply_story, "reply_to_story", ep::stories_reply,
                                   at(ScreenKind::thread), EntityRef::of(id),
                                   explorer_content("Great story")));
            }
        }
        break;
    case ScreenKind::notifications:
        out.push_back(nav("back", ScreenKind::feed, ep::feed_load));
        if (has_unread_notifications(world, user)) {
            out.push_back(make(ActionKind::mark_all_read, "mark_all_read",
                               ep::notifications_mark_all_read, at(ScreenKind::notifications)));
        }
        for (NotificationId id : user_notifications(world, user, kNotificationsPage)) {
            const Notification& n = world.notifications.at(id);
            out.push_back(make(ActionKind::open_notification, "open_notification",
                               ep::notifications_open, notification_destination(n),
                               EntityRef::of(id)));
        }
        break;
    case ScreenKind::profile:
        out.push_back(nav("back", ScreenKind::feed, ep::feed_load));
        out.push_back(make(ActionKind::edit_bio, "edit_bio", ep::profile_edit_bio,
                           at(ScreenKind::profile), std::nullopt, explorer_content("About me")));
        if (!world.user(user).friends.empty()) {
            out.push_back(make(ActionKind::open_friends, "open_friends", ep::profile_open_friends,
                               at(ScreenKind::profile)));
        }
        break;
    case ScreenKind::settings_l1:
    case ScreenKind::settings_l2:
    case ScreenKind::settings_l3:
        settings_actions(screen.kind, out);
        break;
    }
    return out;
}

ActionOutcome execute_action(WorldState& world, UserId user, const ActionDescriptor& action,
                             std::span<const FaultSpec> live, const Instrumentation& inst) {
    world.user(user);
    check_fresh(world, user, action);

    ActionOutcome outcome;
    outcome.endpoint_hit = action.endpoint;
    for (const auto& fault : live) {
        if (fault_triggers(fault, world, user, action)) {
            outcome.crash = CrashEvent{fault.id, action.endpoint, 0};
            outcome.next_screen = at(ScreenKind::login);
            return outcome;
        }
    }
    for (const auto& p : action.probes) fire(inst, p, outcome.probes_fired);
    outcome.next_screen = apply(world, user, action, inst, outcome.probes_fired);
    return outcome;
}

ActionDescriptor make_like(const WorldState& world, PostId post) {
    const Post& p = require_post(world, post);
    const auto endpoint = p.group ? ep::group_like_post : ep::feed_like_post;
    const Screen next = p.group ? at(ScreenKind::group_page, EntityRef::of(*p.group))
                                : at(ScreenKind::feed);
    return make(ActionKind::like, "like", endpoint, next, EntityRef::of(post));
}

ActionDescriptor make_comment(PostId post, ContentBlob content) {
    const auto ref = EntityRef::of(post);
    return make(ActionKind::comment, "comment", ep::comments_add, at(ScreenKind::comments, ref),
                ref, std::move(content));
}

ActionDescriptor make_create_post(ContentBlob content, std::optional<GroupId> group) {
    if (group) {
        const auto ref = EntityRef::of(*group);
        return make(ActionKind::create_post, "post_in_group", ep::group_create_post,
                    at(ScreenKind::group_page, ref), ref, std::move(content));
    }
    return make(ActionKind::create_post, "create_post", ep::composer_create_post,
                at(ScreenKind::feed), std::nullopt, std::move(content));
}

ActionDescriptor make_post_story(ContentBlob content) {
    return make(ActionKind::post_story, "post_story", ep::composer_create_story,
                at(ScreenKind::feed), std::nullopt, std::move(content));
}

ActionDescriptor make_start_thread(UserId recipient, ContentBlob content) {
    return make(ActionKind::start_thread, "new_message", ep::inbox_new_message,
                at(ScreenKind::thread), EntityRef::of(recipient), std::move(content));
}

ActionDescriptor make_send_message(ThreadId thread, ContentBlob content) {
    const auto ref = EntityRef::of(thread);
    return make(ActionKind::send_message, "send_message", ep::thread_send_message,
                at(ScreenKind::thread, ref), ref, std::move(content));
}

ActionDescriptor make_create_group(ContentBlob content) {
    return make(ActionKind::create_group, "create_group", ep::groups_create,
                at(ScreenKind::group_page), std::nullopt, std::move(content));
}

ActionDescriptor make_join_group(GroupId group) {
    const auto ref = EntityRef::of(group);
    return make(ActionKind::join_group, "join_group", ep::groups_join,
                at(ScreenKind::group_page, ref), ref);
}

ActionDescriptor make_create_listing(ContentBlob content) {
    return make(ActionKind::create_listing, "create_listing", ep::marketplace_create_listing,
                at(ScreenKind::marketplace), std::nullopt, std::move(content));
}

ActionDescriptor make_add_friend(UserId other) {
    return make(ActionKind::add_friend, "add_friend", ep::people_add_friend,
                at(ScreenKind::profile), EntityRef::of(other));
}

ActionDescriptor make_view_story(StoryId story) {
    return make(ActionKind::view_story, "view_story", ep::stories_view, at(ScreenKind::stories),
                EntityRef::of(story));
}

}  // namespace richstate
