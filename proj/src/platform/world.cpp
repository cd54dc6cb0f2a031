#include "richstate/platform/world.hpp"

#include "richstate/core/error.hpp"

namespace richstate {

const UserRecord& WorldState::user(UserId id) const {
    auto it = users.find(id);
    if (it == users.end()) {
        throw Error(ErrorKind::invalid_reference, "unknown user " + to_string(id));
    }
    return it->second;
}

UserRecord& WorldState::user(UserId id) {
    auto it = users.find(id);
    if (it == users.end()) {
        throw Error(ErrorKind::invalid_reference, "unknown user " + to_string(id));
    }
    return it->second;
}

UserId WorldState::add_user(std::string name) {
    const auto id = allocate<UserId>();
    UserRecord record;
    record.id = id;
    record.name = std::move(name);
    record.created_at = generation;
    users.emplace(id, std::move(record));
    return id;
}

bool WorldState::add_friendship(UserId a, UserId b) {
    if (a == b) {
        throw Error(ErrorKind::invalid_reference, "a user cannot befriend themselves");
    }
    auto& ua = user(a);
    auto& ub = user(b);
    const bool inserted = ua.friends.insert(b).second;
    ub.friends.insert(a);
    return inserted;
}

bool WorldState::are_friends(UserId a, UserId b) const {
    auto it = users.find(a);
    return it != users.end() && it->second.friends.contains(b);
}

void WorldState::advance_generation() { ++generation; }

WorldSnapshot snapshot(const WorldState& world) { return WorldSnapshot(world); }

WorldState restore(const WorldSnapshot& snap) { return snap.state(); }

UserFacts user_facts(const WorldState& world, UserId user) {
    UserFacts facts;
    facts.friend_count = world.user(user).friends.size();
    for (const auto& [id, post] : world.posts) {
        if (post.author == user) ++facts.post_count;
    }
    for (const auto& [id, comment] : world.comments) {
        if (comment.author == user) ++facts.comment_count;
    }
    for (const auto& [id, group] : world.groups) {
        if (group.members.contains(user)) ++facts.group_count;
        if (group.owner == user) ++facts.owned_group_count;
    }
    for (const auto& [id, listing] : world.listings) {
        if (listing.seller == user) ++facts.listing_count;
    }
    for (const auto& [id, story] : world.stories) {
        if (story.author == user) ++facts.story_count;
    }
    for (const auto& [id, thread] : world.threads) {
        if (!thread.involves(user)) continue;
        ++facts.thread_count;
        for (const auto& m : thread.messages) {
            if (m.sender == user) {
                ++facts.messages_sent;
            } else {
                ++facts.messages_received;
            }
        }
    }
    for (const auto& [id, n] : world.notifications) {
        if (n.recipient != user) continue;
        ++facts.notification_count;
        if (!n.read) ++facts.unread_notification_count;
    }
    return facts;
}

bool has_empty_state(const WorldState& world, UserId user) {
    if (!world.user(user).friends.empty()) return false;
    for (const auto& [id, post] : world.posts) {
        if (post.author == user) return false;
    }
    for (const auto& [id, comment] : world.comments) {
        if (comment.author == user) return false;
    }
    for (const auto& [id, group] : world.groups) {
        if (group.owner == user) return false;
    }
    for (const auto& [id, listing] : world.listings) {
        if (listing.seller == user) return false;
    }
    for (const auto& [id, story] : world.stories) {
        if (story.author == user) return false;
    }
    for (const auto& [id, thread] : world.threads) {
        if (thread.involves(user) && !thread.messages.empty()) return false;
    }
    return true;
}

bool marketplace_eligible(const WorldState& world, UserId user) {
    return !world.user(user).friends.empty();
}

std::vector<PostId> visible_feed_posts(const WorldState& world, UserId user, std::size_t limit) {
    const auto& friends = world.user(user).friends;
    std::vector<PostId> out;
    for (auto it = world.posts.rbegin(); it != world.posts.rend() && out.size() < limit; ++it) {
        const Post& post = it->second;
        if (post.group) continue;
        if (post.author == user || friends.contains(post.author)) out.push_back(post.id);
    }
    return out;
}

std::vector<StoryId> visible_stories(const WorldState& world, UserId user, std::size_t limit) {
    const auto& friends = world.user(user).friends;
    std::vector<StoryId> out;
    for (auto it = world.stories.rbegin(); it != world.stories.rend() && out.size() < limit;
         ++it) {
        const Story& story = it->second;
        if (!story.live_at(world.generation)) continue;
        if (story.author == user || friends.contains(story.author)) out.push_back(story.id);
    }
    return out;
}

std::vector<ThreadId> user_threads(const WorldState& world, UserId user, std::size_t limit) {
    std::vector<ThreadId> out;
    for (auto it = world.threads.rbegin(); it != world.threads.rend() && out.size() < limit;
         ++it) {
        if (it->second.involves(user)) out.push_back(it->first);
    }
    return out;
}

std::optional<ThreadId> thread_between(const WorldState& world, UserId a, UserId b) {
    for (const auto& [id, thread] : world.threads) {
        if (thread.involves(a) && thread.involves(b) && a != b) return id;
    }
    return std::nullopt;
}

std::vector<GroupId> member_groups(const WorldState& world, UserId user, std::size_t limit) {
    std::vector<GroupId> out;
    for (const auto& [id, group] : world.groups) {
        if (out.size() >= limit) break;
        if (group.members.contains(user)) out.push_back(id);
    }
    return out;
}

std::vector<GroupId> discoverable_groups(const WorldState& world, UserId user,
                                         std::size_t limit) {
    std::vector<GroupId> out;
    for (const auto& [id, group] : world.groups) {
        if (out.size() >= limit) break;
        if (!group.members.contains(user)) out.push_back(id);
    }
    return out;
}

std::vector<PostId> group_posts(const WorldState& world, GroupId group, std::size_t limit) {
    std::vector<PostId> out;
    for (auto it = world.posts.rbegin(); it != world.posts.rend() && out.size() < limit; ++it) {
        if (it->second.group == group) out.push_back(it->first);
    }
    return out;
}

std::vector<ListingId> active_listings(const WorldState& world, std::size_t limit) {
    std::vector<ListingId> out;
    for (auto it = world.listings.rbegin(); it != world.listings.rend() && out.size() < limit;
         ++it) {
        if (!it->second.sold) out.push_back(it->first);
    }
    return out;
}

std::vector<NotificationId> user_notifications(const WorldState& world, UserId user,
                                               std::size_t limit) {
    std::vector<NotificationId> out;
    for (auto it = world.notifications.rbegin();
         it != world.notifications.rend() && out.size() < limit; ++it) {
        if (it->second.recipient == user) out.push_back(it->first);
    }
    return out;
}

namespace {

bool entity_exists(const WorldState& world, EntityRef ref) {
    switch (ref.kind) {
    case EntityKind::user: return world.users.contains(ref.as<UserId>());
    case EntityKind::post: return world.posts.contains(ref.as<PostId>());
    case EntityKind::comment: return world.comments.contains(ref.as<CommentId>());
    case EntityKind::thread: return world.threads.contains(ref.as<ThreadId>());
    case EntityKind::group: return world.groups.contains(ref.as<GroupId>());
    case EntityKind::listing: return world.listings.contains(ref.as<ListingId>());
    case EntityKind::story: return world.stories.contains(ref.as<StoryId>());
    case EntityKind::notification: return world.notifications.contains(ref.as<NotificationId>());
    }
    return false;
}

}  // namespace

std::optional<std::string> check_invariants(const WorldState& world) {
    auto missing = [&](UserId id) { return !world.users.contains(id); };
    for (const auto& [id, user] : world.users) {
        if (user.id != id) return "user key mismatch " + to_string(id);
        for (UserId f : user.friends) {
            if (f == id) return "self friendship on " + to_string(id);
            if (missing(f)) return "friend of " + to_string(id) + " does not exist";
            if (!world.user(f).friends.contains(id)) {
                return "asymmetric friendship " + to_string(id) + "-" + to_string(f);
            }
        }
    }
    for (const auto& [id, post] : world.posts) {
        if (missing(post.author)) return "post author missing";
        if (post.group && !world.groups.contains(*post.group)) return "post group missing";
        for (UserId u : post.likers) {
            if (missing(u)) return "post liker missing";
        }
        for (CommentId c : post.comments) {
            if (!world.comments.contains(c)) return "post comment missing";
        }
    }
    for (const auto& [id, comment] : world.comments) {
        if (missing(comment.author) || !world.posts.contains(comment.post)) {
            return "comment reference missing";
        }
    }
    for (const auto& [id, thread] : world.threads) {
        if (missing(thread.first) || missing(thread.second) || thread.first == thread.second) {
            return "thread participants invalid";
        }
        for (const auto& m : thread.messages) {
            if (!thread.involves(m.sender)) return "message sender not in thread";
        }
    }
    for (const auto& [id, group] : world.groups) {
        if (missing(group.owner)) return "group owner missing";
        for (UserId u : group.members) {
            if (missing(u)) return "group member missing";
        }
    }
    for (const auto& [id, listing] : world.listings) {
        if (missing(listing.seller)) return "listing seller missing";
    }
    for (const auto& [id, story] : world.stories) {
        if (missing(story.author)) return "story author missing";
        if (story.created_at > world.generation) return "story from the future";
        if (story.ttl < 1) return "story ttl below 1";
    }
    for (const auto& [id, n] : world.notifications) {
        if (missing(n.recipient) || missing(n.actor)) return "notification user missing";
        if (!entity_exists(world, n.subject)) return "notification subject missing";
    }
    return std::nullopt;
}

}  // namespace richstate
