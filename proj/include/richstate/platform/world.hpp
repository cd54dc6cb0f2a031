#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "richstate/core/ids.hpp"
#include "richstate/core/rng.hpp"
#include "richstate/platform/content.hpp"

namespace richstate {

struct UserRecord {
    UserId id;
    std::string name;
    std::string bio;
    Generation created_at = 0;
    std::set<UserId> friends;
    std::set<std::string> settings_enabled;
    std::set<std::string> onboarding_done;

    friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

struct Post {
    PostId id;
    UserId author;
    std::optional<GroupId> group;
    ContentBlob content;
    Generation created_at = 0;
    std::set<UserId> likers;
    std::set<UserId> sharers;
    std::vector<CommentId> comments;

    friend bool operator==(const Post&, const Post&) = default;
};

struct Comment {
    CommentId id;
    PostId post;
    UserId author;
    std::string text;
    Generation created_at = 0;

    friend bool operator==(const Comment&, const Comment&) = default;
};

struct Message {
    UserId sender;
    ContentBlob content;
    Generation sent_at = 0;
    bool reacted = false;

    friend bool operator==(const Message&, const Message&) = default;
};

/// Direct conversation between two distinct users (participants sorted).
struct Thread {
    ThreadId id;
    UserId first;
    UserId second;
    std::vector<Message> messages;

    bool involves(UserId user) const { return first == user || second == user; }
    UserId other(UserId user) const { return first == user ? second : first; }

    friend bool operator==(const Thread&, const Thread&) = default;
};

struct Group {
    GroupId id;
    UserId owner;
    std::string name;
    std::string topic;
    std::set<UserId> members;

    friend bool operator==(const Group&, const Group&) = default;
};

struct Listing {
    ListingId id;
    UserId seller;
    ContentBlob content;
    int price = 0;
    bool sold = false;
    Generation created_at = 0;
    std::set<UserId> saved_by;

    friend bool operator==(const Listing&, const Listing&) = default;
};

struct Story {
    StoryId id;
    UserId author;
    ContentBlob content;
    Generation created_at = 0;
    Generation ttl = 1;
    std::set<UserId> viewers;

    /// A story is live while generation < created_at + ttl.
    bool live_at(Generation generation) const { return generation < created_at + ttl; }

    friend bool operator==(const Story&, const Story&) = default;
};

enum class NotificationKind { like, comment, message, friend_added };

struct Notification {
    NotificationId id;
    UserId recipient;
    UserId actor;
    NotificationKind kind = NotificationKind::like;
    EntityRef subject;
    bool read = false;

    friend bool operator==(const Notification&, const Notification&) = default;
};

/// Complete simulated-platform state. A plain value: copying it is a snapshot.
struct WorldState {
    std::map<UserId, UserRecord> users;
    std::map<PostId, Post> posts;
    std::map<CommentId, Comment> comments;
    std::map<ThreadId, Thread> threads;
    std::map<GroupId, Group> groups;
    std::map<ListingId, Listing> listings;
    std::map<StoryId, Story> stories;
    std::map<NotificationId, Notification> notifications;
    Generation generation = 0;
    std::uint64_t next_id = 1;
    Rng rng;

    friend bool operator==(const WorldState&, const WorldState&) = default;

    template <class IdType>
    IdType allocate() { return IdType{next_id++}; }

    bool has_user(UserId id) const { return users.contains(id); }
    const UserRecord& user(UserId id) const;
    UserRecord& user(UserId id);

    UserId add_user(std::string name);
    /// Symmetric, irreflexive. Returns false if the edge already existed.
    bool add_friendship(UserId a, UserId b);
    bool are_friends(UserId a, UserId b) const;

    /// Advance the clock; the clock never goes backwards.
    void advance_generation();
};

/// Immutable copy of a world. Cheap to share between concurrent explorations.
class WorldSnapshot {
public:
    WorldSnapshot() : state_(std::make_shared<const WorldState>()) {}
    explicit WorldSnapshot(WorldState state)
        : state_(std::make_shared<const WorldState>(std::move(state))) {}

    const WorldState& state() const { return *state_; }

private:
    std::shared_ptr<const WorldState> state_;
};

WorldSnapshot snapshot(const WorldState& world);
WorldState restore(const WorldSnapshot& snap);

/// Per-user derived facts used by enumeration, faults and personas.
struct UserFacts {
    std::size_t friend_count = 0;
    std::size_t post_count = 0;
    std::size_t comment_count = 0;
    std::size_t group_count = 0;
    std::size_t owned_group_count = 0;
    std::size_t listing_count = 0;
    std::size_t story_count = 0;
    std::size_t thread_count = 0;
    std::size_t messages_sent = 0;
    std::size_t messages_received = 0;
    std::size_t notification_count = 0;
    std::size_t unread_notification_count = 0;

    std::size_t authored() const {
        return post_count + comment_count + owned_group_count + listing_count + story_count +
               messages_sent;
    }
};

UserFacts user_facts(const WorldState& world, UserId user);

/// No friends, no authored content, no received messages.
bool has_empty_state(const WorldState& world, UserId user);

// Visibility rules shared by enumeration, personas and the universe feed.
inline constexpr std::size_t kFeedPageSize = 3;

/// Marketplace is open only to established accounts (at least one friend).
bool marketplace_eligible(const WorldState& world, UserId user);

/// Non-group posts by the user or their friends, newest first, at most `limit`.
std::vector<PostId> visible_feed_posts(const WorldState& world, UserId user,
                                       std::size_t limit = kFeedPageSize);
/// Live stories by the user or their friends, newest first.
std::vector<StoryId> visible_stories(const WorldState& world, UserId user, std::size_t limit);
/// Threads the user participates in, most recently created first.
std::vector<ThreadId> user_threads(const WorldState& world, UserId user, std::size_t limit);
std::optional<ThreadId> thread_between(const WorldState& world, UserId a, UserId b);
std::vector<GroupId> member_groups(const WorldState& world, UserId user, std::size_t limit);
std::vector<GroupId> discoverable_groups(const WorldState& world, UserId user, std::size_t limit);
std::vector<PostId> group_posts(const WorldState& world, GroupId group, std::size_t limit);
/// Unsold listings, newest first.
std::vector<ListingId> active_listings(const WorldState& world, std::size_t limit);
std::vector<NotificationId> user_notifications(const WorldState& world, UserId user,
                                               std::size_t limit);

/// Checks referential integrity, friendship symmetry and story clocks.
/// Returns a description of the first violation, or nothing.
std::optional<std::string> check_invariants(const WorldState& world);

}  // namespace richstate
