#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace richstate {

using Generation = std::uint32_t;

/// Strongly typed entity id. All kinds draw from one world-wide counter, so a
/// raw value is unique across kinds as well.
template <class Tag>
struct Id {
    std::uint64_t value = 0;

    friend auto operator<=>(const Id&, const Id&) = default;
};

using UserId = Id<struct UserTag>;
using PostId = Id<struct PostTag>;
using CommentId = Id<struct CommentTag>;
using ThreadId = Id<struct ThreadTag>;
using GroupId = Id<struct GroupTag>;
using ListingId = Id<struct ListingTag>;
using StoryId = Id<struct StoryTag>;
using NotificationId = Id<struct NotificationTag>;

enum class EntityKind { user, post, comment, thread, group, listing, story, notification };

/// Kind-tagged reference used where an action may target any entity type.
struct EntityRef {
    EntityKind kind = EntityKind::user;
    std::uint64_t value = 0;

    friend auto operator<=>(const EntityRef&, const EntityRef&) = default;

    static EntityRef of(UserId id) { return {EntityKind::user, id.value}; }
    static EntityRef of(PostId id) { return {EntityKind::post, id.value}; }
    static EntityRef of(CommentId id) { return {EntityKind::comment, id.value}; }
    static EntityRef of(ThreadId id) { return {EntityKind::thread, id.value}; }
    static EntityRef of(GroupId id) { return {EntityKind::group, id.value}; }
    static EntityRef of(ListingId id) { return {EntityKind::listing, id.value}; }
    static EntityRef of(StoryId id) { return {EntityKind::story, id.value}; }
    static EntityRef of(NotificationId id) { return {EntityKind::notification, id.value}; }

    template <class IdType>
    IdType as() const { return IdType{value}; }
};

char kind_prefix(EntityKind kind);

/// "u12", "p3", ... Round-trips through parse_ref.
std::string to_string(EntityRef ref);
std::optional<EntityRef> parse_ref(std::string_view text);

inline std::string to_string(UserId id) { return to_string(EntityRef::of(id)); }
std::optional<UserId> parse_user_id(std::string_view text);

}  // namespace richstate

template <class Tag>
struct std::hash<richstate::Id<Tag>> {
    std::size_t operator()(const richstate::Id<Tag>& id) const noexcept {
        return std::hash<std::uint64_t>{}(id.value);
    }
};
