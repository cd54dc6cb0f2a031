#include "richstate/platform/faults.hpp"

#include <algorithm>
#include <array>

#include "richstate/core/error.hpp"

namespace richstate {

namespace {

constexpr std::array<std::string_view, 24> kPaths{
    "user.friend_count",       "user.post_count",
    "user.group_count",        "user.listing_count",
    "user.story_count",        "user.thread_count",
    "user.notification_count", "user.unread_notification_count",
    "user.messages_received",  "user.is_empty",
    "post.like_count",         "post.comment_count",
    "post.has_image",          "post.has_video",
    "thread.message_count",    "group.member_count",
    "group.post_count",        "listing.has_image",
    "listing.saved_count",     "listing.price",
    "story.has_image",         "story.has_video",
    "story.view_count",        "world.generation",
};

std::optional<PostId> action_post(const WorldState& world, const ActionDescriptor& action) {
    if (!action.target) return std::nullopt;
    if (action.target->kind == EntityKind::post) return action.target->as<PostId>();
    if (action.target->kind == EntityKind::comment) {
        auto it = world.comments.find(action.target->as<CommentId>());
        if (it != world.comments.end()) return it->second.post;
    }
    if (action.target->kind == EntityKind::notification) {
        auto it = world.notifications.find(action.target->as<NotificationId>());
        if (it != world.notifications.end() && it->second.subject.kind == EntityKind::post) {
            return it->second.subject.as<PostId>();
        }
    }
    return std::nullopt;
}

std::optional<ThreadId> action_thread(const WorldState& world, UserId user,
                                      const ActionDescriptor& action) {
    if (!action.target) return std::nullopt;
    const EntityRef target = *action.target;
    switch (target.kind) {
    case EntityKind::thread: return target.as<ThreadId>();
    case EntityKind::user:
        if (action.kind == ActionKind::start_thread) {
            return thread_between(world, user, target.as<UserId>());
        }
        return std::nullopt;
    case EntityKind::listing: {
        if (action.kind != ActionKind::message_seller) return std::nullopt;
        auto it = world.listings.find(target.as<ListingId>());
        if (it == world.listings.end()) return std::nullopt;
        return thread_between(world, user, it->second.seller);
    }
    case EntityKind::story: {
        if (action.kind != ActionKind::reply_story) return std::nullopt;
        auto it = world.stories.find(target.as<StoryId>());
        if (it == world.stories.end()) return std::nullopt;
        return thread_between(world, user, it->second.author);
    }
    case EntityKind::notification: {
        auto it = world.notifications.find(target.as<NotificationId>());
        if (it != world.notifications.end() && it->second.subject.kind == EntityKind::thread) {
            return it->second.subject.as<ThreadId>();
        }
        return std::nullopt;
    }
    default: return std::nullopt;
    }
}

template <class IdType>
std::optional<IdType> action_target(const ActionDescriptor& action, EntityKind kind) {
    if (!action.target || action.target->kind != kind) return std::nullopt;
    return action.target->as<IdType>();
}

double flag(bool b) { return b ? 1.0 : 0.0; }

bool compare(double lhs, CompareOp op, double rhs) {
    switch (op) {
    case CompareOp::eq: return lhs == rhs;
    case CompareOp::ge: return lhs >= rhs;
    case CompareOp::le: return lhs <= rhs;
    case CompareOp::gt: return lhs > rhs;
    case CompareOp::lt: return lhs < rhs;
    }
    return false;
}

}  // namespace

std::string_view to_string(CompareOp op) {
    switch (op) {
    case CompareOp::eq: return "eq";
    case CompareOp::ge: return "ge";
    case CompareOp::le: return "le";
    case CompareOp::gt: return "gt";
    case CompareOp::lt: return "lt";
    }
    return "eq";
}

std::optional<CompareOp> parse_compare_op(std::string_view text) {
    if (text == "eq") return CompareOp::eq;
    if (text == "ge") return CompareOp::ge;
    if (text == "le") return CompareOp::le;
    if (text == "gt") return CompareOp::gt;
    if (text == "lt") return CompareOp::lt;
    return std::nullopt;
}

std::span<const std::string_view> known_state_paths() { return kPaths; }

bool is_known_state_path(std::string_view path) {
    return std::find(kPaths.begin(), kPaths.end(), path) != kPaths.end();
}

std::optional<double> resolve_state_path(const WorldState& world, UserId user,
                                         const ActionDescriptor& action, std::string_view path) {
    if (path == "world.generation") return static_cast<double>(world.generation);

    if (path.starts_with("user.")) {
        if (path == "user.is_empty") return flag(has_empty_state(world, user));
        const UserFacts f = user_facts(world, user);
        if (path == "user.friend_count") return static_cast<double>(f.friend_count);
        if (path == "user.post_count") return static_cast<double>(f.post_count);
        if (path == "user.group_count") return static_cast<double>(f.group_count);
        if (path == "user.listing_count") return static_cast<double>(f.listing_count);
        if (path == "user.story_count") return static_cast<double>(f.story_count);
        if (path == "user.thread_count") return static_cast<double>(f.thread_count);
        if (path == "user.notification_count") return static_cast<double>(f.notification_count);
        if (path == "user.unread_notification_count") {
            return static_cast<double>(f.unread_notification_count);
        }
        if (path == "user.messages_received") return static_cast<double>(f.messages_received);
        return std::nullopt;
    }

    if (path.starts_with("post.")) {
        auto id = action_post(world, action);
        if (!id) return std::nullopt;
        auto it = world.posts.find(*id);
        if (it == world.posts.end()) return std::nullopt;
        const Post& post = it->second;
        if (path == "post.like_count") return static_cast<double>(post.likers.size());
        if (path == "post.comment_count") return static_cast<double>(post.comments.size());
        if (path == "post.has_image") return flag(post.content.has_image());
        if (path == "post.has_video") return flag(post.content.has_video());
        return std::nullopt;
    }

    if (path == "thread.message_count") {
        auto id = action_thread(world, user, action);
        if (!id) return std::nullopt;
        auto it = world.threads.find(*id);
        if (it == world.threads.end()) return std::nullopt;
        return static_cast<double>(it->second.messages.size());
    }

    if (path.starts_with("group.")) {
        std::optional<GroupId> id = action_target<GroupId>(action, EntityKind::group);
        if (!id) return std::nullopt;
        auto it = world.groups.find(*id);
        if (it == world.groups.end()) return std::nullopt;
        if (path == "group.member_count") return static_cast<double>(it->second.members.size());
        if (path == "group.post_count") {
            return static_cast<double>(group_posts(world, *id, SIZE_MAX).size());
        }
        return std::nullopt;
    }

    if (path.starts_with("listing.")) {
        auto id = action_target<ListingId>(action, EntityKind::listing);
        if (!id) return std::nullopt;
        auto it = world.listings.find(*id);
        if (it == world.listings.end()) return std::nullopt;
        if (path == "listing.has_image") return flag(it->second.content.has_image());
        if (path == "listing.saved_count") return static_cast<double>(it->second.saved_by.size());
        if (path == "listing.price") return static_cast<double>(it->second.price);
        return std::nullopt;
    }

    if (path.starts_with("story.")) {
        auto id = action_target<StoryId>(action, EntityKind::story);
        if (!id) return std::nullopt;
        auto it = world.stories.find(*id);
        if (it == world.stories.end()) return std::nullopt;
        if (path == "story.has_image") return flag(it->second.content.has_image());
        if (path == "story.has_video") return flag(it->second.content.has_video());
        if (path == "story.view_count") return static_cast<double>(it->second.viewers.size());
        return std::nullopt;
    }
    return std::nullopt;
}

bool fault_triggers(const FaultSpec& fault, const WorldState& world, UserId user,
                    const ActionDescriptor& action) {
    if (fault.endpoint != action.endpoint) return false;
    for (const auto& cond : fault.conditions) {
        auto value = resolve_state_path(world, user, action, cond.path);
        if (!value || !compare(*value, cond.op, cond.value)) return false;
    }
    return true;
}

std::vector<FaultSpec> live_faults(std::span<const FaultSpec> corpus, std::string_view build_id) {
    std::vector<FaultSpec> out;
    for (const auto& f : corpus) {
        if (f.build_tags.contains(std::string(build_id))) out.push_back(f);
    }
    return out;
}

std::vector<FaultSpec> parse_fault_corpus(const nlohmann::json& doc,
                                          const Instrumentation& registry) {
    if (!doc.is_array()) throw Error(ErrorKind::configuration, "fault corpus must be a JSON array");
    std::vector<FaultSpec> corpus;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& entry = doc[i];
        const std::string where = "faults[" + std::to_string(i) + "]";
        try {
            FaultSpec f;
            f.id = entry.at("id").get<std::string>();
            f.endpoint = entry.at("endpoint").get<std::string>();
            if (!registry.has_endpoint(f.endpoint)) {
                throw Error(ErrorKind::configuration, "unknown endpoint '" + f.endpoint + "'");
            }
            for (const auto& c : entry.value("conditions", nlohmann::json::array())) {
                FaultCondition cond;
                cond.path = c.at("path").get<std::string>();
                if (!is_known_state_path(cond.path)) {
                    throw Error(ErrorKind::configuration, "unknown state path '" + cond.path + "'");
                }
                const auto op_text = c.at("op").get<std::string>();
                auto op = parse_compare_op(op_text);
                if (!op) throw Error(ErrorKind::configuration, "unknown op '" + op_text + "'");
                cond.op = *op;
                cond.value = c.at("value").get<double>();
                f.conditions.push_back(cond);
            }
            for (const auto& tag : entry.value("build_tags", nlohmann::json::array())) {
                f.build_tags.insert(tag.get<std::string>());
            }
            if (!ids.insert(f.id).second) {
                throw Error(ErrorKind::configuration, "duplicate fault id '" + f.id + "'");
            }
            corpus.push_back(std::move(f));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::configuration, where + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorKind::configuration, where + ": " + e.what());
        }
    }
    return corpus;
}

nlohmann::json to_json(const FaultSpec& fault) {
    nlohmann::json conditions = nlohmann::json::array();
    for (const auto& c : fault.conditions) {
        conditions.push_back({{"path", c.path}, {"op", to_string(c.op)}, {"value", c.value}});
    }
    return {{"id", fault.id},
            {"endpoint", fault.endpoint},
            {"conditions", conditions},
            {"build_tags", fault.build_tags}};
}

}  // namespace richstate
