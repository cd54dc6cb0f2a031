#include "richstate/platform/world_json.hpp"

#include "richstate/core/error.hpp"

namespace richstate {

using nlohmann::json;

namespace {

template <class IdType>
json ids(const std::set<IdType>& set) {
    json out = json::array();
    for (auto id : set) out.push_back(id.value);
    return out;
}

template <class IdType>
std::set<IdType> id_set(const json& doc) {
    std::set<IdType> out;
    for (const auto& v : doc) out.insert(IdType{v.get<std::uint64_t>()});
    return out;
}

json ref_json(EntityRef ref) { return to_string(ref); }

EntityRef ref_from(const json& doc) {
    auto ref = parse_ref(doc.get<std::string>());
    if (!ref) throw Error(ErrorKind::validation, "bad entity reference " + doc.dump());
    return *ref;
}

std::string_view notification_kind_name(NotificationKind kind) {
    switch (kind) {
    case NotificationKind::like: return "like";
    case NotificationKind::comment: return "comment";
    case NotificationKind::message: return "message";
    case NotificationKind::friend_added: return "friend_added";
    }
    return "like";
}

NotificationKind parse_notification_kind(const std::string& text) {
    if (text == "like") return NotificationKind::like;
    if (text == "comment") return NotificationKind::comment;
    if (text == "message") return NotificationKind::message;
    if (text == "friend_added") return NotificationKind::friend_added;
    throw Error(ErrorKind::validation, "unknown notification kind " + text);
}

}  // namespace

json to_json(const ContentBlob& content) {
    json out{{"text", content.text}, {"topic", content.topic_tag}};
    if (content.media) out["media"] = content.has_image() ? "image" : "video";
    return out;
}

ContentBlob content_from_json(const json& doc) {
    ContentBlob c;
    c.text = doc.at("text").get<std::string>();
    c.topic_tag = doc.value("topic", std::string("general"));
    if (doc.contains("media")) {
        const auto media = doc.at("media").get<std::string>();
        if (media == "image") {
            c.media = MediaKind::image;
        } else if (media == "video") {
            c.media = MediaKind::video;
        } else {
            throw Error(ErrorKind::validation, "unknown media kind " + media);
        }
    }
    return c;
}

json to_json(const WorldState& w) {
    json users = json::array();
    for (const auto& [id, u] : w.users) {
        users.push_back({{"id", id.value},
                         {"name", u.name},
                         {"bio", u.bio},
                         {"created_at", u.created_at},
                         {"friends", ids(u.friends)},
                         {"settings", u.settings_enabled},
                         {"onboarding", u.onboarding_done}});
    }
    json posts = json::array();
    for (const auto& [id, p] : w.posts) {
        json comments = json::array();
        for (auto c : p.comments) comments.push_back(c.value);
        json j{{"id", id.value},
               {"author", p.author.value},
               {"content", to_json(p.content)},
               {"created_at", p.created_at},
               {"likers", ids(p.likers)},
               {"sharers", ids(p.sharers)},
               {"comments", comments}};
        if (p.group) j["group"] = p.group->value;
        posts.push_back(std::move(j));
    }
    json comments = json::array();
    for (const auto& [id, c] : w.comments) {
        comments.push_back({{"id", id.value},
                            {"post", c.post.value},
                            {"author", c.author.value},
                            {"text", c.text},
                            {"created_at", c.created_at}});
    }
    json threads = json::array();
    for (const auto& [id, t] : w.threads) {
        json messages = json::array();
        for (const auto& m : t.messages) {
            messages.push_back({{"sender", m.sender.value},
                                {"content", to_json(m.content)},
                                {"sent_at", m.sent_at},
                                {"reacted", m.reacted}});
        }
        threads.push_back({{"id", id.value},
                           {"first", t.first.value},
                           {"second", t.second.value},
                           {"messages", messages}});
    }
    json groups = json::array();
    for (const auto& [id, g] : w.groups) {
        groups.push_back({{"id", id.value},
                          {"owner", g.owner.value},
                          {"name", g.name},
                          {"topic", g.topic},
                          {"members", ids(g.members)}});
    }
    json listings = json::array();
    for (const auto& [id, l] : w.listings) {
        listings.push_back({{"id", id.value},
                            {"seller", l.seller.value},
                            {"content", to_json(l.content)},
                            {"price", l.price},
                            {"sold", l.sold},
                            {"created_at", l.created_at},
                            {"saved_by", ids(l.saved_by)}});
    }
    json stories = json::array();
    for (const auto& [id, s] : w.stories) {
        stories.push_back({{"id", id.value},
                           {"author", s.author.value},
                           {"content", to_json(s.content)},
                           {"created_at", s.created_at},
                           {"ttl", s.ttl},
                           {"viewers", ids(s.viewers)}});
    }
    json notifications = json::array();
    for (const auto& [id, n] : w.notifications) {
        notifications.push_back({{"id", id.value},
                                 {"recipient", n.recipient.value},
                                 {"actor", n.actor.value},
                                 {"kind", notification_kind_name(n.kind)},
                                 {"subject", ref_json(n.subject)},
                                 {"read", n.read}});
    }
    return json{{"generation", w.generation},
                {"next_id", w.next_id},
                {"rng", w.rng.state()},
                {"users", users},
                {"posts", posts},
                {"comments", comments},
                {"threads", threads},
                {"groups", groups},
                {"listings", listings},
                {"stories", stories},
                {"notifications", notifications}};
}

WorldState world_from_json(const json& doc) {
    try {
        WorldState w;
        w.generation = doc.at("generation").get<Generation>();
        w.next_id = doc.at("next_id").get<std::uint64_t>();
        w.rng.set_state(doc.at("rng").get<std::string>());
        for (const auto& j : doc.at("users")) {
            UserRecord u;
            u.id = UserId{j.at("id").get<std::uint64_t>()};
            u.name = j.at("name").get<std::string>();
            u.bio = j.value("bio", std::string());
            u.created_at = j.at("created_at").get<Generation>();
            u.friends = id_set<UserId>(j.at("friends"));
            u.settings_enabled = j.value("settings", std::set<std::string>{});
            u.onboarding_done = j.value("onboarding", std::set<std::string>{});
            w.users.emplace(u.id, std::move(u));
        }
        for (const auto& j : doc.at("posts")) {
            Post p;
            p.id = PostId{j.at("id").get<std::uint64_t>()};
            p.author = UserId{j.at("author").get<std::uint64_t>()};
            if (j.contains("group")) p.group = GroupId{j.at("group").get<std::uint64_t>()};
            p.content = content_from_json(j.at("content"));
            p.created_at = j.at("created_at").get<Generation>();
            p.likers = id_set<UserId>(j.at("likers"));
            p.sharers = id_set<UserId>(j.value("sharers", json::array()));
            for (const auto& c : j.at("comments")) p.comments.push_back(CommentId{c.get<std::uint64_t>()});
            w.posts.emplace(p.id, std::move(p));
        }
        for (const auto& j : doc.at("comments")) {
            Comment c;
            c.id = CommentId{j.at("id").get<std::uint64_t>()};
            c.post = PostId{j.at("post").get<std::uint64_t>()};
            c.author = UserId{j.at("author").get<std::uint64_t>()};
            c.text = j.at("text").get<std::string>();
            c.created_at = j.at("created_at").get<Generation>();
            w.comments.emplace(c.id, std::move(c));
        }
        for (const auto& j : doc.at("threads")) {
            Thread t;
            t.id = ThreadId{j.at("id").get<std::uint64_t>()};
            t.first = UserId{j.at("first").get<std::uint64_t>()};
            t.second = UserId{j.at("second").get<std::uint64_t>()};
            for (const auto& m : j.at("messages")) {
                t.messages.push_back({UserId{m.at("sender").get<std::uint64_t>()},
                                      content_from_json(m.at("content")),
                                      m.at("sent_at").get<Generation>(),
                                      m.value("reacted", false)});
            }
            w.threads.emplace(t.id, std::move(t));
        }
        for (const auto& j : doc.at("groups")) {
            Group g;
            g.id = GroupId{j.at("id").get<std::uint64_t>()};
            g.owner = UserId{j.at("owner").get<std::uint64_t>()};
            g.name = j.at("name").get<std::string>();
            g.topic = j.at("topic").get<std::string>();
            g.members = id_set<UserId>(j.at("members"));
            w.groups.emplace(g.id, std::move(g));
        }
        for (const auto& j : doc.at("listings")) {
            Listing l;
            l.id = ListingId{j.at("id").get<std::uint64_t>()};
            l.seller = UserId{j.at("seller").get<std::uint64_t>()};
            l.content = content_from_json(j.at("content"));
            l.price = j.at("price").get<int>();
            l.sold = j.at("sold").get<bool>();
            l.created_at = j.at("created_at").get<Generation>();
            l.saved_by = id_set<UserId>(j.at("saved_by"));
            w.listings.emplace(l.id, std::move(l));
        }
        for (const auto& j : doc.at("stories")) {
            Story s;
            s.id = StoryId{j.at("id").get<std::uint64_t>()};
            s.author = UserId{j.at("author").get<std::uint64_t>()};
            s.content = content_from_json(j.at("content"));
            s.created_at = j.at("created_at").get<Generation>();
            s.ttl = j.at("ttl").get<Generation>();
            s.viewers = id_set<UserId>(j.at("viewers"));
            w.stories.emplace(s.id, std::move(s));
        }
        for (const auto& j : doc.at("notifications")) {
            Notification n;
            n.id = NotificationId{j.at("id").get<std::uint64_t>()};
            n.recipient = UserId{j.at("recipient").get<std::uint64_t>()};
            n.actor = UserId{j.at("actor").get<std::uint64_t>()};
            n.kind = parse_notification_kind(j.at("kind").get<std::string>());
            n.subject = ref_from(j.at("subject"));
            n.read = j.at("read").get<bool>();
            w.notifications.emplace(n.id, std::move(n));
        }
        if (auto violation = check_invariants(w)) {
            throw Error(ErrorKind::validation, "world document is inconsistent: " + *violation);
        }
        return w;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::validation, std::string("malformed world document: ") + e.what());
    }
}

}  // namespace richstate
