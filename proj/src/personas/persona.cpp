#include "richstate/personas/persona.hpp"

#include <cmath>

#include "richstate/platform/actions.hpp"

namespace richstate {

using nlohmann::json;

std::string_view to_string(Feature feature) {
    switch (feature) {
    case Feature::create_post: return "create_post";
    case Feature::comment: return "comment";
    case Feature::like: return "like";
    case Feature::send_message: return "send_message";
    case Feature::friend_request: return "friend_request";
    case Feature::create_group: return "create_group";
    case Feature::join_group: return "join_group";
    case Feature::create_listing: return "create_listing";
    case Feature::post_story: return "post_story";
    }
    return "create_post";
}

std::optional<Feature> parse_feature(std::string_view text) {
    for (Feature f : kAllFeatures) {
        if (to_string(f) == text) return f;
    }
    return std::nullopt;
}

double Persona::weight(Feature f) const {
    auto it = feature_weights.find(f);
    return it == feature_weights.end() ? 0.0 : it->second;
}

void validate_persona(const Persona& persona, ErrorKind kind) {
    if (persona.name.empty()) throw Error(kind, "persona name is empty");
    bool any = false;
    for (const auto& [feature, w] : persona.feature_weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw Error(kind, "persona " + persona.name + ": weight of " +
                                  std::string(to_string(feature)) + " must be a non-negative number");
        }
        any |= w > 0.0;
    }
    if (!any) throw Error(kind, "persona " + persona.name + ": at least one weight must be positive");
}

json to_json(const Persona& persona) {
    json weights = json::object();
    for (const auto& [feature, w] : persona.feature_weights) weights[std::string(to_string(feature))] = w;
    return json{{"name", persona.name}, {"feature_weights", weights}, {"interests", persona.interests}};
}

Persona persona_from_json(const json& doc, ErrorKind kind) {
    if (!doc.is_object()) throw Error(kind, "persona must be an object");
    Persona p;
    try {
        p.name = doc.at("name").get<std::string>();
        for (const auto& [key, value] : doc.at("feature_weights").items()) {
            auto feature = parse_feature(key);
            if (!feature) throw Error(kind, "unknown feature '" + key + "'");
            if (!value.is_number()) throw Error(kind, "weight of " + key + " is not a number");
            p.feature_weights[*feature] = value.get<double>();
        }
        if (doc.contains("interests")) p.interests = doc.at("interests").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw Error(kind, std::string("malformed persona: ") + e.what());
    }
    validate_persona(p, kind);
    return p;
}

std::string_view to_string(Workflow workflow) {
    return workflow == Workflow::evolving ? "evolving" : "single_generation";
}

void validate(const PopulationConfig& c) {
    auto fail = [&](const std::string& what) {
        throw Error(ErrorKind::configuration, "population " + c.name + ": " + what);
    };
    if (c.name.empty()) throw Error(ErrorKind::configuration, "population name is empty");
    if (c.size == 0) fail("size must be positive");
    if (c.persona_distribution.empty()) fail("persona distribution is empty");
    for (const auto& wp : c.persona_distribution) {
        if (!std::isfinite(wp.weight) || wp.weight <= 0.0) {
            fail("weight of persona " + wp.persona.name + " must be positive");
        }
        validate_persona(wp.persona, ErrorKind::configuration);
    }
    if (c.actions_per_generation == 0) fail("actions_per_generation must be positive");
    if (c.bots > c.size) fail("bots exceed size");
    if (c.maintenance.max_uses && *c.maintenance.max_uses == 0) fail("max_uses must be positive");
    if (c.maintenance.unclaimed_to_claimed_ratio &&
        !(*c.maintenance.unclaimed_to_claimed_ratio > 0.0)) {
        fail("unclaimed_to_claimed_ratio must be positive");
    }
    if (c.workflow == Workflow::evolving && !c.maintenance.unclaimed_to_claimed_ratio) {
        fail("evolving workflow requires unclaimed_to_claimed_ratio");
    }
    if (c.workflow == Workflow::single_generation && !c.maintenance.max_uses) {
        fail("single_generation workflow requires max_uses");
    }
}

namespace {

Persona persona(std::string name, std::map<Feature, double> weights,
                std::vector<std::string> interests) {
    return Persona{std::move(name), std::move(weights), std::move(interests)};
}

PersonaLibrary build_default_library() {
    using F = Feature;
    PersonaLibrary lib;
    auto add = [&](Persona p) { lib.emplace(p.name, std::move(p)); };
    add(persona("ordinary",
                {{F::create_post, 3}, {F::comment, 3}, {F::like, 5}, {F::send_message, 2},
                 {F::friend_request, 2}, {F::create_group, 0.3}, {F::join_group, 1},
                 {F::create_listing, 0.3}, {F::post_story, 1}},
                {"travel", "food", "music"}));
    add(persona("marketplace_seller",
                {{F::create_post, 1}, {F::comment, 1}, {F::like, 1}, {F::send_message, 2},
                 {F::friend_request, 1}, {F::create_listing, 6}},
                {"furniture", "bikes", "electronics"}));
    add(persona("messenger_heavy",
                {{F::create_post, 0.5}, {F::comment, 1}, {F::like, 1}, {F::send_message, 8},
                 {F::friend_request, 2}},
                {"family", "sports"}));
    add(persona("group_admin",
                {{F::create_post, 4}, {F::comment, 2}, {F::like, 2}, {F::friend_request, 1},
                 {F::create_group, 2}, {F::join_group, 2}},
                {"gardening", "cycling"}));
    add(persona("lurker",
                {{F::comment, 0.5}, {F::like, 4}, {F::friend_request, 0.5}, {F::post_story, 0.2}},
                {"news"}));
    return lib;
}

}  // namespace

const PersonaLibrary& default_persona_library() {
    static const PersonaLibrary lib = build_default_library();
    return lib;
}

PersonaLibrary persona_library_from_json(const json& doc) {
    if (!doc.is_array()) throw Error(ErrorKind::configuration, "persona library must be an array");
    PersonaLibrary lib;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        Persona p;
        try {
            p = persona_from_json(doc[i], ErrorKind::configuration);
        } catch (const Error& e) {
            throw Error(ErrorKind::configuration, "personas[" + std::to_string(i) + "]: " + e.what());
        }
        const std::string name = p.name;
        if (!lib.emplace(name, std::move(p)).second) {
            throw Error(ErrorKind::configuration, "personas[" + std::to_string(i) + "]: duplicate name " + name);
        }
    }
    return lib;
}

json to_json(const PersonaLibrary& library) {
    json out = json::array();
    for (const auto& [name, p] : library) out.push_back(to_json(p));
    return out;
}

PopulationConfig default_sapienz_config() {
    const auto& lib = default_persona_library();
    PopulationConfig c;
    c.name = "sapienz_default";
    c.size = 30;
    c.persona_distribution = {{lib.at("ordinary"), 0.6},
                              {lib.at("marketplace_seller"), 0.1},
                              {lib.at("messenger_heavy"), 0.1},
                              {lib.at("group_admin"), 0.1},
                              {lib.at("lurker"), 0.1}};
    c.workflow = Workflow::single_generation;
    c.maintenance.max_uses = 10;
    c.actions_per_generation = 30;
    return c;
}

json to_json(const PopulationConfig& c) {
    json dist = json::array();
    for (const auto& wp : c.persona_distribution) {
        dist.push_back({{"persona", to_json(wp.persona)}, {"weight", wp.weight}});
    }
    json maintenance = json::object();
    maintenance["max_uses"] = c.maintenance.max_uses ? json(*c.maintenance.max_uses) : json();
    maintenance["unclaimed_to_claimed_ratio"] =
        c.maintenance.unclaimed_to_claimed_ratio ? json(*c.maintenance.unclaimed_to_claimed_ratio)
                                                 : json();
    return json{{"name", c.name},
                {"size", c.size},
                {"personas", dist},
                {"workflow", to_string(c.workflow)},
                {"maintenance", maintenance},
                {"actions_per_generation", c.actions_per_generation},
                {"bots", c.bots}};
}

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::configuration, path + ": " + what);
}

template <class T>
T read_number(const json& doc, const char* key, const std::string& path, bool required, T fallback) {
    if (!doc.contains(key) || doc.at(key).is_null()) {
        if (required) config_error(path + "." + key, "is required");
        return fallback;
    }
    const auto& v = doc.at(key);
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            config_error(path + "." + key, "must be a non-negative integer");
        }
    } else {
        if (!v.is_number()) config_error(path + "." + key, "must be a number");
    }
    return v.get<T>();
}

}  // namespace

PopulationConfig population_config_from_json(const json& doc, const PersonaLibrary& library) {
    const std::string path = doc.is_object() && doc.contains("name") && doc["name"].is_string()
                                 ? "population " + doc["name"].get<std::string>()
                                 : std::string("population");
    if (!doc.is_object()) config_error(path, "must be an object");
    PopulationConfig c;
    if (!doc.contains("name") || !doc["name"].is_string()) config_error(path + ".name", "is required");
    c.name = doc["name"].get<std::string>();
    c.size = read_number<std::size_t>(doc, "size", path, true, 0);
    c.actions_per_generation =
        read_number<std::uint32_t>(doc, "actions_per_generation", path, false, 1);
    c.bots = read_number<std::size_t>(doc, "bots", path, false, 0);

    const std::string workflow = doc.value("workflow", std::string("single_generation"));
    if (workflow == "single_generation") {
        c.workflow = Workflow::single_generation;
    } else if (workflow == "evolving") {
        c.workflow = Workflow::evolving;
    } else {
        config_error(path + ".workflow", "must be single_generation or evolving");
    }

    if (doc.contains("maintenance")) {
        const auto& m = doc["maintenance"];
        if (!m.is_object()) config_error(path + ".maintenance", "must be an object");
        if (m.contains("max_uses") && !m["max_uses"].is_null()) {
            c.maintenance.max_uses =
                read_number<std::uint32_t>(m, "max_uses", path + ".maintenance", true, 0);
        }
        if (m.contains("unclaimed_to_claimed_ratio") && !m["unclaimed_to_claimed_ratio"].is_null()) {
            c.maintenance.unclaimed_to_claimed_ratio = read_number<double>(
                m, "unclaimed_to_claimed_ratio", path + ".maintenance", true, 0.0);
        }
    }

    if (!doc.contains("personas") || !doc["personas"].is_array()) {
        config_error(path + ".personas", "must be an array");
    }
    const auto& dist = doc["personas"];
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const std::string entry = path + ".personas[" + std::to_string(i) + "]";
        const auto& e = dist[i];
        if (!e.is_object() || !e.contains("persona")) config_error(entry, "needs a persona");
        WeightedPersona wp;
        const auto& p = e["persona"];
        if (p.is_string()) {
            auto it = library.find(p.get<std::string>());
            if (it == library.end()) config_error(entry + ".persona", "unknown persona " + p.get<std::string>());
            wp.persona = it->second;
        } else {
            try {
                wp.persona = persona_from_json(p, ErrorKind::configuration);
            } catch (const Error& err) {
                config_error(entry + ".persona", err.what());
            }
        }
        wp.weight = read_number<double>(e, "weight", entry, false, 1.0);
        c.persona_distribution.push_back(std::move(wp));
    }
    validate(c);
    return c;
}

std::vector<PopulationConfig> population_registry_from_json(const json& doc,
                                                            const PersonaLibrary& library) {
    if (!doc.is_array()) throw Error(ErrorKind::configuration, "population registry must be an array");
    std::vector<PopulationConfig> out;
    for (const auto& entry : doc) out.push_back(population_config_from_json(entry, library));
    return out;
}

const Persona& sample_persona(const PopulationConfig& config, Rng& rng) {
    if (config.persona_distribution.empty()) {
        throw Error(ErrorKind::configuration, "population " + config.name + " has no personas");
    }
    std::vector<double> weights;
    weights.reserve(config.persona_distribution.size());
    for (const auto& wp : config.persona_distribution) weights.push_back(wp.weight);
    const std::size_t i = rng.weighted_index(weights);
    if (i >= weights.size()) {
        throw Error(ErrorKind::configuration, "population " + config.name + " has no positive weight");
    }
    return config.persona_distribution[i].persona;
}

namespace {

template <std::size_t N>
std::string pick(const std::array<std::string_view, N>& templates, std::string_view topic, Rng& rng) {
    std::string_view t = templates[rng.below(N)];
    std::string out;
    const auto at = t.find("{}");
    out.append(t.substr(0, at));
    out.append(topic);
    out.append(t.substr(at + 2));
    return out;
}

}  // namespace

ContentBlob render_interest_content(std::string_view interest, Feature feature, Rng& rng) {
    static constexpr std::array<std::string_view, 4> posts = {
        "Thinking about {} today", "Anyone else into {}?", "My weekend was all {}",
        "New {} discovery"};
    static constexpr std::array<std::string_view, 3> comments = {
        "Love this {} take", "So true about {}", "More {} please"};
    static constexpr std::array<std::string_view, 3> messages = {
        "Did you see the {} news?", "Want to talk {} later?", "Got a {} question"};
    static constexpr std::array<std::string_view, 2> groups = {"{} fans", "{} club"};
    static constexpr std::array<std::string_view, 3> listings = {
        "Selling {} gear", "{} item, barely used", "Great {} deal"};
    static constexpr std::array<std::string_view, 2> stories = {"{} moment", "Live from {}"};

    ContentBlob blob;
    blob.topic_tag = std::string(interest);
    const double u = rng.uniform01();
    switch (feature) {
    case Feature::create_post:
        blob.text = pick(posts, interest, rng);
        if (u < 0.5) {
            blob.media = MediaKind::image;
        } else if (u < 0.6) {
            blob.media = MediaKind::video;
        }
        break;
    case Feature::post_story:
        blob.text = pick(stories, interest, rng);
        blob.media = u < 0.6 ? MediaKind::image : MediaKind::video;
        break;
    case Feature::create_listing:
        blob.text = pick(listings, interest, rng);
        if (u < 0.8) blob.media = MediaKind::image;
        break;
    case Feature::send_message:
        blob.text = pick(messages, interest, rng);
        if (u < 0.1) blob.media = MediaKind::image;
        break;
    case Feature::create_group:
        blob.text = pick(groups, interest, rng);
        break;
    default:
        blob.text = pick(comments, interest, rng);
        break;
    }
    return blob;
}

namespace {

std::string_view choose_interest(const Persona& persona, Rng& rng) {
    if (persona.interests.empty()) return "general";
    return persona.interests[rng.below(persona.interests.size())];
}

template <class T>
const T& choose(const std::vector<T>& items, Rng& rng) {
    return items[rng.below(items.size())];
}

std::vector<PostId> like_targets(const WorldState& world, UserId user) {
    std::vector<PostId> out;
    for (PostId id : visible_feed_posts(world, user, kFeedPageSize)) {
        const Post& p = world.posts.at(id);
        if (p.author != user && !p.likers.contains(user)) out.push_back(id);
    }
    for (GroupId g : member_groups(world, user, SIZE_MAX)) {
        for (PostId id : group_posts(world, g, kFeedPageSize)) {
            const Post& p = world.posts.at(id);
            if (p.author != user && !p.likers.contains(user)) out.push_back(id);
        }
    }
    return out;
}

std::vector<PostId> comment_targets(const WorldState& world, UserId user) {
    std::vector<PostId> out = visible_feed_posts(world, user, kFeedPageSize);
    for (GroupId g : member_groups(world, user, SIZE_MAX)) {
        for (PostId id : group_posts(world, g, kFeedPageSize)) out.push_back(id);
    }
    return out;
}

std::vector<ThreadId> awaiting_reply(const WorldState& world, UserId user) {
    std::vector<ThreadId> out;
    for (ThreadId id : user_threads(world, user, SIZE_MAX)) {
        const Thread& t = world.threads.at(id);
        if (!t.messages.empty() && t.messages.back().sender != user) out.push_back(id);
    }
    return out;
}

std::vector<UserId> non_friends(const WorldState& world, UserId user, std::span<const UserId> peers) {
    const auto& friends = world.user(user).friends;
    std::vector<UserId> out;
    auto consider = [&](UserId other) {
        if (other != user && !friends.contains(other) && world.has_user(other)) out.push_back(other);
    };
    if (peers.empty()) {
        for (const auto& [id, record] : world.users) consider(id);
    } else {
        for (UserId id : peers) consider(id);
    }
    return out;
}

/// Instantiates `feature` or returns nothing when it is infeasible right now.
std::optional<ActionDescriptor> instantiate(const WorldState& world, UserId user,
                                            const Persona& persona, Feature feature, Rng& rng,
                                            std::span<const UserId> peers) {
    switch (feature) {
    case Feature::create_post: {
        const auto groups = member_groups(world, user, SIZE_MAX);
        std::optional<GroupId> group;
        if (!groups.empty() && rng.bernoulli(0.25)) group = choose(groups, rng);
        return make_create_post(render_interest_content(choose_interest(persona, rng), feature, rng),
                                group);
    }
    case Feature::comment: {
        const auto targets = comment_targets(world, user);
        if (targets.empty()) return std::nullopt;
        const PostId post = choose(targets, rng);
        return make_comment(post, render_interest_content(choose_interest(persona, rng), feature, rng));
    }
    case Feature::like: {
        const auto targets = like_targets(world, user);
        if (targets.empty()) return std::nullopt;
        return make_like(world, choose(targets, rng));
    }
    case Feature::send_message: {
        const auto pending = awaiting_reply(world, user);
        const auto& friends = world.user(user).friends;
        if (pending.empty() && friends.empty()) return std::nullopt;
        ContentBlob content = render_interest_content(choose_interest(persona, rng), feature, rng);
        if (!pending.empty()) return make_send_message(choose(pending, rng), std::move(content));
        const std::vector<UserId> list(friends.begin(), friends.end());
        const UserId to = choose(list, rng);
        if (auto existing = thread_between(world, user, to)) {
            return make_send_message(*existing, std::move(content));
        }
        return make_start_thread(to, std::move(content));
    }
    case Feature::friend_request: {
        const auto candidates = non_friends(world, user, peers);
        if (candidates.empty()) return std::nullopt;
        return make_add_friend(choose(candidates, rng));
    }
    case Feature::create_group:
        return make_create_group(render_interest_content(choose_interest(persona, rng), feature, rng));
    case Feature::join_group: {
        const auto groups = discoverable_groups(world, user, SIZE_MAX);
        if (groups.empty()) return std::nullopt;
        return make_join_group(choose(groups, rng));
    }
    case Feature::create_listing:
        if (!marketplace_eligible(world, user)) return std::nullopt;
        return make_create_listing(
            render_interest_content(choose_interest(persona, rng), feature, rng));
    case Feature::post_story:
        return make_post_story(render_interest_content(choose_interest(persona, rng), feature, rng));
    }
    return std::nullopt;
}

}  // namespace

std::optional<ActionDescriptor> generate_content_action(const WorldState& world, UserId user,
                                                        const Persona& persona, Rng& rng,
                                                        std::span<const UserId> peers) {
    world.user(user);
    std::array<double, kAllFeatures.size()> weights{};
    for (std::size_t i = 0; i < kAllFeatures.size(); ++i) weights[i] = persona.weight(kAllFeatures[i]);
    for (;;) {
        const std::size_t i = rng.weighted_index(weights);
        if (i >= weights.size()) return std::nullopt;
        if (auto action = instantiate(world, user, persona, kAllFeatures[i], rng, peers)) return action;
        weights[i] = 0.0;
    }
}

std::optional<Feature> feature_of(const ActionDescriptor& action) {
    switch (action.kind) {
    case ActionKind::create_post: return Feature::create_post;
    case ActionKind::comment: return Feature::comment;
    case ActionKind::like: return Feature::like;
    case ActionKind::start_thread:
    case ActionKind::send_message: return Feature::send_message;
    case ActionKind::add_friend: return Feature::friend_request;
    case ActionKind::create_group: return Feature::create_group;
    case ActionKind::join_group: return Feature::join_group;
    case ActionKind::create_listing: return Feature::create_listing;
    case ActionKind::post_story: return Feature::post_story;
    default: return std::nullopt;
    }
}

}  // namespace richstate
