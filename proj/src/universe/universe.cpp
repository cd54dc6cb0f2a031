#include "richstate/universe/universe.hpp"

#include <condition_variable>
#include <fstream>
#include <thread>

#include "richstate/personas/persona.hpp"
#include "richstate/platform/actions.hpp"
#include "richstate/platform/world_json.hpp"

namespace richstate {

using nlohmann::json;

namespace {

constexpr const char* kStateFile = "universe_state.json";

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::configuration, path.string() + ": " + e.what());
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

UserId member_id(const Population& population, const std::string& text) {
    auto id = parse_user_id(text);
    if (!id) {
        // bare numbers are accepted too
        id = parse_user_id("u" + text);
    }
    if (!id || !population.is_member(*id)) {
        throw Error(ErrorKind::invalid_reference, "unknown test user " + text);
    }
    return *id;
}

json user_json(const TestUser& m) {
    json j = to_json(m);
    j["id"] = to_string(m.id);
    return j;
}

json post_json(const WorldState& world, const Post& p, UserId viewer) {
    json j = to_json(p.content);
    j["id"] = to_string(EntityRef::of(p.id));
    j["author"] = to_string(p.author);
    j["likes"] = p.likers.size();
    j["liked_by_me"] = p.likers.contains(viewer);
    j["comments"] = p.comments.size();
    j["created_at"] = p.created_at;
    if (p.group) j["group"] = to_string(EntityRef::of(*p.group));
    (void)world;
    return j;
}

std::vector<std::string> ref_list(const std::set<UserId>& users) {
    std::vector<std::string> out;
    for (UserId u : users) out.push_back(to_string(u));
    return out;
}

ContentBlob request_content(const json& request, const TestUser& actor) {
    if (!request.contains("content")) {
        throw Error(ErrorKind::validation, "this feature needs content {text, topic?, media?}");
    }
    try {
        ContentBlob c = content_from_json(request.at("content"));
        if (!request.at("content").contains("topic") && !actor.persona.interests.empty()) {
            c.topic_tag = actor.persona.interests.front();
        }
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::validation, std::string("content: ") + e.what());
    }
}

template <class IdType>
IdType request_target(const json& request, EntityKind kind, const WorldState& world) {
    if (!request.contains("target") || !request["target"].is_string()) {
        throw Error(ErrorKind::validation, "this feature needs a target");
    }
    const auto text = request["target"].get<std::string>();
    auto ref = parse_ref(text);
    if (!ref || ref->kind != kind) {
        throw Error(ErrorKind::validation, "target " + text + " has the wrong kind");
    }
    const IdType id = ref->as<IdType>();
    bool exists = false;
    if constexpr (std::is_same_v<IdType, PostId>) exists = world.posts.contains(id);
    if constexpr (std::is_same_v<IdType, GroupId>) exists = world.groups.contains(id);
    if constexpr (std::is_same_v<IdType, ThreadId>) exists = world.threads.contains(id);
    if constexpr (std::is_same_v<IdType, UserId>) exists = world.has_user(id);
    if (!exists) throw Error(ErrorKind::invalid_reference, "unknown target " + text);
    return id;
}

ActionDescriptor build_action(const Population& population, UserId actor, const json& request) {
    if (!request.is_object() || !request.contains("feature") || !request["feature"].is_string()) {
        throw Error(ErrorKind::validation, "request needs a feature");
    }
    const auto name = request["feature"].get<std::string>();
    const auto feature = parse_feature(name);
    if (!feature) throw Error(ErrorKind::validation, "unknown feature " + name);
    const WorldState& world = population.world();
    const TestUser& me = population.member(actor);
    switch (*feature) {
    case Feature::like:
        return make_like(world, request_target<PostId>(request, EntityKind::post, world));
    case Feature::comment:
        return make_comment(request_target<PostId>(request, EntityKind::post, world),
                            request_content(request, me));
    case Feature::create_post: {
        std::optional<GroupId> group;
        if (request.contains("target")) group = request_target<GroupId>(request, EntityKind::group, world);
        return make_create_post(request_content(request, me), group);
    }
    case Feature::post_story:
        return make_post_story(request_content(request, me));
    case Feature::send_message: {
        const auto text = request.value("target", std::string());
        if (text.starts_with("t")) {
            return make_send_message(request_target<ThreadId>(request, EntityKind::thread, world),
                                     request_content(request, me));
        }
        const UserId to = request_target<UserId>(request, EntityKind::user, world);
        if (!population.is_member(to)) throw Error(ErrorKind::invalid_reference, "unknown test user");
        if (auto existing = thread_between(world, actor, to)) {
            return make_send_message(*existing, request_content(request, me));
        }
        return make_start_thread(to, request_content(request, me));
    }
    case Feature::friend_request: {
        const UserId other = request_target<UserId>(request, EntityKind::user, world);
        if (!population.is_member(other)) throw Error(ErrorKind::invalid_reference, "unknown test user");
        return make_add_friend(other);
    }
    case Feature::create_group:
        return make_create_group(request_content(request, me));
    case Feature::join_group:
        return make_join_group(request_target<GroupId>(request, EntityKind::group, world));
    case Feature::create_listing:
        return make_create_listing(request_content(request, me));
    }
    throw Error(ErrorKind::validation, "unknown feature " + name);
}

}  // namespace

UniverseConfig universe_config_from_file(const std::filesystem::path& path) {
    const json doc = read_json_file(path);
    if (!doc.is_object()) throw Error(ErrorKind::configuration, "universe config must be an object");
    const auto base = path.parent_path();
    UniverseConfig c;
    try {
        PersonaLibrary library = default_persona_library();
        if (doc.contains("personas")) {
            library = persona_library_from_json(read_json_file(resolve(base, doc.at("personas"))));
        }
        const auto registry = population_registry_from_json(
            read_json_file(resolve(base, doc.at("registry").get<std::string>())), library);
        const auto name = doc.at("population").get<std::string>();
        auto it = std::find_if(registry.begin(), registry.end(),
                               [&](const PopulationConfig& p) { return p.name == name; });
        if (it == registry.end()) {
            throw Error(ErrorKind::configuration, "universe.population: unknown population " + name);
        }
        c.population = *it;
        if (doc.contains("org")) {
            c.org = org_map_from_json(read_json_file(resolve(base, doc.at("org").get<std::string>())));
        }
        c.seed = doc.value("seed", std::uint64_t{0});
        c.host = doc.value("host", c.host);
        c.port = doc.value("port", c.port);
        if (doc.contains("data_dir")) c.data_dir = resolve(base, doc.at("data_dir").get<std::string>());
    } catch (const json::exception& e) {
        throw Error(ErrorKind::configuration, "universe config: " + std::string(e.what()));
    }
    return c;
}

Universe::Universe(UniverseConfig config) : config_(std::move(config)) {
    if (config_.population.workflow != Workflow::evolving) {
        throw Error(ErrorKind::configuration, "the universe population must use the evolving workflow");
    }
    std::optional<std::filesystem::path> saved;
    if (config_.data_dir) {
        const auto file = *config_.data_dir / kStateFile;
        if (std::filesystem::exists(file)) saved = file;
    }
    if (saved) {
        const json doc = read_json_file(*saved);
        try {
            auto population = Population::from_json(doc.at("population"));
            std::map<std::string, UserId, std::less<>> sessions;
            for (const auto& [employee, user] : doc.at("sessions").items()) {
                sessions.emplace(employee, member_id(population, user.get<std::string>()));
            }
            committed_ = std::make_shared<const State>(State{std::move(population), std::move(sessions)});
        } catch (const json::exception& e) {
            throw Error(ErrorKind::validation, saved->string() + ": " + e.what());
        }
    } else {
        committed_ = std::make_shared<const State>(
            State{Population::create(config_.population, config_.seed), {}});
    }
}

std::shared_ptr<const Universe::State> Universe::current() const {
    std::lock_guard lock(publish_mutex_);
    return committed_;
}

template <class F>
json Universe::mutate(F&& change) {
    std::lock_guard writer(write_mutex_);
    auto next = std::make_shared<State>(*current());
    json result = change(*next);
    persist(*next);
    std::lock_guard lock(publish_mutex_);
    committed_ = std::move(next);
    return result;
}

Generation Universe::generation() const { return current()->population.generation(); }

json Universe::status() const {
    const auto state = current();
    json s = state->population.status();
    const PoolCounts counts = state->population.pool_counts();
    s["claimed"] = counts.claimed;
    s["unclaimed"] = counts.unclaimed;
    s["bots"] = counts.bots;
    s["total"] = counts.total();
    json claims = json::object();
    for (const auto& m : state->population.members()) {
        if (m.pool == Pool::claimed && m.owner) claims[*m.owner] = to_string(m.id);
    }
    s["claimed_by"] = claims;
    return s;
}

json Universe::users(std::optional<Pool> pool) const {
    const auto state = current();
    json out = json::array();
    for (UserId id : state->population.active_ids(pool)) {
        out.push_back(user_json(state->population.member(id)));
    }
    return out;
}

namespace {

json session_json(const std::string& employee, std::optional<UserId> primary) {
    return json{{"session_id", "session-" + employee},
                {"employee_id", employee},
                {"active_identity", primary ? to_string(*primary) : std::string("personal")}};
}

UserId acting_user(const std::map<std::string, UserId, std::less<>>& sessions,
                   const std::string& employee) {
    auto it = sessions.find(employee);
    if (it == sessions.end()) {
        throw Error(ErrorKind::identity, employee + " is acting as their personal account");
    }
    return it->second;
}

}  // namespace

json Universe::session(const std::string& employee) const {
    const auto state = current();
    auto it = state->sessions.find(employee);
    return session_json(employee, it == state->sessions.end() ? std::nullopt
                                                              : std::optional<UserId>(it->second));
}

json Universe::feed(const std::string& employee, std::size_t limit) const {
    const auto state = current();
    const UserId me = acting_user(state->sessions, employee);
    const WorldState& world = state->population.world();
    json posts = json::array();
    for (PostId id : visible_feed_posts(world, me, limit)) {
        posts.push_back(post_json(world, world.posts.at(id), me));
    }
    json stories = json::array();
    for (StoryId id : visible_stories(world, me, limit)) {
        const Story& s = world.stories.at(id);
        json j = to_json(s.content);
        j["id"] = to_string(EntityRef::of(id));
        j["author"] = to_string(s.author);
        stories.push_back(j);
    }
    std::size_t unread = 0;
    for (const auto& [id, n] : world.notifications) {
        if (n.recipient == me && !n.read) ++unread;
    }
    return json{{"user", to_string(me)},
                {"generation", world.generation},
                {"friends", ref_list(world.user(me).friends)},
                {"posts", posts},
                {"stories", stories},
                {"unread_notifications", unread}};
}

json Universe::threads(const std::string& employee) const {
    const auto state = current();
    const UserId me = acting_user(state->sessions, employee);
    const WorldState& world = state->population.world();
    json out = json::array();
    for (ThreadId id : user_threads(world, me, world.threads.size())) {
        const Thread& t = world.threads.at(id);
        json messages = json::array();
        for (const auto& m : t.messages) {
            json j = to_json(m.content);
            j["sender"] = to_string(m.sender);
            j["sent_at"] = m.sent_at;
            messages.push_back(j);
        }
        out.push_back({{"id", to_string(EntityRef::of(id))},
                       {"with", to_string(t.other(me))},
                       {"messages", messages}});
    }
    return json{{"user", to_string(me)}, {"threads", out}};
}

json Universe::alternatives(const std::string& employee) const {
    const auto state = current();
    const UserId me = acting_user(state->sessions, employee);
    const WorldState& world = state->population.world();
    json out = json::array();
    auto add = [&](std::string_view feature, std::optional<EntityRef> target = {}) {
        json j{{"feature", feature}};
        if (target) j["target"] = to_string(*target);
        out.push_back(j);
    };
    add("create_post");
    add("post_story");
    add("create_group");
    if (marketplace_eligible(world, me)) add("create_listing");
    for (PostId id : visible_feed_posts(world, me, 20)) {
        const Post& p = world.posts.at(id);
        if (p.author != me && !p.likers.contains(me)) add("like", EntityRef::of(id));
        add("comment", EntityRef::of(id));
    }
    for (UserId f : world.user(me).friends) add("send_message", EntityRef::of(f));
    for (UserId other : state->population.active_ids()) {
        if (other != me && !world.are_friends(me, other)) add("friend_request", EntityRef::of(other));
    }
    for (GroupId g : discoverable_groups(world, me, 20)) add("join_group", EntityRef::of(g));
    return out;
}

json Universe::claim(const std::string& user, const std::string& employee) {
    return mutate([&](State& s) {
        const UserId id = member_id(s.population, user);
        return user_json(s.population.claim(id, employee, config_.org));
    });
}

json Universe::release(const std::string& user, const std::string& employee) {
    return mutate([&](State& s) {
        const UserId id = member_id(s.population, user);
        s.population.release(id, employee);
        // the session may only point at a user the employee still owns
        if (auto it = s.sessions.find(employee); it != s.sessions.end() && it->second == id) {
            s.sessions.erase(it);
        }
        return user_json(s.population.member(id));
    });
}

json Universe::update_persona(const std::string& user, const std::string& employee,
                              const json& patch) {
    return mutate([&](State& s) {
        const UserId id = member_id(s.population, user);
        if (!patch.is_object()) throw Error(ErrorKind::validation, "persona patch must be an object");
        Persona persona = s.population.member(id).persona;
        try {
            if (patch.contains("name")) persona.name = patch.at("name").get<std::string>();
            if (patch.contains("feature_weights")) {
                persona.feature_weights.clear();
                for (const auto& [key, value] : patch.at("feature_weights").items()) {
                    auto f = parse_feature(key);
                    if (!f) throw Error(ErrorKind::validation, "unknown feature " + key);
                    persona.feature_weights[*f] = value.get<double>();
                }
            }
            if (patch.contains("interests")) {
                persona.interests = patch.at("interests").get<std::vector<std::string>>();
            }
        } catch (const json::exception& e) {
            throw Error(ErrorKind::validation, std::string("persona patch: ") + e.what());
        }
        s.population.update_persona(id, employee, std::move(persona));
        return user_json(s.population.member(id));
    });
}

json Universe::update_interests(const std::string& user, const std::string& employee,
                                const json& body) {
    return mutate([&](State& s) {
        const UserId id = member_id(s.population, user);
        const json& list = body.is_object() && body.contains("interests") ? body.at("interests") : body;
        if (!list.is_array()) throw Error(ErrorKind::validation, "interests must be an array of strings");
        std::vector<std::string> interests;
        for (const auto& t : list) {
            if (!t.is_string()) throw Error(ErrorKind::validation, "interests must be strings");
            interests.push_back(t.get<std::string>());
        }
        s.population.update_interests(id, employee, std::move(interests));
        return user_json(s.population.member(id));
    });
}

json Universe::set_frozen(const std::string& user, const std::string& employee, bool frozen) {
    return mutate([&](State& s) {
        const UserId id = member_id(s.population, user);
        s.population.set_frozen(id, employee, frozen);
        return user_json(s.population.member(id));
    });
}

json Universe::control(const std::string& bot, const std::string& employee) {
    return mutate([&](State& s) {
        const UserId id = member_id(s.population, bot);
        s.population.set_secondary_controller(id, employee);
        return user_json(s.population.member(id));
    });
}

json Universe::switch_profile(const std::string& employee, const std::string& target) {
    return mutate([&](State& s) {
        if (target == "personal") {
            s.sessions.erase(employee);
            return session_json(employee, std::nullopt);
        }
        if (target != "primary") {
            throw Error(ErrorKind::validation, "target must be personal or primary");
        }
        const auto primary = s.population.primary_of(employee);
        if (!primary) throw Error(ErrorKind::no_primary, employee + " has not claimed a primary test user");
        s.sessions.insert_or_assign(employee, *primary);
        return session_json(employee, primary);
    });
}

json Universe::act(const std::string& employee, const json& request) {
    return mutate([&](State& s) {
        const UserId me = acting_user(s.sessions, employee);
        const ActionDescriptor action = build_action(s.population, me, request);
        ActionOutcome outcome;
        try {
            outcome = execute_action(s.population.mutable_world(), me, action);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::stale_action) throw;
            throw Error(ErrorKind::infeasible, describe(action) + ": " + e.what());
        }
        return json{{"user", to_string(me)},
                    {"action", describe(action)},
                    {"endpoint", outcome.endpoint_hit},
                    {"generation", s.population.generation()}};
    });
}

json Universe::evolve() {
    return mutate([](State& s) {
        s.population.evolve();
        return json{{"generation", s.population.generation()}};
    });
}

json Universe::maintain() {
    return mutate([](State& s) {
        json j = to_json(s.population.maintain());
        j["generation"] = s.population.generation();
        return j;
    });
}

void Universe::auto_evolve(std::chrono::milliseconds period, std::stop_token stop) {
    std::mutex m;
    std::condition_variable_any cv;
    while (!stop.stop_requested()) {
        std::unique_lock lock(m);
        if (cv.wait_for(lock, stop, period, [] { return false; })) break;
        if (stop.stop_requested()) break;
        evolve();
    }
}

void Universe::persist() const { persist(*current()); }

void Universe::persist(const State& state) const {
    if (!config_.data_dir) return;
    std::error_code ec;
    std::filesystem::create_directories(*config_.data_dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create " + config_.data_dir->string());
    json sessions = json::object();
    for (const auto& [employee, user] : state.sessions) sessions[employee] = to_string(user);
    const json doc{{"population", state.population.to_json()}, {"sessions", sessions}};
    const auto file = *config_.data_dir / kStateFile;
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << doc.dump() << '\n';
        if (!out) throw Error(ErrorKind::io, "cannot write " + tmp);
    }
    std::filesystem::rename(tmp, file, ec);
    if (ec) throw Error(ErrorKind::io, "cannot replace " + file.string() + ": " + ec.message());
}

int http_status(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::already_claimed:
    case ErrorKind::workflow:
        return 409;
    case ErrorKind::forbidden:
    case ErrorKind::unclaimable:
    case ErrorKind::identity:
        return 403;
    case ErrorKind::invalid_reference:
        return 404;
    case ErrorKind::io:
        return 500;
    default:
        return 422;
    }
}

}  // namespace richstate
