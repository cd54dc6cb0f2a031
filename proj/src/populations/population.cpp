#include "richstate/populations/population.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "richstate/core/error.hpp"
#include "richstate/platform/actions.hpp"
#include "richstate/platform/world_json.hpp"

namespace richstate {

using nlohmann::json;

std::string_view to_string(Pool pool) {
    switch (pool) {
    case Pool::claimed: return "claimed";
    case Pool::unclaimed: return "unclaimed";
    case Pool::bot: return "bot";
    }
    return "unclaimed";
}

std::optional<Pool> parse_pool(std::string_view text) {
    if (text == "claimed") return Pool::claimed;
    if (text == "unclaimed") return Pool::unclaimed;
    if (text == "bot" || text == "bots") return Pool::bot;
    return std::nullopt;
}

OrgMap org_map_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::configuration, "org map must be an object");
    OrgMap org;
    for (const auto& [employee, teammates] : doc.items()) {
        if (!teammates.is_array()) {
            throw Error(ErrorKind::configuration, "org." + employee + " must be an array");
        }
        auto& list = org[employee];
        for (const auto& t : teammates) {
            if (!t.is_string()) throw Error(ErrorKind::configuration, "org." + employee + " holds a non-string");
            list.push_back(t.get<std::string>());
        }
    }
    return org;
}

Population Population::create(PopulationConfig config, std::uint64_t seed) {
    validate(config);
    Population p;
    p.config_ = std::move(config);
    p.rng_ = Rng::substream(seed, "population:" + p.config_.name);
    for (std::size_t i = 0; i < p.config_.size; ++i) {
        p.add_member(i < p.config_.bots ? Pool::bot : Pool::unclaimed);
    }
    p.world_.advance_generation();
    const auto everyone = p.active_ids();
    for (std::uint32_t round = 0; round < p.config_.actions_per_generation; ++round) {
        for (UserId id : everyone) p.run_actions(id, 1);
    }
    return p;
}

void Population::set_config(PopulationConfig config) {
    validate(config);
    if (config.workflow != config_.workflow) {
        throw Error(ErrorKind::configuration,
                    "population " + config_.name + ": workflow cannot change");
    }
    config_ = std::move(config);
}

const TestUser& Population::member(UserId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw Error(ErrorKind::invalid_reference, "no test user " + to_string(id));
    }
    return members_[it->second];
}

TestUser& Population::member_mut(UserId id) {
    return const_cast<TestUser&>(std::as_const(*this).member(id));
}

bool Population::is_member(UserId id) const { return index_.contains(id); }

std::vector<UserId> Population::active_ids(std::optional<Pool> pool) const {
    std::vector<UserId> out;
    for (const auto& m : members_) {
        if (m.active && (!pool || m.pool == *pool)) out.push_back(m.id);
    }
    return out;
}

std::vector<UserId> Population::explorable_ids() const {
    std::vector<UserId> out;
    for (const auto& m : members_) {
        if (m.active && m.pool != Pool::claimed) out.push_back(m.id);
    }
    return out;
}

PoolCounts Population::pool_counts() const {
    PoolCounts c;
    for (const auto& m : members_) {
        if (!m.active) continue;
        switch (m.pool) {
        case Pool::claimed: ++c.claimed; break;
        case Pool::unclaimed: ++c.unclaimed; break;
        case Pool::bot: ++c.bots; break;
        }
    }
    return c;
}

std::size_t Population::inactive_count() const {
    std::size_t n = 0;
    for (const auto& m : members_) n += m.active ? 0 : 1;
    return n;
}

UserId Population::add_member(Pool pool) {
    const std::string name = config_.name + (pool == Pool::bot ? "_bot" : "_user") +
                             std::to_string(members_.size() + 1);
    TestUser m;
    m.id = world_.add_user(name);
    m.persona = sample_persona(config_, rng_);
    m.pool = pool;
    m.created_at = world_.generation;
    index_.emplace(m.id, members_.size());
    members_.push_back(std::move(m));
    return members_.back().id;
}

void Population::run_actions(UserId user, std::uint32_t count) {
    const auto peers = active_ids();
    for (std::uint32_t i = 0; i < count; ++i) {
        const Persona& persona = member(user).persona;
        auto action = generate_content_action(world_, user, persona, rng_, peers);
        if (!action) return;
        execute_action(world_, user, *action);
    }
}

void Population::evolve() {
    if (config_.workflow != Workflow::evolving) {
        throw Error(ErrorKind::workflow,
                    "population " + config_.name + " is single_generation and cannot evolve");
    }
    world_.advance_generation();
    std::vector<UserId> movers;
    for (const auto& m : members_) {
        if (m.active && !m.frozen) movers.push_back(m.id);
    }
    for (std::uint32_t round = 0; round < config_.actions_per_generation; ++round) {
        for (UserId id : movers) run_actions(id, 1);
    }
}

MaintenanceReport Population::maintain() {
    MaintenanceReport report;
    report.deactivated = pending_deactivations_;
    pending_deactivations_ = 0;
    if (config_.maintenance.max_uses) {
        for (auto& m : members_) {
            if (m.active && m.use_count >= *config_.maintenance.max_uses) {
                m.active = false;
                ++report.deactivated;
            }
        }
    }

    auto fresh = [&](Pool pool) {
        const UserId id = add_member(pool);
        run_actions(id, config_.actions_per_generation);
        ++report.created;
    };

    PoolCounts counts = pool_counts();
    while (counts.total() < config_.size) {
        const Pool pool = counts.bots < config_.bots ? Pool::bot : Pool::unclaimed;
        fresh(pool);
        ++(pool == Pool::bot ? counts.bots : counts.unclaimed);
    }
    if (const auto rho = config_.maintenance.unclaimed_to_claimed_ratio) {
        const auto needed = static_cast<std::size_t>(
            std::ceil(*rho * static_cast<double>(counts.claimed) - 1e-9));
        while (counts.unclaimed < needed) {
            fresh(Pool::unclaimed);
            ++counts.unclaimed;
        }
    }
    if (counts.claimed > 0) {
        report.ratio_after =
            static_cast<double>(counts.unclaimed) / static_cast<double>(counts.claimed);
    }
    return report;
}

std::optional<UserId> Population::primary_of(std::string_view employee) const {
    for (const auto& m : members_) {
        if (m.active && m.pool == Pool::claimed && m.owner == employee) return m.id;
    }
    return std::nullopt;
}

const TestUser& Population::claim(UserId id, const std::string& employee, const OrgMap& org) {
    if (employee.empty()) throw Error(ErrorKind::identity, "employee id is empty");
    TestUser& m = member_mut(id);
    if (!m.active) throw Error(ErrorKind::invalid_use, to_string(id) + " is deactivated");
    if (m.pool == Pool::bot) {
        throw Error(ErrorKind::unclaimable, to_string(id) + " is a bot and cannot be a primary");
    }
    if (m.pool == Pool::claimed) {
        throw Error(ErrorKind::already_claimed, to_string(id) + " is already claimed");
    }
    if (auto existing = primary_of(employee)) {
        throw Error(ErrorKind::already_claimed,
                    employee + " already owns primary " + to_string(*existing));
    }
    m.pool = Pool::claimed;
    m.owner = employee;
    if (auto it = org.find(employee); it != org.end()) {
        for (const auto& teammate : it->second) {
            if (teammate == employee) continue;
            if (auto other = primary_of(teammate)) world_.add_friendship(id, *other);
        }
    }
    return m;
}

void Population::release(UserId id, const std::string& employee) {
    TestUser& m = member_mut(id);
    if (m.pool != Pool::claimed || m.owner != employee) {
        throw Error(ErrorKind::forbidden, to_string(id) + " is not claimed by " + employee);
    }
    m.pool = Pool::unclaimed;
    m.owner.reset();
    m.frozen = false;
}

void Population::set_secondary_controller(UserId bot, const std::string& employee) {
    TestUser& m = member_mut(bot);
    if (m.pool != Pool::bot) {
        throw Error(ErrorKind::unclaimable, to_string(bot) + " is not a bot");
    }
    if (m.secondary_controller && *m.secondary_controller != employee) {
        throw Error(ErrorKind::already_claimed,
                    to_string(bot) + " is controlled by " + *m.secondary_controller);
    }
    m.secondary_controller = employee;
}

TestUser& Population::editable(UserId id, const std::string& employee) {
    TestUser& m = member_mut(id);
    const bool owns = m.pool == Pool::claimed && m.owner == employee;
    const bool controls = m.pool == Pool::bot && m.secondary_controller == employee;
    if (!owns && !controls) {
        throw Error(ErrorKind::forbidden, employee + " may not change settings of " + to_string(id));
    }
    return m;
}

void Population::update_persona(UserId id, const std::string& employee, Persona persona) {
    TestUser& m = editable(id, employee);
    validate_persona(persona);
    m.persona = std::move(persona);
}

void Population::update_interests(UserId id, const std::string& employee,
                                  std::vector<std::string> interests) {
    TestUser& m = editable(id, employee);
    for (const auto& topic : interests) {
        if (topic.empty()) throw Error(ErrorKind::validation, "interest topics must be non-empty");
    }
    m.persona.interests = std::move(interests);
}

void Population::set_frozen(UserId id, const std::string& employee, bool frozen) {
    editable(id, employee).frozen = frozen;
}

void Population::record_use(UserId id) {
    TestUser& m = member_mut(id);
    if (!m.active) throw Error(ErrorKind::invalid_use, to_string(id) + " is deactivated");
    ++m.use_count;
    if (config_.maintenance.max_uses && m.use_count >= *config_.maintenance.max_uses) {
        m.active = false;
        ++pending_deactivations_;
    }
}

json Population::status() const {
    const PoolCounts c = pool_counts();
    return json{{"name", config_.name},
                {"generation", world_.generation},
                {"workflow", to_string(config_.workflow)},
                {"pools", {{"claimed", c.claimed}, {"unclaimed", c.unclaimed}, {"bots", c.bots}}},
                {"active", c.total()},
                {"inactive", inactive_count()}};
}

json to_json(const TestUser& m) {
    json j{{"id", m.id.value},
           {"persona", to_json(m.persona)},
           {"pool", to_string(m.pool)},
           {"use_count", m.use_count},
           {"active", m.active},
           {"frozen", m.frozen},
           {"created_at", m.created_at}};
    j["owner"] = m.owner ? json(*m.owner) : json();
    j["secondary_controller"] = m.secondary_controller ? json(*m.secondary_controller) : json();
    return j;
}

json to_json(const MaintenanceReport& r) {
    return json{{"deactivated", r.deactivated},
                {"created", r.created},
                {"ratio_after", r.ratio_after ? json(*r.ratio_after) : json()}};
}

json Population::to_json() const {
    json members = json::array();
    for (const auto& m : members_) members.push_back(richstate::to_json(m));
    return json{{"config", richstate::to_json(config_)},
                {"members", members},
                {"rng", rng_.state()},
                {"pending_deactivations", pending_deactivations_},
                {"world", richstate::to_json(world_)}};
}

Population Population::from_json(const json& doc) {
    try {
        Population p;
        p.config_ = population_config_from_json(doc.at("config"));
        p.world_ = world_from_json(doc.at("world"));
        p.rng_.set_state(doc.at("rng").get<std::string>());
        p.pending_deactivations_ = doc.value("pending_deactivations", std::size_t{0});
        for (const auto& j : doc.at("members")) {
            TestUser m;
            m.id = UserId{j.at("id").get<std::uint64_t>()};
            if (!p.world_.has_user(m.id)) {
                throw Error(ErrorKind::validation, "member " + to_string(m.id) + " missing from world");
            }
            m.persona = persona_from_json(j.at("persona"));
            auto pool = parse_pool(j.at("pool").get<std::string>());
            if (!pool) throw Error(ErrorKind::validation, "unknown pool");
            m.pool = *pool;
            if (!j.at("owner").is_null()) m.owner = j.at("owner").get<std::string>();
            if (!j.at("secondary_controller").is_null()) {
                m.secondary_controller = j.at("secondary_controller").get<std::string>();
            }
            m.use_count = j.at("use_count").get<std::uint32_t>();
            m.active = j.at("active").get<bool>();
            m.frozen = j.value("frozen", false);
            m.created_at = j.at("created_at").get<Generation>();
            if ((m.pool == Pool::claimed) != m.owner.has_value()) {
                throw Error(ErrorKind::validation, "member " + to_string(m.id) + " has inconsistent ownership");
            }
            p.index_.emplace(m.id, p.members_.size());
            p.members_.push_back(std::move(m));
        }
        return p;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::validation, std::string("malformed population document: ") + e.what());
    }
}

std::vector<ReconcileAction> runner_reconcile(const json& registry,
                                              std::map<std::string, Population>& managed,
                                              std::optional<Generation> clock, std::uint64_t seed,
                                              const PersonaLibrary& library) {
    std::vector<ReconcileAction> actions;
    if (!registry.is_array()) {
        actions.push_back({"", "skipped", "registry is not an array"});
        return actions;
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < registry.size(); ++i) {
        PopulationConfig config;
        try {
            config = population_config_from_json(registry[i], library);
        } catch (const Error& e) {
            actions.push_back({"", "skipped", "registry[" + std::to_string(i) + "]: " + e.what()});
            continue;
        }
        const std::string name = config.name;
        if (!seen.insert(name).second) {
            actions.push_back({name, "skipped", "duplicate registry entry"});
            continue;
        }
        auto it = managed.find(name);
        if (it == managed.end()) {
            managed.emplace(name, Population::create(config, Rng::derive_seed(seed, name)));
            actions.push_back({name, "created", "generation 1"});
            it = managed.find(name);
        } else if (!(it->second.config() == config)) {
            try {
                it->second.set_config(config);
                actions.push_back({name, "config_updated", "applies at next maintenance"});
            } catch (const Error& e) {
                actions.push_back({name, "skipped", e.what()});
            }
        }
        Population& pop = it->second;
        if (clock && pop.config().workflow == Workflow::evolving) {
            while (pop.generation() < *clock) {
                pop.evolve();
                actions.push_back({name, "evolved", "generation " + std::to_string(pop.generation())});
                const auto report = pop.maintain();
                actions.push_back({name, "maintained", to_json(report).dump()});
            }
        }
    }
    return actions;
}

}  // namespace richstate
