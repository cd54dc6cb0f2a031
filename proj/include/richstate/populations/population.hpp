#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "richstate/core/rng.hpp"
#include "richstate/personas/persona.hpp"
#include "richstate/platform/world.hpp"

namespace richstate {

enum class Pool { claimed, unclaimed, bot };

std::string_view to_string(Pool pool);
std::optional<Pool> parse_pool(std::string_view text);

struct TestUser {
    UserId id;
    Persona persona;
    Pool pool = Pool::unclaimed;
    /// Employee owning this user as their primary (claimed pool only).
    std::optional<std::string> owner;
    /// Employee steering a bot without owning it.
    std::optional<std::string> secondary_controller;
    std::uint32_t use_count = 0;
    bool active = true;
    /// Owner asked evolution to leave this user alone.
    bool frozen = false;
    Generation created_at = 0;

    friend bool operator==(const TestUser&, const TestUser&) = default;
};

struct MaintenanceReport {
    std::size_t deactivated = 0;
    std::size_t created = 0;
    /// unclaimed / claimed after the pass; empty when nobody is claimed.
    std::optional<double> ratio_after;

    friend bool operator==(const MaintenanceReport&, const MaintenanceReport&) = default;
};

struct PoolCounts {
    std::size_t claimed = 0;
    std::size_t unclaimed = 0;
    std::size_t bots = 0;

    std::size_t total() const { return claimed + unclaimed + bots; }
    friend bool operator==(const PoolCounts&, const PoolCounts&) = default;
};

/// employee id -> teammate employee ids.
using OrgMap = std::map<std::string, std::vector<std::string>, std::less<>>;

OrgMap org_map_from_json(const nlohmann::json& doc);

/// A maintained set of test users living in its own world.
class Population {
public:
    /// Creates config.size users and runs their first generation of content.
    static Population create(PopulationConfig config, std::uint64_t seed);

    const PopulationConfig& config() const { return config_; }
    /// Takes effect at the next maintenance pass. The workflow cannot change.
    void set_config(PopulationConfig config);

    const WorldState& world() const { return world_; }
    Generation generation() const { return world_.generation; }
    const std::vector<TestUser>& members() const { return members_; }
    const TestUser& member(UserId id) const;
    bool is_member(UserId id) const;

    /// Active members, optionally restricted to one pool, in creation order.
    std::vector<UserId> active_ids(std::optional<Pool> pool = {}) const;
    /// Active members the explorer may use: unclaimed users and bots.
    std::vector<UserId> explorable_ids() const;
    PoolCounts pool_counts() const;
    std::size_t inactive_count() const;

    /// Next generation: every active, unfrozen member takes k persona actions.
    void evolve();
    MaintenanceReport maintain();

    /// Makes `employee` the owner and friends the user with every primary
    /// owned by the employee's teammates.
    const TestUser& claim(UserId id, const std::string& employee, const OrgMap& org);
    void release(UserId id, const std::string& employee);
    /// Bots can be steered but not owned.
    void set_secondary_controller(UserId bot, const std::string& employee);
    std::optional<UserId> primary_of(std::string_view employee) const;

    void update_persona(UserId id, const std::string& employee, Persona persona);
    void update_interests(UserId id, const std::string& employee, std::vector<std::string> interests);
    void set_frozen(UserId id, const std::string& employee, bool frozen);

    void record_use(UserId id);

    /// The universe service applies manual actions here.
    WorldState& mutable_world() { return world_; }

    nlohmann::json status() const;
    nlohmann::json to_json() const;
    static Population from_json(const nlohmann::json& doc);

    friend bool operator==(const Population&, const Population&) = default;

private:
    Population() = default;

    TestUser& member_mut(UserId id);
    TestUser& editable(UserId id, const std::string& employee);
    UserId add_member(Pool pool);
    void run_actions(UserId user, std::uint32_t count);

    PopulationConfig config_;
    WorldState world_;
    std::vector<TestUser> members_;
    std::map<UserId, std::size_t> index_;
    Rng rng_;
    std::size_t pending_deactivations_ = 0;
};

nlohmann::json to_json(const TestUser& user);
nlohmann::json to_json(const MaintenanceReport& report);

struct ReconcileAction {
    std::string population;
    /// "created", "config_updated", "evolved", "maintained", "skipped".
    std::string action;
    std::string detail;

    friend bool operator==(const ReconcileAction&, const ReconcileAction&) = default;
};

/// One pass of the runner loop: creates populations for new registry entries,
/// stores changed configs for the next maintenance, and brings evolving
/// populations up to `clock` (evolve then maintain per missing generation).
/// Malformed entries are skipped with a "skipped" action carrying the reason.
std::vector<ReconcileAction> runner_reconcile(const nlohmann::json& registry,
                                              std::map<std::string, Population>& managed,
                                              std::optional<Generation> clock, std::uint64_t seed,
                                              const PersonaLibrary& library =
                                                  default_persona_library());

}  // namespace richstate
