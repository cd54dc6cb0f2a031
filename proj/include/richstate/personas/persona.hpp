#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "richstate/core/error.hpp"
#include "richstate/core/rng.hpp"
#include "richstate/platform/content.hpp"
#include "richstate/platform/screens.hpp"
#include "richstate/platform/world.hpp"

namespace richstate {

enum class Feature {
    create_post,
    comment,
    like,
    send_message,
    friend_request,
    create_group,
    join_group,
    create_listing,
    post_story,
};

inline constexpr std::array<Feature, 9> kAllFeatures = {
    Feature::create_post,  Feature::comment,    Feature::like,
    Feature::send_message, Feature::friend_request, Feature::create_group,
    Feature::join_group,   Feature::create_listing, Feature::post_story,
};

std::string_view to_string(Feature feature);
std::optional<Feature> parse_feature(std::string_view text);

struct Persona {
    std::string name;
    /// Relative frequencies; missing features weigh 0.
    std::map<Feature, double> feature_weights;
    std::vector<std::string> interests;

    double weight(Feature f) const;

    friend bool operator==(const Persona&, const Persona&) = default;
};

/// Throws Error(kind) naming the problem when weights are negative,
/// non-finite or all zero.
void validate_persona(const Persona& persona, ErrorKind kind = ErrorKind::validation);

nlohmann::json to_json(const Persona& persona);
Persona persona_from_json(const nlohmann::json& doc, ErrorKind kind = ErrorKind::validation);

enum class Workflow { single_generation, evolving };

std::string_view to_string(Workflow workflow);

struct WeightedPersona {
    Persona persona;
    double weight = 1.0;

    friend bool operator==(const WeightedPersona&, const WeightedPersona&) = default;
};

struct MaintenancePolicy {
    std::optional<std::uint32_t> max_uses;
    std::optional<double> unclaimed_to_claimed_ratio;

    friend bool operator==(const MaintenancePolicy&, const MaintenancePolicy&) = default;
};

struct PopulationConfig {
    std::string name;
    std::size_t size = 0;
    std::vector<WeightedPersona> persona_distribution;
    Workflow workflow = Workflow::single_generation;
    MaintenancePolicy maintenance;
    /// Actions each active member takes per generation.
    std::uint32_t actions_per_generation = 1;
    /// How many of the initial members are bots.
    std::size_t bots = 0;

    friend bool operator==(const PopulationConfig&, const PopulationConfig&) = default;
};

/// Throws Error(configuration) describing the first violated rule.
void validate(const PopulationConfig& config);

using PersonaLibrary = std::map<std::string, Persona, std::less<>>;

/// ordinary, marketplace_seller, messenger_heavy, group_admin, lurker.
const PersonaLibrary& default_persona_library();
PersonaLibrary persona_library_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const PersonaLibrary& library);

/// Size 30, single generation, at most 10 uses per user, 30 actions.
PopulationConfig default_sapienz_config();

nlohmann::json to_json(const PopulationConfig& config);
/// Distribution entries either name a library persona or embed one.
/// Errors carry the offending field path.
PopulationConfig population_config_from_json(const nlohmann::json& doc,
                                             const PersonaLibrary& library =
                                                 default_persona_library());
std::vector<PopulationConfig> population_registry_from_json(
    const nlohmann::json& doc, const PersonaLibrary& library = default_persona_library());

const Persona& sample_persona(const PopulationConfig& config, Rng& rng);

ContentBlob render_interest_content(std::string_view interest, Feature feature, Rng& rng);

/// Persona-driven action for `user`, instantiated against the current world.
/// Infeasible features are resampled among feasible ones; empty means no
/// feature is feasible. `peers` restricts friend-request targets (all users
/// when empty).
std::optional<ActionDescriptor> generate_content_action(const WorldState& world, UserId user,
                                                        const Persona& persona, Rng& rng,
                                                        std::span<const UserId> peers = {});

/// Feature an action descriptor built by generate_content_action realises.
std::optional<Feature> feature_of(const ActionDescriptor& action);

}  // namespace richstate
