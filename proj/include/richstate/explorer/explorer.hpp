#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "richstate/core/rng.hpp"
#include "richstate/platform/coverage.hpp"
#include "richstate/platform/faults.hpp"
#include "richstate/platform/instrumentation.hpp"
#include "richstate/platform/screens.hpp"
#include "richstate/platform/world.hpp"

namespace richstate {

class Population;

enum class Policy { uniform, novelty };
enum class StateMode { rich, empty };

std::string_view to_string(Policy policy);
std::optional<Policy> parse_policy(std::string_view text);
std::string_view to_string(StateMode mode);
std::optional<StateMode> parse_state_mode(std::string_view text);

struct ExplorationConfig {
    std::uint32_t budget = 100;
    Policy policy = Policy::uniform;
    /// Novelty exponent; weight = 1 / (1 + hits)^beta.
    double beta = 1.0;
    std::uint64_t seed = 0;
    StateMode mode = StateMode::rich;
};

/// Throws Error(configuration) for a zero budget or beta outside (0, 1].
void validate(const ExplorationConfig& config);

struct RunResult {
    std::string run_id;
    StateMode mode = StateMode::rich;
    std::uint64_t seed = 0;
    UserId user;
    std::uint32_t steps = 0;
    CoverageRecord coverage;

    const std::vector<CrashEvent>& crashes() const { return coverage.crashes; }

    friend bool operator==(const RunResult&, const RunResult&) = default;
};

using HitHistory = std::map<EndpointId, std::uint32_t, std::less<>>;

/// Candidates must be non-empty.
const ActionDescriptor& select_action(Policy policy, std::span<const ActionDescriptor> candidates,
                                      const HitHistory& history, Rng& rng, double beta = 1.0);

/// Starts at Login and takes `config.budget` steps on a private copy of the
/// snapshot. A crash relaunches the app at Login and the run continues.
RunResult run_exploration(const WorldSnapshot& snapshot, UserId user,
                          const ExplorationConfig& config, std::span<const FaultSpec> live_faults,
                          const Instrumentation& instrumentation = Instrumentation::canonical(),
                          std::string run_id = "run");

/// One planned run: which user, in which world, with which seed.
struct RunPlan {
    std::string run_id;
    WorldSnapshot world;
    UserId user;
    std::uint64_t seed = 0;
};

/// Plans `runs` explorations against the population. Rich mode draws an
/// active unclaimed user or bot per run and records one use for it; empty
/// mode logs in a fresh user added to a copy of the population world.
/// Run i uses seed derive_seed(config.seed, label + "#" + i).
/// Throws Error(exhausted) when rich mode runs out of explorable users.
std::vector<RunPlan> plan_runs(Population& population, const ExplorationConfig& config,
                               std::uint32_t runs, const std::string& label,
                               std::uint32_t first_index = 0);

/// Executes plans, concurrently when jobs > 1; results keep plan order.
std::vector<RunResult> execute_runs(std::span<const RunPlan> plans, const ExplorationConfig& config,
                                    std::span<const FaultSpec> live_faults,
                                    const Instrumentation& instrumentation, unsigned jobs = 1);

struct FaultGroup {
    std::string signature;
    CrashEvent representative;
    std::size_t count = 0;
    std::vector<std::string> run_ids;

    friend bool operator==(const FaultGroup&, const FaultGroup&) = default;
};

/// Groups crashes by signature, ordered by first occurrence.
std::vector<FaultGroup> triage(std::span<const RunResult> results);

nlohmann::json to_json(const RunResult& result);
RunResult run_result_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const FaultGroup& group);

}  // namespace richstate
