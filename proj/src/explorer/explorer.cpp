#include "richstate/explorer/explorer.hpp"

#include <atomic>
#include <cassert>
#include <cmath>
#include <mutex>
#include <thread>

#include "richstate/core/error.hpp"
#include "richstate/platform/actions.hpp"
#include "richstate/populations/population.hpp"

namespace richstate {

using nlohmann::json;

std::string_view to_string(Policy policy) {
    return policy == Policy::novelty ? "novelty" : "uniform";
}

std::optional<Policy> parse_policy(std::string_view text) {
    if (text == "uniform") return Policy::uniform;
    if (text == "novelty") return Policy::novelty;
    return std::nullopt;
}

std::string_view to_string(StateMode mode) { return mode == StateMode::empty ? "empty" : "rich"; }

std::optional<StateMode> parse_state_mode(std::string_view text) {
    if (text == "rich") return StateMode::rich;
    if (text == "empty") return StateMode::empty;
    return std::nullopt;
}

void validate(const ExplorationConfig& config) {
    if (config.budget == 0) throw Error(ErrorKind::configuration, "budget must be at least 1");
    if (!(config.beta > 0.0 && config.beta <= 1.0)) {
        throw Error(ErrorKind::configuration, "beta must lie in (0, 1]");
    }
}

const ActionDescriptor& select_action(Policy policy, std::span<const ActionDescriptor> candidates,
                                      const HitHistory& history, Rng& rng, double beta) {
    if (candidates.empty()) {
        throw Error(ErrorKind::invalid_reference, "no actions available on this screen");
    }
    if (candidates.size() == 1) return candidates.front();
    if (policy == Policy::uniform) return candidates[rng.below(candidates.size())];
    std::vector<double> weights;
    weights.reserve(candidates.size());
    for (const auto& a : candidates) {
        auto it = history.find(a.endpoint);
        const double hits = it == history.end() ? 0.0 : it->second;
        weights.push_back(std::pow(1.0 + hits, -beta));
    }
    return candidates[rng.weighted_index(weights)];
}

RunResult run_exploration(const WorldSnapshot& snapshot, UserId user,
                          const ExplorationConfig& config, std::span<const FaultSpec> live_faults,
                          const Instrumentation& instrumentation, std::string run_id) {
    validate(config);
    WorldState world = restore(snapshot);
    Rng rng = Rng::substream(config.seed, "explorer");
    RunResult result;
    result.run_id = std::move(run_id);
    result.mode = config.mode;
    result.seed = config.seed;
    result.user = user;
    result.coverage.run_id = result.run_id;

    HitHistory history;
    Screen screen{ScreenKind::login, std::nullopt};
    for (std::uint32_t step = 0; step < config.budget; ++step) {
        const auto candidates = enumerate_actions(world, user, screen);
        const ActionDescriptor& action =
            select_action(config.policy, candidates, history, rng, config.beta);
        ActionOutcome outcome;
        try {
            outcome = execute_action(world, user, action, live_faults, instrumentation);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::stale_action) throw;
            ++result.steps;
            continue;
        }
        ++result.steps;
        ++history[outcome.endpoint_hit];
        result.coverage.record(step, outcome.endpoint_hit, outcome.probes_fired);
        if (outcome.crash) {
            outcome.crash->step_index = step;
            result.coverage.crashes.push_back(*outcome.crash);
        }
        screen = outcome.next_screen;
    }
    return result;
}

std::vector<RunPlan> plan_runs(Population& population, const ExplorationConfig& config,
                               std::uint32_t runs, const std::string& label,
                               std::uint32_t first_index) {
    validate(config);
    std::vector<RunPlan> plans;
    plans.reserve(runs);
    const WorldSnapshot base = snapshot(population.world());
    for (std::uint32_t i = 0; i < runs; ++i) {
        const std::uint32_t index = first_index + i;
        RunPlan plan;
        plan.run_id = label + "#" + std::to_string(index);
        plan.seed = Rng::derive_seed(config.seed, plan.run_id);
        if (config.mode == StateMode::rich) {
            const auto candidates = population.explorable_ids();
            if (candidates.empty()) {
                throw Error(ErrorKind::exhausted,
                            "population " + population.config().name +
                                " has no active unclaimed users; run maintenance first");
            }
            Rng pick = Rng::substream(plan.seed, "user");
            plan.user = candidates[pick.below(candidates.size())];
            population.record_use(plan.user);
            plan.world = base;
        } else {
            WorldState copy = population.world();
            plan.user = copy.add_user("empty_" + std::to_string(index));
            plan.world = WorldSnapshot(std::move(copy));
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

std::vector<RunResult> execute_runs(std::span<const RunPlan> plans, const ExplorationConfig& config,
                                    std::span<const FaultSpec> live_faults,
                                    const Instrumentation& instrumentation, unsigned jobs) {
    std::vector<RunResult> results(plans.size());
    auto run_one = [&](std::size_t i) {
        ExplorationConfig c = config;
        c.seed = plans[i].seed;
        results[i] = run_exploration(plans[i].world, plans[i].user, c, live_faults,
                                     instrumentation, plans[i].run_id);
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(plans.size())));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < plans.size(); ++i) run_one(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < plans.size(); i = next++) {
                try {
                    run_one(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

std::vector<FaultGroup> triage(std::span<const RunResult> results) {
    std::vector<FaultGroup> groups;
    std::map<std::string, std::size_t> index;
    for (const auto& r : results) {
        for (const auto& crash : r.crashes()) {
            const std::string sig = crash.signature();
            auto [it, inserted] = index.emplace(sig, groups.size());
            if (inserted) groups.push_back(FaultGroup{sig, crash, 0, {}});
            FaultGroup& g = groups[it->second];
            ++g.count;
            if (g.run_ids.empty() || g.run_ids.back() != r.run_id) g.run_ids.push_back(r.run_id);
        }
    }
    return groups;
}

json to_json(const RunResult& r) {
    json crashes = json::array();
    for (const auto& c : r.crashes()) crashes.push_back(to_json(c));
    return json{{"run_id", r.run_id},
                {"mode", to_string(r.mode)},
                {"seed", r.seed},
                {"user", to_string(r.user)},
                {"endpoints", r.coverage.endpoints_hit},
                {"probes", r.coverage.probes_hit},
                {"crashes", crashes},
                {"steps", r.steps}};
}

RunResult run_result_from_json(const json& doc) {
    try {
        RunResult r;
        r.run_id = doc.at("run_id").get<std::string>();
        auto mode = parse_state_mode(doc.at("mode").get<std::string>());
        if (!mode) throw Error(ErrorKind::validation, "unknown mode");
        r.mode = *mode;
        r.seed = doc.at("seed").get<std::uint64_t>();
        auto user = parse_user_id(doc.at("user").get<std::string>());
        if (!user) throw Error(ErrorKind::validation, "bad user id");
        r.user = *user;
        r.steps = doc.at("steps").get<std::uint32_t>();
        r.coverage.run_id = r.run_id;
        r.coverage.endpoints_hit = doc.at("endpoints").get<std::set<EndpointId>>();
        r.coverage.probes_hit = doc.at("probes").get<std::set<ProbeId>>();
        for (const auto& c : doc.at("crashes")) r.coverage.crashes.push_back(crash_from_json(c));
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::validation, std::string("malformed run result: ") + e.what());
    }
}

json to_json(const FaultGroup& g) {
    return json{{"signature", g.signature},
                {"fault_id", g.representative.fault_id},
                {"endpoint", g.representative.endpoint},
                {"count", g.count},
                {"runs", g.run_ids}};
}

}  // namespace richstate
