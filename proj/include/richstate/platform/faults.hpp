#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "richstate/core/ids.hpp"
#include "richstate/platform/instrumentation.hpp"
#include "richstate/platform/screens.hpp"
#include "richstate/platform/world.hpp"

namespace richstate {

enum class CompareOp { eq, ge, le, gt, lt };

std::string_view to_string(CompareOp op);
std::optional<CompareOp> parse_compare_op(std::string_view text);

struct FaultCondition {
    std::string path;
    CompareOp op = CompareOp::eq;
    double value = 0.0;

    friend bool operator==(const FaultCondition&, const FaultCondition&) = default;
};

/// Declarative injected defect: crashes when its endpoint is hit and every
/// condition holds. No conditions means it crashes on every hit.
struct FaultSpec {
    std::string id;
    EndpointId endpoint;
    std::vector<FaultCondition> conditions;
    std::set<std::string> build_tags;

    friend bool operator==(const FaultSpec&, const FaultSpec&) = default;
};

/// State paths understood by conditions, e.g. "thread.message_count".
std::span<const std::string_view> known_state_paths();
bool is_known_state_path(std::string_view path);

/// Value of a state path for (world, acting user, action) before the action
/// applies. Empty when the action has no entity of the path's kind.
std::optional<double> resolve_state_path(const WorldState& world, UserId user,
                                         const ActionDescriptor& action, std::string_view path);

bool fault_triggers(const FaultSpec& fault, const WorldState& world, UserId user,
                    const ActionDescriptor& action);

/// Faults whose build_tags contain build_id.
std::vector<FaultSpec> live_faults(std::span<const FaultSpec> corpus, std::string_view build_id);

/// Parses and validates a corpus (endpoints must exist, paths must be known,
/// ids unique).
std::vector<FaultSpec> parse_fault_corpus(const nlohmann::json& doc,
                                          const Instrumentation& registry =
                                              Instrumentation::canonical());
nlohmann::json to_json(const FaultSpec& fault);

}  // namespace richstate
