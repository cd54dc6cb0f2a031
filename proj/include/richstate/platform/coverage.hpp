#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "richstate/platform/instrumentation.hpp"

namespace richstate {

struct CrashEvent {
    std::string fault_id;
    EndpointId endpoint;
    std::uint32_t step_index = 0;

    /// fault_id + "@" + endpoint; the triage key.
    std::string signature() const { return fault_id + "@" + endpoint; }

    friend bool operator==(const CrashEvent&, const CrashEvent&) = default;
};

struct TraceStep {
    std::uint32_t step = 0;
    EndpointId endpoint;
    std::vector<ProbeId> probes;

    friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

/// Coverage of one exploration. The sets are exactly the union of the trace.
struct CoverageRecord {
    std::string run_id;
    std::set<EndpointId> endpoints_hit;
    std::set<ProbeId> probes_hit;
    std::vector<CrashEvent> crashes;
    std::vector<TraceStep> trace;

    void record(std::uint32_t step, const EndpointId& endpoint, const std::vector<ProbeId>& probes);

    friend bool operator==(const CoverageRecord&, const CoverageRecord&) = default;
};

/// True when the sets equal the trace union and every crash endpoint is in the trace.
bool coverage_consistent(const CoverageRecord& record);

nlohmann::json to_json(const CrashEvent& crash);
CrashEvent crash_from_json(const nlohmann::json& doc);

}  // namespace richstate
