#include "richstate/platform/coverage.hpp"

namespace richstate {

void CoverageRecord::record(std::uint32_t step, const EndpointId& endpoint,
                            const std::vector<ProbeId>& probes) {
    endpoints_hit.insert(endpoint);
    probes_hit.insert(probes.begin(), probes.end());
    trace.push_back({step, endpoint, probes});
}

bool coverage_consistent(const CoverageRecord& record) {
    std::set<EndpointId> endpoints;
    std::set<ProbeId> probes;
    for (const auto& step : record.trace) {
        endpoints.insert(step.endpoint);
        probes.insert(step.probes.begin(), step.probes.end());
    }
    if (endpoints != record.endpoints_hit || probes != record.probes_hit) return false;
    for (const auto& crash : record.crashes) {
        bool found = false;
        for (const auto& step : record.trace) {
            if (step.step == crash.step_index && step.endpoint == crash.endpoint) found = true;
        }
        if (!found) return false;
    }
    return true;
}

nlohmann::json to_json(const CrashEvent& crash) {
    return {{"fault_id", crash.fault_id},
            {"endpoint", crash.endpoint},
            {"step", crash.step_index},
            {"signature", crash.signature()}};
}

CrashEvent crash_from_json(const nlohmann::json& doc) {
    CrashEvent crash;
    crash.fault_id = doc.at("fault_id").get<std::string>();
    crash.endpoint = doc.at("endpoint").get<std::string>();
    crash.step_index = doc.at("step").get<std::uint32_t>();
    return crash;
}

}  // namespace richstate
