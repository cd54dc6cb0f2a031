#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace richstate {

using EndpointId = std::string;
using ProbeId = std::string;

std::string base_probe(std::string_view endpoint);

/// Endpoint and probe registries for one build of the simulated platform.
///
/// The canonical registry is what the platform code fires. A build derived
/// from it disables a few probes (code removed) and mirrors a few others onto
/// build-specific names (code added), so successive builds differ by a few
/// percent of their probe inventory.
class Instrumentation {
public:
    static const Instrumentation& canonical();
    /// Canonical registry with the deterministic per-build delta applied.
    static Instrumentation for_build(std::string_view build_id);
    /// Parses {endpoints: [..], probes: [..]}; must match the canonical inventory.
    static Instrumentation from_json(const nlohmann::json& doc);

    nlohmann::json to_json() const;

    const std::vector<EndpointId>& endpoints() const { return endpoints_; }
    /// Probes that can fire in this build, sorted.
    const std::vector<ProbeId>& probes() const { return probes_; }
    bool has_endpoint(std::string_view id) const;
    bool has_probe(std::string_view id) const;

    /// Appends what a code-level probe emits in this build (nothing, itself,
    /// or itself plus a build-specific mirror).
    void emit(std::string_view probe, std::vector<ProbeId>& out) const;

    friend bool operator==(const Instrumentation&, const Instrumentation&) = default;

private:
    void rebuild_probe_list();

    std::vector<EndpointId> endpoints_;
    std::vector<ProbeId> code_probes_;
    std::set<ProbeId, std::less<>> disabled_;
    std::map<ProbeId, ProbeId, std::less<>> mirrors_;
    std::vector<ProbeId> probes_;
    std::set<std::string, std::less<>> endpoint_index_;
    std::set<std::string, std::less<>> probe_index_;
};

}  // namespace richstate
