#include "richstate/platform/instrumentation.hpp"

#include <algorithm>

#include "richstate/core/error.hpp"
#include "richstate/core/rng.hpp"
#include "richstate/platform/catalog.hpp"

namespace richstate {

namespace {

// One probe in kDeltaModulus is removed and one (disjoint) mirrored per build,
// for a combined delta of roughly 5%.
constexpr std::uint64_t kDeltaModulus = 40;

std::vector<ProbeId> canonical_probe_names() {
    std::vector<ProbeId> probes;
    for (auto e : ep::all()) probes.push_back(base_probe(e));
    for (auto p : pl::conditional()) probes.emplace_back(p);
    std::sort(probes.begin(), probes.end());
    return probes;
}

}  // namespace

std::string base_probe(std::string_view endpoint) {
    std::string out(pl::base_prefix);
    out += endpoint;
    return out;
}

const Instrumentation& Instrumentation::canonical() {
    static const Instrumentation instance = [] {
        Instrumentation inst;
        for (auto e : ep::all()) inst.endpoints_.emplace_back(e);
        std::sort(inst.endpoints_.begin(), inst.endpoints_.end());
        inst.code_probes_ = canonical_probe_names();
        inst.endpoint_index_.insert(inst.endpoints_.begin(), inst.endpoints_.end());
        inst.rebuild_probe_list();
        return inst;
    }();
    return instance;
}

Instrumentation Instrumentation::for_build(std::string_view build_id) {
    Instrumentation inst = canonical();
    for (const auto& probe : inst.code_probes_) {
        const auto h = stable_hash(probe, stable_hash(build_id));
        if (h % kDeltaModulus == 0) {
            inst.disabled_.insert(probe);
        } else if (h % kDeltaModulus == 1) {
            inst.mirrors_.emplace(probe, probe + "#" + std::string(build_id));
        }
    }
    inst.rebuild_probe_list();
    return inst;
}

Instrumentation Instrumentation::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("endpoints") || !doc.contains("probes")) {
        throw Error(ErrorKind::configuration, "registry must be {endpoints: [...], probes: [...]}");
    }
    std::vector<std::string> endpoints = doc.at("endpoints").get<std::vector<std::string>>();
    std::vector<std::string> probes = doc.at("probes").get<std::vector<std::string>>();
    std::sort(endpoints.begin(), endpoints.end());
    std::sort(probes.begin(), probes.end());
    if (std::adjacent_find(endpoints.begin(), endpoints.end()) != endpoints.end() ||
        std::adjacent_find(probes.begin(), probes.end()) != probes.end()) {
        throw Error(ErrorKind::configuration, "registry contains duplicate entries");
    }
    std::vector<std::string> overlap;
    std::set_intersection(endpoints.begin(), endpoints.end(), probes.begin(), probes.end(),
                          std::back_inserter(overlap));
    if (!overlap.empty()) {
        throw Error(ErrorKind::configuration,
                    "endpoint and probe namespaces overlap at '" + overlap.front() + "'");
    }
    const auto& reference = canonical();
    auto report_diff = [](const std::vector<std::string>& have,
                          const std::vector<std::string>& want, const char* what) {
        std::vector<std::string> missing;
        std::set_difference(want.begin(), want.end(), have.begin(), have.end(),
                            std::back_inserter(missing));
        std::vector<std::string> unknown;
        std::set_difference(have.begin(), have.end(), want.begin(), want.end(),
                            std::back_inserter(unknown));
        if (!missing.empty()) {
            throw Error(ErrorKind::configuration,
                        std::string("registry is missing ") + what + " '" + missing.front() + "'");
        }
        if (!unknown.empty()) {
            throw Error(ErrorKind::configuration, std::string("registry declares unknown ") +
                                                      what + " '" + unknown.front() + "'");
        }
    };
    report_diff(endpoints, reference.endpoints_, "endpoint");
    report_diff(probes, reference.code_probes_, "probe");
    return reference;
}

nlohmann::json Instrumentation::to_json() const {
    return {{"endpoints", endpoints_}, {"probes", probes_}};
}

bool Instrumentation::has_endpoint(std::string_view id) const {
    return endpoint_index_.find(id) != endpoint_index_.end();
}

bool Instrumentation::has_probe(std::string_view id) const {
    return probe_index_.find(id) != probe_index_.end();
}

void Instrumentation::emit(std::string_view probe, std::vector<ProbeId>& out) const {
    if (disabled_.find(probe) != disabled_.end()) return;
    out.emplace_back(probe);
    if (auto it = mirrors_.find(probe); it != mirrors_.end()) out.push_back(it->second);
}

void Instrumentation::rebuild_probe_list() {
    probes_.clear();
    for (const auto& p : code_probes_) {
        if (!disabled_.contains(p)) probes_.push_back(p);
    }
    for (const auto& [from, to] : mirrors_) probes_.push_back(to);
    std::sort(probes_.begin(), probes_.end());
    probe_index_ = {probes_.begin(), probes_.end()};
}

}  // namespace richstate
